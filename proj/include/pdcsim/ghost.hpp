// Fourth-order correlation G²(x_R, x_T) of the seeded-PDC pair field over a
// discrete transverse-momentum grid, and the ghost-image / ghost-diffraction
// reconstructions built from it. Transverse coordinates are 1-D.
//
// Conventions: h̃_j(x, q) = ∫dx' e^{iqx'} h_j(x, x'); the object spectrum is
// t̃(k) = ∫dx t(x) e^{−ikx}. Under these, free propagation of the Test field
// over d₁ onto the object plane gives h̃_T = e^{−iλd₁q²/4π} e^{+iqx_T} t(x_T),
// and the imaging branch concentrates G² on x_T = −x_R/M.
#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pdcsim/gaussian.hpp"
#include "pdcsim/object.hpp"

namespace pdcsim::ghost {

/// Test-arm collection optics.
enum class Collection {
  ObjectPlane,  // (a) detector on the object plane
  FourierLens,  // (b) lens f_T behind the object, detector in its focal plane
};

enum class ReferenceBranch { Imaging, Fourier };

class IllConditionedGeometry : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct GhostGeometry {
  double lambda{0};
  double d1{0};
  double d2{0};
  double d3{0};
  double f_r{0};
  double f_t{0};
  Collection variant{Collection::ObjectPlane};

  void validate() const;
  /// M = d₃/(d₁ + d₂).
  double magnification() const { return d3 / (d1 + d2); }
  /// 1/(d₁ + d₂) + 1/d₃ − 1/f_R; zero when the back-propagating thin-lens
  /// relation holds.
  double thin_lens_residual() const { return 1.0 / (d1 + d2) + 1.0 / d3 - 1.0 / f_r; }
  /// 1/d₃ − 1/f_R.
  double lens_defocus() const { return 1.0 / d3 - 1.0 / f_r; }
  /// Fourier branch when f_R = d₃ (to 1e−12 relative), imaging branch when
  /// clearly apart; in between throws IllConditionedGeometry.
  ReferenceBranch reference_branch() const;
};

/// q_m = m·dq for m = −N..N.
struct QGrid {
  int n_half{0};
  double dq{0};

  int size() const { return 2 * n_half + 1; }
  double q(int index) const { return (index - n_half) * dq; }
  std::vector<double> values() const;
};

/// n_half samples per side with N·dq = window_factor · 2π/feature_size.
QGrid default_qgrid(double feature_size, int n_half = 512, double window_factor = 8.0);

/// Source model: per-q seed means and coupling.
class KernelProfile {
 public:
  /// Constant |κ| across the q window.
  static KernelProfile constant(double mu_t, double mu_r, double kappa_abs);
  /// |κ_q| = κ₀ |sinc(β q²)|.
  static KernelProfile sinc(double mu_t, double mu_r, double kappa0, double beta);
  /// Explicit parameters for every q of `grid`, in grid order.
  static KernelProfile per_mode(const QGrid& grid, std::vector<ModeParams<double>> modes);

  ModeParams<double> params(double q) const;
  /// Throws std::invalid_argument unless C_q = C_{−q} on the grid.
  void check_symmetric(const QGrid& grid) const;

 private:
  enum class Kind { Constant, Sinc, PerMode };
  Kind kind_{Kind::Constant};
  double mu_t_{0}, mu_r_{0}, kappa0_{0}, beta_{0};
  QGrid grid_{};
  std::vector<ModeParams<double>> modes_;
};

/// C_q = u_q v_q (1 + μ_T,q + μ_R,−q).
double kernel_c(double q, const KernelProfile& profile);

/// h̃_T(x_T, q). Object-plane collection: e^{−iλd₁q²/4π} e^{iqx_T} t(x_T);
/// Fourier-lens collection: e^{−iλd₁q²/4π} t̃(−q − 2πx_T/(λf_T)).
Complex transfer_t(const GhostGeometry& geometry, const SampledObject& object, double q,
                   double x_t);

/// h̃_R(x_R, −q). On the Fourier branch the delta is a Kronecker selection of
/// q = −2πx_R/(λd₃) on a grid of spacing dq, weighted 1/dq.
Complex transfer_r(const GhostGeometry& geometry, double q, double x_r, double dq);

struct G2Map {
  std::vector<double> x_r;
  std::vector<double> x_t;
  /// rows: x_R, cols: x_T.
  Eigen::MatrixXd values;
};

enum class Summation {
  Direct,  // explicit q-sum for every (x_R, x_T)
  Fast,    // FFT over q; object-plane collection on commensurate grids only
};

/// G²(x_R, x_T) = |Σ_q h̃_R(x_R, −q) h̃_T(x_T, q) C_q|².
G2Map g2_map(const GhostGeometry& geometry, const SampledObject& object,
             const KernelProfile& profile, const QGrid& qgrid, const std::vector<double>& x_r,
             const std::vector<double>& x_t, Summation method = Summation::Direct);

/// True when x_t = j·dx with dx·dq·(2N+1) = 2π and at most 2N+1 points.
bool is_commensurate(const QGrid& qgrid, const std::vector<double>& x_t);

struct Reconstruction {
  std::vector<double> x;
  std::vector<double> raw;
  std::vector<double> normalized;
};

Reconstruction make_reconstruction(std::vector<double> x, std::vector<double> raw);

struct GhostImage {
  Reconstruction image;
  G2Map map;
};

/// Ghost image on the imaging branch. Object-plane collection integrates G²
/// over the bucket (x_T); Fourier-lens collection returns the x_T = 0 slice
/// (nearest grid point) of the resolved map.
GhostImage ghost_image(const GhostGeometry& geometry, const SampledObject& object,
                       const KernelProfile& profile, const QGrid& qgrid,
                       const std::vector<double>& x_r, const std::vector<double>& x_t,
                       Summation method = Summation::Direct);

/// Ghost diffraction pattern G²(x_R, x_T = 0) on the Fourier branch with
/// Fourier-lens collection; ∝ |t̃(2πx_R/(λd₃))|² C².
Reconstruction ghost_diffraction(const GhostGeometry& geometry, const SampledObject& object,
                                 const KernelProfile& profile, const QGrid& qgrid,
                                 const std::vector<double>& x_r);

struct ImagingGrids {
  QGrid q;
  std::vector<double> x_t;
  std::vector<double> x_r;
};

/// Commensurate grids for imaging: x_T spacing 2π/((2N+1)dq), `nx` points
/// around zero, and x_R = −M·x_T in ascending order.
ImagingGrids commensurate_imaging_grids(const GhostGeometry& geometry, const QGrid& qgrid,
                                        int nx = 512);

/// x_R = −q_m λd₃/2π for every q in the grid, ascending.
std::vector<double> fourier_plane_grid(const GhostGeometry& geometry, const QGrid& qgrid);

/// Normalized (Pearson) cross-correlation of two equally sized profiles.
double normalized_cross_correlation(const std::vector<double>& a, const std::vector<double>& b);

/// Full width at half maximum of a sampled peak, linearly interpolated.
double fwhm(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pdcsim::ghost
