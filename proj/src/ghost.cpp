#include "pdcsim/ghost.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <unsupported/Eigen/FFT>

namespace pdcsim::ghost {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourierBranchTol = 1e-12;
constexpr double kIllConditionedTol = 1e-6;

Complex phase(double angle) { return std::polar(1.0, angle); }

double uniform_spacing(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  return (x.back() - x.front()) / static_cast<double>(x.size() - 1);
}

}  // namespace

void GhostGeometry::validate() const {
  if (!(lambda > 0) || !(d1 > 0) || !(d2 > 0) || !(d3 > 0) || !(f_r > 0))
    throw std::invalid_argument("geometry lengths (lambda, d1, d2, d3, f_r) must be > 0");
  if (variant == Collection::FourierLens && !(f_t > 0))
    throw std::invalid_argument("Fourier-lens collection needs f_t > 0");
}

ReferenceBranch GhostGeometry::reference_branch() const {
  validate();
  const double rel = std::abs(lens_defocus()) * d3;
  if (rel <= kFourierBranchTol) return ReferenceBranch::Fourier;
  if (rel < kIllConditionedTol)
    throw IllConditionedGeometry("ill-conditioned geometry: f_r is within 1e-6 of d3 but not equal");
  return ReferenceBranch::Imaging;
}

std::vector<double> QGrid::values() const {
  std::vector<double> q(static_cast<std::size_t>(size()));
  for (int i = 0; i < size(); ++i) q[static_cast<std::size_t>(i)] = this->q(i);
  return q;
}

QGrid default_qgrid(double feature_size, int n_half, double window_factor) {
  if (!(feature_size > 0) || n_half < 1 || !(window_factor > 0))
    throw std::invalid_argument("q grid needs feature_size > 0, n_half >= 1, window_factor > 0");
  return QGrid{n_half, window_factor * 2 * kPi / feature_size / n_half};
}

KernelProfile KernelProfile::constant(double mu_t, double mu_r, double kappa_abs) {
  KernelProfile p;
  p.kind_ = Kind::Constant;
  p.mu_t_ = mu_t;
  p.mu_r_ = mu_r;
  p.kappa0_ = kappa_abs;
  ModeParams<double>{mu_t, mu_r, kappa_abs, 0.0}.validate();
  return p;
}

KernelProfile KernelProfile::sinc(double mu_t, double mu_r, double kappa0, double beta) {
  KernelProfile p = constant(mu_t, mu_r, kappa0);
  if (!(beta >= 0)) throw std::invalid_argument("sinc bandwidth beta must be >= 0");
  p.kind_ = Kind::Sinc;
  p.beta_ = beta;
  return p;
}

KernelProfile KernelProfile::per_mode(const QGrid& grid, std::vector<ModeParams<double>> modes) {
  if (static_cast<int>(modes.size()) != grid.size())
    throw std::invalid_argument("per-mode profile needs one entry per q sample");
  for (const auto& m : modes) m.validate();
  KernelProfile p;
  p.kind_ = Kind::PerMode;
  p.grid_ = grid;
  p.modes_ = std::move(modes);
  return p;
}

ModeParams<double> KernelProfile::params(double q) const {
  switch (kind_) {
    case Kind::Constant:
      return {mu_t_, mu_r_, kappa0_, 0.0};
    case Kind::Sinc: {
      const double arg = beta_ * q * q;
      const double s = arg == 0.0 ? 1.0 : std::sin(arg) / arg;
      return {mu_t_, mu_r_, kappa0_ * std::abs(s), 0.0};
    }
    case Kind::PerMode: {
      const double pos = q / grid_.dq;
      const long idx = std::lround(pos) + grid_.n_half;
      if (std::abs(pos - std::round(pos)) > 1e-6 || idx < 0 || idx >= grid_.size())
        throw std::out_of_range("q is not a sample of the per-mode profile grid");
      return modes_[static_cast<std::size_t>(idx)];
    }
  }
  return {};
}

void KernelProfile::check_symmetric(const QGrid& grid) const {
  for (int m = 1; m <= grid.n_half; ++m) {
    const double cp = kernel_c(m * grid.dq, *this);
    const double cm = kernel_c(-m * grid.dq, *this);
    if (std::abs(cp - cm) > 1e-12 * std::max({1.0, std::abs(cp), std::abs(cm)}))
      throw std::invalid_argument("kernel profile violates C_q = C_-q pairing");
  }
}

double kernel_c(double q, const KernelProfile& profile) {
  const ModeParams<double> p = profile.params(q);
  return p.u() * p.v() * (1 + p.mu_t + p.mu_r);
}

Complex transfer_t(const GhostGeometry& geometry, const SampledObject& object, double q,
                   double x_t) {
  const Complex propagation = phase(-geometry.lambda * geometry.d1 * q * q / (4 * kPi));
  if (geometry.variant == Collection::ObjectPlane)
    return propagation * phase(q * x_t) * object.at(x_t);
  const double k = -q - 2 * kPi * x_t / (geometry.lambda * geometry.f_t);
  return propagation * object.spectrum(k);
}

Complex transfer_r(const GhostGeometry& geometry, double q, double x_r, double dq) {
  const double lambda = geometry.lambda;
  if (geometry.reference_branch() == ReferenceBranch::Imaging) {
    const double inv_defocus = 1.0 / geometry.lens_defocus();
    return phase(-lambda / (4 * kPi) * (geometry.d2 + inv_defocus) * q * q) *
           phase(-q * x_r * inv_defocus / geometry.d3);
  }
  if (!(dq > 0)) throw std::invalid_argument("Fourier branch needs the grid spacing dq");
  const double selected = -2 * kPi * x_r / (lambda * geometry.d3);
  if (std::abs(q - selected) > 1e-6 * dq) return {0.0, 0.0};
  return phase(-lambda * geometry.d2 * q * q / (4 * kPi)) / dq;
}

bool is_commensurate(const QGrid& qgrid, const std::vector<double>& x_t) {
  if (x_t.size() < 2 || static_cast<int>(x_t.size()) > qgrid.size()) return false;
  const double dx = uniform_spacing(x_t);
  if (std::abs(dx * qgrid.dq * qgrid.size() - 2 * kPi) > 1e-9 * 2 * kPi) return false;
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    const double pos = x_t[i] / dx;
    if (std::abs(pos - std::round(pos)) > 1e-6) return false;
    if (std::abs(x_t[i] - (x_t.front() + static_cast<double>(i) * dx)) > 1e-6 * dx) return false;
  }
  return true;
}

G2Map g2_map(const GhostGeometry& geometry, const SampledObject& object,
             const KernelProfile& profile, const QGrid& qgrid, const std::vector<double>& x_r,
             const std::vector<double>& x_t, Summation method) {
  geometry.validate();
  if (qgrid.n_half < 0 || !(qgrid.dq > 0)) throw std::invalid_argument("invalid q grid");
  if (x_r.empty() || x_t.empty()) throw std::invalid_argument("detector grids must be non-empty");
  profile.check_symmetric(qgrid);

  const int nq = qgrid.size();
  const auto nr = static_cast<Eigen::Index>(x_r.size());
  const auto nt = static_cast<Eigen::Index>(x_t.size());
  const std::vector<double> q = qgrid.values();

  // Reference-arm kernel weighted by C_q: rows x_R, cols q.
  Eigen::MatrixXcd reference(nr, nq);
  for (int m = 0; m < nq; ++m) {
    const double c = kernel_c(q[static_cast<std::size_t>(m)], profile);
    for (Eigen::Index r = 0; r < nr; ++r)
      reference(r, m) =
          c * transfer_r(geometry, q[static_cast<std::size_t>(m)], x_r[static_cast<std::size_t>(r)],
                         qgrid.dq);
  }

  G2Map out{x_r, x_t, Eigen::MatrixXd(nr, nt)};

  if (method == Summation::Direct) {
    Eigen::MatrixXcd test(nq, nt);
    for (Eigen::Index c = 0; c < nt; ++c)
      for (int m = 0; m < nq; ++m)
        test(m, c) = transfer_t(geometry, object, q[static_cast<std::size_t>(m)],
                                x_t[static_cast<std::size_t>(c)]);
    const Eigen::MatrixXcd field = reference * test;
    out.values = field.cwiseAbs2();
    return out;
  }

  if (geometry.variant != Collection::ObjectPlane)
    throw std::invalid_argument("fast summation supports object-plane collection only");
  if (!is_commensurate(qgrid, x_t))
    throw std::invalid_argument("fast summation needs x_t commensurate with the q grid");

  // With x_j = j·dx and dx·dq = 2π/L, Σ_m A_m e^{i q_m x_j} is a length-L
  // inverse DFT of A indexed by m mod L.
  const double dx = uniform_spacing(x_t);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<Complex> spectrum(static_cast<std::size_t>(nq));
  std::vector<Complex> field;
  std::vector<Complex> object_values(x_t.size());
  std::vector<long> slot(x_t.size());
  for (std::size_t c = 0; c < x_t.size(); ++c) {
    object_values[c] = object.at(x_t[c]);
    const long j = std::lround(x_t[c] / dx);
    slot[c] = ((j % nq) + nq) % nq;
  }
  for (Eigen::Index r = 0; r < nr; ++r) {
    for (int m = 0; m < nq; ++m) {
      const double qm = q[static_cast<std::size_t>(m)];
      const int shifted = ((m - qgrid.n_half) % nq + nq) % nq;
      spectrum[static_cast<std::size_t>(shifted)] =
          reference(r, m) * phase(-geometry.lambda * geometry.d1 * qm * qm / (4 * kPi));
    }
    fft.inv(field, spectrum);
    for (Eigen::Index c = 0; c < nt; ++c)
      out.values(r, c) = std::norm(field[static_cast<std::size_t>(slot[static_cast<std::size_t>(c)])] *
                                   object_values[static_cast<std::size_t>(c)]);
  }
  return out;
}

Reconstruction make_reconstruction(std::vector<double> x, std::vector<double> raw) {
  Reconstruction rec{std::move(x), std::move(raw), {}};
  const double peak = rec.raw.empty() ? 0.0 : *std::max_element(rec.raw.begin(), rec.raw.end());
  rec.normalized.resize(rec.raw.size(), 0.0);
  if (peak > 0)
    for (std::size_t i = 0; i < rec.raw.size(); ++i) rec.normalized[i] = rec.raw[i] / peak;
  return rec;
}

GhostImage ghost_image(const GhostGeometry& geometry, const SampledObject& object,
                       const KernelProfile& profile, const QGrid& qgrid,
                       const std::vector<double>& x_r, const std::vector<double>& x_t,
                       Summation method) {
  if (geometry.reference_branch() != ReferenceBranch::Imaging)
    throw std::invalid_argument(
        "reference arm is in the Fourier configuration (f_r == d3); use ghost_diffraction");
  GhostImage result;
  result.map = g2_map(geometry, object, profile, qgrid, x_r, x_t, method);
  std::vector<double> raw(x_r.size(), 0.0);
  if (geometry.variant == Collection::ObjectPlane) {
    const double dx = x_t.size() > 1 ? uniform_spacing(x_t) : 1.0;
    for (std::size_t r = 0; r < x_r.size(); ++r)
      raw[r] = result.map.values.row(static_cast<Eigen::Index>(r)).sum() * dx;
  } else {
    std::size_t centre = 0;
    for (std::size_t c = 1; c < x_t.size(); ++c)
      if (std::abs(x_t[c]) < std::abs(x_t[centre])) centre = c;
    for (std::size_t r = 0; r < x_r.size(); ++r)
      raw[r] = result.map.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(centre));
  }
  result.image = make_reconstruction(x_r, std::move(raw));
  return result;
}

Reconstruction ghost_diffraction(const GhostGeometry& geometry, const SampledObject& object,
                                 const KernelProfile& profile, const QGrid& qgrid,
                                 const std::vector<double>& x_r) {
  if (geometry.variant != Collection::FourierLens)
    throw std::invalid_argument(
        "ghost diffraction needs Fourier-lens collection: object-plane collection carries no "
        "diffraction pattern");
  if (geometry.reference_branch() != ReferenceBranch::Fourier)
    throw std::invalid_argument("ghost diffraction needs the Fourier configuration d3 == f_r");
  const G2Map map = g2_map(geometry, object, profile, qgrid, x_r, {0.0});
  std::vector<double> raw(x_r.size());
  for (std::size_t r = 0; r < x_r.size(); ++r) raw[r] = map.values(static_cast<Eigen::Index>(r), 0);
  return make_reconstruction(x_r, std::move(raw));
}

ImagingGrids commensurate_imaging_grids(const GhostGeometry& geometry, const QGrid& qgrid,
                                        int nx) {
  if (nx < 2 || nx > qgrid.size())
    throw std::invalid_argument("nx must lie in [2, 2N+1] for commensurate grids");
  const double dx = 2 * kPi / (qgrid.size() * qgrid.dq);
  ImagingGrids g{qgrid, uniform_grid(-nx / 2, nx, dx), {}};
  const double mag = geometry.magnification();
  g.x_r.resize(g.x_t.size());
  for (std::size_t i = 0; i < g.x_t.size(); ++i) g.x_r[i] = -mag * g.x_t[g.x_t.size() - 1 - i];
  return g;
}

std::vector<double> fourier_plane_grid(const GhostGeometry& geometry, const QGrid& qgrid) {
  std::vector<double> x(static_cast<std::size_t>(qgrid.size()));
  for (int i = 0; i < qgrid.size(); ++i)
    x[static_cast<std::size_t>(i)] =
        -qgrid.q(qgrid.size() - 1 - i) * geometry.lambda * geometry.d3 / (2 * kPi);
  return x;
}

double normalized_cross_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw std::invalid_argument("profiles differ in size");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0) || !(sbb > 0)) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double fwhm(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fwhm needs >= 3 samples");
  const auto peak_it = std::max_element(y.begin(), y.end());
  const auto peak = static_cast<std::size_t>(peak_it - y.begin());
  const double half = *peak_it / 2;
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && y[lo] > half) --lo;
  while (hi + 1 < y.size() && y[hi] > half) ++hi;
  if (y[lo] > half || y[hi] > half) throw std::runtime_error("peak does not fall to half maximum");
  const auto cross = [&](std::size_t a, std::size_t b) {
    return x[a] + (half - y[a]) * (x[b] - x[a]) / (y[b] - y[a]);
  };
  return cross(hi - 1, hi) - cross(lo, lo + 1);
}

}  // namespace pdcsim::ghost
