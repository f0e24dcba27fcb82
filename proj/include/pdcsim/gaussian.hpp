// Two-mode Gaussian description of one (T,q)-(R,-q) mode pair produced by
// thermally seeded parametric downconversion: covariance construction,
// loss channel, partial transposition and the PPT separability test.
//
// Quadrature ordering is (X_T, Y_T, X_R, Y_R) with X = (a + a^†)/√2 and
// Y = (a − a^†)/(i√2); the vacuum covariance is identity/2.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "pdcsim/moments.hpp"

namespace pdcsim {

namespace tolerance {
/// Absolute tolerance on symplectic eigenvalues (physicality, PPT).
inline constexpr double kSymplectic = 1e-9;
/// Relative tolerance on covariance symmetry.
inline constexpr double kSymmetry = 1e-12;
/// |margin| below this is reported as a boundary point.
inline constexpr double kBoundaryBand = 1e-6;
}  // namespace tolerance

/// Per-mode physical inputs. The coupling is |κ_q|; the downconversion
/// photon number n_PDC = sinh²|κ_q| is derived.
template <typename Scalar = double>
struct ModeParams {
  Scalar mu_t{0};
  Scalar mu_r{0};
  Scalar kappa_abs{0};
  Scalar phi{0};

  static ModeParams from_npdc(Scalar mu_t, Scalar mu_r, Scalar n_pdc, Scalar phi = 0) {
    if (!(n_pdc >= 0)) throw std::domain_error("n_pdc must be >= 0");
    return ModeParams{mu_t, mu_r, std::asinh(std::sqrt(n_pdc)), phi};
  }

  Scalar n_pdc() const {
    const Scalar s = std::sinh(kappa_abs);
    return s * s;
  }
  Scalar u() const { return std::cosh(kappa_abs); }
  Scalar v() const { return std::sinh(kappa_abs); }

  void validate() const {
    if (!(mu_t >= 0)) throw std::domain_error("mu_t must be >= 0");
    if (!(mu_r >= 0)) throw std::domain_error("mu_r must be >= 0");
    if (!(kappa_abs >= 0)) throw std::domain_error("kappa_abs must be >= 0");
    if (!std::isfinite(mu_t) || !std::isfinite(mu_r) || !std::isfinite(kappa_abs) ||
        !std::isfinite(phi))
      throw std::domain_error("mode parameters must be finite");
  }

  /// Closed-form PPT margin μ_T μ_R − n_PDC(1 + μ_T + μ_R).
  Scalar separability_margin() const {
    return mu_t * mu_r - n_pdc() * (1 + mu_t + mu_r);
  }

  ModeParams swapped() const { return ModeParams{mu_r, mu_t, kappa_abs, phi}; }
};

/// n_PDC at which the closed-form margin vanishes: μ_T μ_R/(1 + μ_T + μ_R).
template <typename Scalar>
Scalar separability_threshold(Scalar mu_t, Scalar mu_r) {
  return mu_t * mu_r / (1 + mu_t + mu_r);
}

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

/// Ω = ω ⊕ ω, ω = [[0, 1], [−1, 0]].
template <typename Scalar = double>
Matrix4<Scalar> symplectic_form() {
  Matrix4<Scalar> omega = Matrix4<Scalar>::Zero();
  omega(0, 1) = 1;
  omega(1, 0) = -1;
  omega(2, 3) = 1;
  omega(3, 2) = -1;
  return omega;
}

/// Real symmetric 4×4 covariance of one mode pair.
template <typename Scalar = double>
class CovarianceBlock {
 public:
  using Matrix = Matrix4<Scalar>;

  CovarianceBlock() : m_(Matrix::Identity() / Scalar(2)) {}

  explicit CovarianceBlock(const Matrix& m) : m_(m) {
    const Scalar scale = std::max<Scalar>(Scalar(1), m.cwiseAbs().maxCoeff());
    const Scalar asym = (m - m.transpose()).cwiseAbs().maxCoeff();
    if (!(asym <= Scalar(tolerance::kSymmetry) * scale))
      throw std::domain_error("covariance block is not symmetric");
  }

  static CovarianceBlock vacuum() { return CovarianceBlock(); }

  const Matrix& matrix() const { return m_; }
  Scalar operator()(int i, int j) const { return m_(i, j); }

  bool operator==(const CovarianceBlock& other) const { return m_ == other.m_; }

 private:
  Matrix m_;
};

/// Covariance of the pair in the φ_q = 0 gauge:
/// diag(A, A, B, B) with C at (X_T, X_R) and −C at (Y_T, Y_R).
template <typename Scalar>
CovarianceBlock<Scalar> build_covariance(const ModeParams<Scalar>& p) {
  p.validate();
  const Scalar u2 = p.u() * p.u();
  const Scalar v2 = p.n_pdc();
  const Scalar a = (u2 * (2 * p.mu_t + 1) + v2 * (2 * p.mu_r + 1)) / 2;
  const Scalar b = (u2 * (2 * p.mu_r + 1) + v2 * (2 * p.mu_t + 1)) / 2;
  const Scalar c = p.u() * p.v() * (p.mu_t + p.mu_r + 1);

  Matrix4<Scalar> m = Matrix4<Scalar>::Zero();
  m(0, 0) = m(1, 1) = a;
  m(2, 2) = m(3, 3) = b;
  m(0, 2) = m(2, 0) = c;
  m(1, 3) = m(3, 1) = -c;
  return CovarianceBlock<Scalar>(m);
}

/// Uniform transmission τ on both arms: V_τ = τV + (1 − τ)·identity/2.
template <typename Scalar>
CovarianceBlock<Scalar> apply_loss(const CovarianceBlock<Scalar>& v, Scalar tau) {
  if (!(tau > 0 && tau <= 1)) throw std::domain_error("transmission must lie in (0, 1]");
  const Matrix4<Scalar> m = tau * v.matrix() + (1 - tau) / Scalar(2) * Matrix4<Scalar>::Identity();
  return CovarianceBlock<Scalar>(m);
}

/// Transposition of the R mode: Y_R → −Y_R.
template <typename Scalar>
CovarianceBlock<Scalar> partial_transpose(const CovarianceBlock<Scalar>& v) {
  Matrix4<Scalar> m = v.matrix();
  m.row(3) *= -1;
  m.col(3) *= -1;
  return CovarianceBlock<Scalar>(m);
}

/// Rotates the R-mode phase space by θ (a_R → e^{iθ} a_R), which turns the
/// φ = 0 gauge covariance into one whose pair amplitude ⟨a_T a_R⟩ carries
/// phase θ.
template <typename Scalar>
CovarianceBlock<Scalar> rotate_reference_phase(const CovarianceBlock<Scalar>& v, Scalar theta) {
  Matrix4<Scalar> s = Matrix4<Scalar>::Identity();
  const Scalar c = std::cos(theta);
  const Scalar sn = std::sin(theta);
  s(2, 2) = c;
  s(2, 3) = -sn;
  s(3, 2) = sn;
  s(3, 3) = c;
  Matrix4<Scalar> m = s * v.matrix() * s.transpose();
  m = (m + m.transpose()) / Scalar(2);
  return CovarianceBlock<Scalar>(m);
}

/// Symplectic spectrum (ν₁ ≤ ν₂) from the moduli of the eigenvalues ±iν of
/// Ω·V, computed with a general dense eigensolver.
template <typename Scalar>
std::array<Scalar, 2> symplectic_eigenvalues(const CovarianceBlock<Scalar>& v) {
  const Matrix4<Scalar> ov = symplectic_form<Scalar>() * v.matrix();
  Eigen::EigenSolver<Matrix4<Scalar>> solver(ov, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed on Omega*V");
  std::array<Scalar, 4> mods{};
  for (int i = 0; i < 4; ++i) mods[i] = std::abs(solver.eigenvalues()[i]);
  std::sort(mods.begin(), mods.end());
  return {(mods[0] + mods[1]) / 2, (mods[2] + mods[3]) / 2};
}

template <typename Scalar = double>
struct SeparabilityVerdict {
  bool separable{false};
  Scalar margin{0};
  Scalar min_pt_symplectic_eigenvalue{0};
  /// |margin| within the boundary band; classified by sign regardless.
  bool boundary{false};

  /// Verdict implied by the spectral route alone.
  bool spectral_separable() const {
    return min_pt_symplectic_eigenvalue >= Scalar(0.5) - Scalar(tolerance::kSymplectic);
  }
  bool routes_agree() const { return boundary || spectral_separable() == separable; }

  bool operator==(const SeparabilityVerdict&) const = default;
};

namespace detail {
template <typename Scalar>
SeparabilityVerdict<Scalar> make_verdict(const CovarianceBlock<Scalar>& v, Scalar margin) {
  SeparabilityVerdict<Scalar> out;
  out.margin = margin;
  out.separable = margin >= 0;
  out.boundary = std::abs(margin) <= Scalar(tolerance::kBoundaryBand);
  out.min_pt_symplectic_eigenvalue = symplectic_eigenvalues(partial_transpose(v))[0];
  return out;
}
}  // namespace detail

template <typename Scalar>
SeparabilityVerdict<Scalar> check_separability(const ModeParams<Scalar>& p) {
  return detail::make_verdict(build_covariance(p), p.separability_margin());
}

/// PPT test after the loss channel. The closed-form margin scales as τ², so
/// the verdict is the lossless one for every τ in (0, 1].
template <typename Scalar>
SeparabilityVerdict<Scalar> check_separability_lossy(const ModeParams<Scalar>& p, Scalar tau) {
  const auto v = apply_loss(build_covariance(p), tau);
  return detail::make_verdict(v, tau * tau * p.separability_margin());
}

/// Photon-number statistics of a zero-mean two-mode Gaussian state.
template <typename Scalar>
BasicMomentSet<Scalar> photon_statistics(const CovarianceBlock<Scalar>& cov) {
  const auto& v = cov.matrix();
  BasicMomentSet<Scalar> out;
  out.mean_t = (v(0, 0) + v(1, 1) - 1) / 2;
  out.mean_r = (v(2, 2) + v(3, 3) - 1) / 2;
  out.var_t = (v(0, 0) * v(0, 0) + v(1, 1) * v(1, 1) + 2 * v(0, 1) * v(0, 1)) / 2 - Scalar(0.25);
  out.var_r = (v(2, 2) * v(2, 2) + v(3, 3) * v(3, 3) + 2 * v(2, 3) * v(2, 3)) / 2 - Scalar(0.25);
  out.cross = (v(0, 2) * v(0, 2) + v(0, 3) * v(0, 3) + v(1, 2) * v(1, 2) + v(1, 3) * v(1, 3)) / 2;
  return out;
}

/// ⟨a_T a_R⟩ read off the covariance.
template <typename Scalar>
std::complex<Scalar> pair_amplitude(const CovarianceBlock<Scalar>& cov) {
  const auto& v = cov.matrix();
  return {(v(0, 2) - v(1, 3)) / 2, (v(0, 3) + v(1, 2)) / 2};
}

}  // namespace pdcsim
