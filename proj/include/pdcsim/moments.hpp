#pragma once

namespace pdcsim {

/// First and second photon-number moments of one (T, R) mode pair.
template <typename Scalar = double>
struct BasicMomentSet {
  Scalar mean_t{0};
  Scalar mean_r{0};
  Scalar var_t{0};
  Scalar var_r{0};
  /// ⟨Δn_T Δn_R⟩
  Scalar cross{0};
};

using MomentSet = BasicMomentSet<double>;

/// Closed-form moments of the seeded-PDC output: thermal marginals with
/// means μ + n_PDC(1 + μ_T + μ_R) and cross-covariance
/// n_PDC(1 + n_PDC)(1 + μ_T + μ_R)².
template <typename Scalar>
BasicMomentSet<Scalar> analytic_moments(Scalar mu_t, Scalar mu_r, Scalar n_pdc) {
  const Scalar s = 1 + mu_t + mu_r;
  BasicMomentSet<Scalar> m;
  m.mean_t = mu_t + n_pdc * s;
  m.mean_r = mu_r + n_pdc * s;
  m.var_t = m.mean_t * (m.mean_t + 1);
  m.var_r = m.mean_r * (m.mean_r + 1);
  m.cross = n_pdc * (1 + n_pdc) * s * s;
  return m;
}

}  // namespace pdcsim
