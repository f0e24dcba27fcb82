// Closed-form intensity-correlation diagnostics of one mode pair: the
// cross-covariance Γ, the normalized index γ and the noise reduction factor.
//
// A transmission τ acts as binomial loss on both arms: means scale by τ,
// Γ by τ², and each marginal stays thermal. τ = 1 is the lossless case.
#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "pdcsim/gaussian.hpp"

namespace pdcsim::corr {

struct CorrelationReport {
  double mu_t{0};
  double mu_r{0};
  double n_pdc{0};
  double tau{1};
  std::optional<double> gamma;  // empty: 0/0 vacuum point
  double big_gamma{0};
  std::optional<double> nrf;  // empty: zero mean photon number
  double nrf_threshold_npdc{0};
  double sep_margin{0};
  bool separable{false};

  bool operator==(const CorrelationReport&) const = default;
};

/// Γ_{T,R} = n_PDC(1 + n_PDC)(1 + μ_T + μ_R)² (times τ²).
double big_gamma(const ModeParams<double>& p, double tau = 1.0);

/// γ = Γ/(σ_T σ_R); empty when every mean photon number vanishes.
std::optional<double> gamma_tr(const ModeParams<double>& p, double tau = 1.0);

/// [⟨Δn_T²⟩ + ⟨Δn_R²⟩ − 2Γ]/(⟨n_T⟩ + ⟨n_R⟩); empty for a zero denominator.
std::optional<double> nrf(const ModeParams<double>& p, double tau = 1.0);

/// n_PDC above which NRF < 1: (μ_T² + μ_R²)/(2(1 + μ_T + μ_R)).
double nrf_threshold(double mu_t, double mu_r);

/// γ and NRF from an arbitrary moment set (used for cross-checks against the
/// covariance and Fock routes).
std::optional<double> gamma_from_moments(const MomentSet& m);
std::optional<double> nrf_from_moments(const MomentSet& m);

CorrelationReport report(const ModeParams<double>& p, double tau = 1.0);

struct SweepGrid {
  std::vector<double> mu_t;
  std::vector<double> mu_r;
  std::vector<double> n_pdc;
};

/// Rows ordered μ_T, μ_R, n_PDC, τ (τ fastest).
std::vector<CorrelationReport> sweep(const SweepGrid& grid, std::span<const double> taus,
                                     unsigned workers = 1);

/// Header `mu_t,mu_r,n_pdc,tau,gamma,nrf,margin,separable`.
void write_csv(std::ostream& os, std::span<const CorrelationReport> rows);

}  // namespace pdcsim::corr
