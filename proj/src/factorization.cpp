#include "pdcsim/factorization.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "pdcsim/fock.hpp"

namespace pdcsim::ghost {

namespace {

using fock::Complex;
using fock::Ladder;
using fock::Mode;

struct Op {
  int pair;
  Ladder ladder;
};

// Pairs are independent, so an ordered product splits into per-pair ordered
// sub-products.
Complex factorized_expectation(const std::vector<fock::TwoModeFockState>& states,
                               std::span<const Op> ops) {
  Complex value{1.0, 0.0};
  for (std::size_t p = 0; p < states.size(); ++p) {
    std::vector<Ladder> sub;
    for (const auto& op : ops)
      if (op.pair == static_cast<int>(p)) sub.push_back(op.ladder);
    if (sub.empty()) continue;
    value *= states[p].expectation(sub) / states[p].trace();
    if (value == Complex(0.0, 0.0)) break;
  }
  return value;
}

}  // namespace

FactorizationReport validate_factorization(std::span<const ModeParams<double>> modes, int cutoff) {
  if (modes.empty() || modes.size() > 3)
    throw std::invalid_argument("factorization check takes 1 to 3 mode pairs");

  FactorizationReport report;
  std::vector<fock::TwoModeFockState> states;
  for (const auto& p : modes) {
    p.validate();
    const auto coeffs = fock::DisentangledCoefficients::from_coupling(p.kappa_abs, p.phi);
    states.push_back(fock::evolve_thermal_pair(p.mu_t, p.mu_r, coeffs, cutoff));
    report.max_trace_deficit = std::max(report.max_trace_deficit, std::abs(states.back().trace_deficit()));

    const Complex measured = fock::pair_amplitude(states.back());
    const double expected_abs = p.u() * p.v() * (1 + p.mu_t + p.mu_r);
    const Complex expected =
        expected_abs > 0 ? std::polar(expected_abs, std::arg(coeffs.zeta)) : Complex(0.0, 0.0);
    const double scale = std::max(expected_abs, 1.0);
    report.max_pair_amplitude_error =
        std::max(report.max_pair_amplitude_error, std::abs(measured - expected) / scale);
  }
  report.tolerance = 10.0 * std::max(report.max_trace_deficit, 1e-14);

  const int n = static_cast<int>(modes.size());
  std::vector<Complex> lhs_values, rhs_values;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const Op rd{a, {Mode::R, true}};
          const Op r{b, {Mode::R, false}};
          const Op td{c, {Mode::T, true}};
          const Op t{d, {Mode::T, false}};
          const std::array<Op, 4> four{rd, r, td, t};
          const std::array<Op, 2> normal_r{rd, r}, normal_t{td, t}, creation{rd, td},
              annihilation{r, t};
          lhs_values.push_back(factorized_expectation(states, four));
          rhs_values.push_back(factorized_expectation(states, normal_r) *
                                   factorized_expectation(states, normal_t) +
                               factorized_expectation(states, creation) *
                                   factorized_expectation(states, annihilation));
        }

  double scale = 0.0;
  for (const auto& v : lhs_values) scale = std::max(scale, std::abs(v));
  scale = std::max(scale, 1e-300);
  for (std::size_t i = 0; i < lhs_values.size(); ++i)
    report.max_relative_error =
        std::max(report.max_relative_error, std::abs(lhs_values[i] - rhs_values[i]) / scale);
  report.assignments = static_cast<int>(lhs_values.size());
  report.passed = report.max_relative_error <= report.tolerance &&
                  report.max_pair_amplitude_error <= report.tolerance;
  return report;
}

}  // namespace pdcsim::ghost
