// Numerical check, on the Fock reference, that the pair field's fourth-order
// moments factorize into normal and anomalous second-order moments:
//   ⟨b_R^† b_R' b_T^† b_T'⟩ = ⟨b_R^† b_R'⟩⟨b_T^† b_T'⟩ + ⟨b_R^† b_T^†⟩⟨b_R' b_T'⟩
// for every assignment of the four operators to the sampled q-modes.
#pragma once

#include <span>
#include <vector>

#include "pdcsim/gaussian.hpp"

namespace pdcsim::ghost {

struct FactorizationReport {
  /// Largest |lhs − rhs| over all operator assignments, relative to the
  /// largest |lhs|.
  double max_relative_error{0};
  /// Largest relative deviation of |⟨b_R b_T⟩| from u v (1 + μ_T + μ_R), and
  /// of its phase from the disentangling convention.
  double max_pair_amplitude_error{0};
  double max_trace_deficit{0};
  double tolerance{0};
  int assignments{0};
  bool passed{false};
};

/// Each entry of `modes` is one (T, q)-(R, −q) pair; 1 to 3 pairs.
/// Tolerance is 10·max(trace deficit, 1e−14) (see README).
FactorizationReport validate_factorization(std::span<const ModeParams<double>> modes, int cutoff);

}  // namespace pdcsim::ghost
