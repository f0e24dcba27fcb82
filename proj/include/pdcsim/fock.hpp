// Truncated Fock-space evolution of one thermally seeded mode pair through
// the disentangled SU(1,1) form of the downconversion unitary. Serves as a
// brute-force reference for every Gaussian-level moment.
#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "pdcsim/moments.hpp"

namespace pdcsim::fock {

using Complex = std::complex<double>;

/// ζ = −i e^{−iφ} tanh|κ|, η = ln cosh|κ|.
struct DisentangledCoefficients {
  Complex zeta{0.0, 0.0};
  double eta{0.0};

  static DisentangledCoefficients from_coupling(double kappa_abs, double phi = 0.0);
};

/// Amplitude of |n−k+l, m−k+l⟩ in e^{iS}|n⟩_T|m⟩_R contributed by the
/// (k, l) term of the disentangled product.
Complex action_coefficient(int m, int n, int k, int l, const DisentangledCoefficients& coeffs);

/// Output ket of e^{iS}|n⟩_T|m⟩_R. Entry j holds the amplitude of
/// |n' , m'⟩ with n' = n − min(n,m) + j and m' = m − min(n,m) + j.
/// The series is cut once an amplitude falls below 1e−16 of the accumulated
/// norm and both output indices exceed `cutoff`.
std::vector<Complex> evolve_number_state(int n, int m, const DisentangledCoefficients& coeffs,
                                         int cutoff);

class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, double deficit)
      : std::runtime_error(what), deficit_(deficit) {}
  double deficit() const { return deficit_; }

 private:
  double deficit_;
};

enum class Mode { T, R };

struct Ladder {
  Mode mode;
  bool dagger;
};

/// Density matrix of one mode pair. The evolution conserves n_T − n_R, so
/// the matrix is stored as dense blocks, one per photon-number difference.
class TwoModeFockState {
 public:
  using Block = Eigen::MatrixXcd;

  TwoModeFockState(int cutoff, int max_difference);

  /// Largest input photon number kept per mode.
  int cutoff() const { return cutoff_; }
  /// Largest output photon number present in either mode.
  int max_photon_number() const { return max_photon_; }
  double trace_deficit() const { return trace_deficit_; }

  /// ρ(⟨n_T, n_R| , |n_T', n_R'⟩); zero across sectors or out of range.
  Complex element(int nt, int nr, int nt2, int nr2) const;

  /// Joint photon-number distribution P(n_T, n_R).
  Eigen::MatrixXd joint_distribution() const;
  /// Full (max+1)² square matrix indexed by n_T·(max+1) + n_R.
  Eigen::MatrixXcd dense() const;

  double trace() const;
  double hermiticity_error() const;
  /// Smallest eigenvalue over all sector blocks.
  double min_eigenvalue() const;

  /// Tr(ρ O) for O = ops[0] ops[1] … ops[k−1] (rightmost acts first).
  Complex expectation(std::span<const Ladder> ops) const;

  int max_difference() const { return max_difference_; }
  const Block& sector(int difference) const;

 private:
  friend TwoModeFockState evolve_thermal_pair(double, double, const DisentangledCoefficients&,
                                              int, double);
  Block& sector_mut(int difference);
  bool locate(int nt, int nr, int& difference, int& index) const;

  int cutoff_;
  int max_difference_;
  int max_photon_{0};
  double trace_deficit_{0.0};
  std::vector<Block> sectors_;
};

/// Default truncation budget on the trace.
inline constexpr double kDefaultTruncation = 1e-9;

/// ceil(12(1 + μ_max)), raised until each thermal input tail beyond the cutoff
/// is below eps/20.
int default_cutoff(double mu_t, double mu_r, double eps = kDefaultTruncation);

/// ρ_out = Σ_{n,m ≤ cutoff} P_T(n) P_R(m) e^{iS}|n,m⟩⟨n,m|e^{−iS}.
/// Throws TruncationError if the input tails exceed eps/10 or the final trace
/// deficit exceeds eps.
TwoModeFockState evolve_thermal_pair(double mu_t, double mu_r,
                                     const DisentangledCoefficients& coeffs, int cutoff,
                                     double eps = kDefaultTruncation);

MomentSet moments(const TwoModeFockState& state);

/// ⟨a_T a_R⟩
Complex pair_amplitude(const TwoModeFockState& state);

/// CSV dump of P(n_T, n_R): header `n_t,n_r,probability`.
void write_joint_distribution_csv(const TwoModeFockState& state, std::ostream& os);

}  // namespace pdcsim::fock
