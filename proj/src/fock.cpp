#include "pdcsim/fock.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pdcsim/io.hpp"

namespace pdcsim::fock {

namespace {

class LogFactorial {
 public:
  double operator()(int n) {
    if (n < 0) throw std::domain_error("negative factorial argument");
    while (static_cast<int>(table_.size()) <= n)
      table_.push_back(std::lgamma(static_cast<double>(table_.size()) + 1.0));
    return table_[static_cast<std::size_t>(n)];
  }

 private:
  std::vector<double> table_;
};

// Log-space evaluation of C(m, n, k, l).
struct CoefficientTerms {
  double log_abs_zeta;
  double arg_zeta;
  double arg_minus_conj_zeta;
  bool zeta_zero;
  double eta;

  explicit CoefficientTerms(const DisentangledCoefficients& c)
      : log_abs_zeta(std::abs(c.zeta) > 0 ? std::log(std::abs(c.zeta)) : 0.0),
        arg_zeta(std::arg(c.zeta)),
        arg_minus_conj_zeta(std::arg(-std::conj(c.zeta))),
        zeta_zero(std::abs(c.zeta) == 0.0),
        eta(c.eta) {}

  template <typename LogFact>
  Complex evaluate(int m, int n, int k, int l, LogFact& lf) const {
    if (zeta_zero && (k > 0 || l > 0)) return {0.0, 0.0};
    const double log_ratio = 0.5 * (lf(n) + lf(m) + lf(n - k + l) + lf(m - k + l)) - lf(k) -
                             lf(l) - lf(n - k) - lf(m - k);
    const double log_mag =
        -eta * (n + m - 2 * k + 1) + log_ratio + (zeta_zero ? 0.0 : (k + l) * log_abs_zeta);
    const double phase = l * arg_zeta + k * arg_minus_conj_zeta;
    return std::polar(std::exp(log_mag), phase);
  }
};

struct StdLogFactorial {
  double operator()(int n) const { return std::lgamma(static_cast<double>(n) + 1.0); }
};

double thermal_weight(double mu, int n) {
  if (mu == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(n * std::log(mu) - (n + 1) * std::log1p(mu));
}

double thermal_tail(double mu, int cutoff) {
  if (mu == 0.0) return 0.0;
  return std::exp((cutoff + 1) * (std::log(mu) - std::log1p(mu)));
}

// Sum over k of C(m, n, k, k + j). At fixed j every term shares the phase
// e^{i j arg ζ} up to a sign (−1)^k, and successive magnitudes obey
//   |C_{k+1}|/|C_k| = sinh²|κ| (n − k)(m − k)/((k + 1)(k + j + 1)).
// The alternating sum is redone in quad precision when it cancels by more
// than three orders of magnitude.
template <typename Real>
Real alternating_sum(double first, int k_first, int k_last, int n, int m, int j, double sinh2,
                     Real& abs_sum) {
  Real term = first;
  Real sum = 0;
  abs_sum = 0;
  const Real ratio_scale = sinh2;
  for (int k = k_first; k <= k_last; ++k) {
    sum += (k % 2 == 0) ? term : -term;
    abs_sum += term;
    term *= ratio_scale * Real(n - k) * Real(m - k) / (Real(k + 1) * Real(k + j + 1));
  }
  return sum;
}

// `floor`: stop the series once |a_j|² falls below it past the cutoff, in
// addition to the relative test.
std::vector<Complex> evolve_ket(int n, int m, const CoefficientTerms& terms, int cutoff,
                                LogFactorial& lf, double floor = 0.0) {
  const int lo = std::min(n, m);
  std::vector<Complex> ket;
  double norm = 0.0;
  const double sinh2 = terms.zeta_zero ? 0.0 : std::exp(2 * terms.eta + 2 * terms.log_abs_zeta);
  // j = l − k, starting at −min(n, m); guard against runaway series.
  const int j_max = cutoff + 4000;
  for (int j = -lo; j <= j_max; ++j) {
    const int k_first = std::max(0, -j);
    const Complex lead = terms.evaluate(m, n, k_first, k_first + j, lf);
    double amp_abs = 0.0;
    if (lead != Complex(0.0, 0.0)) {
      const double first = std::abs(lead);
      double abs_sum = 0.0;
      double sum = alternating_sum<double>(first, k_first, lo, n, m, j, sinh2, abs_sum);
      if (abs_sum > 1e3 * std::abs(sum)) {
        long double abs_sum_l = 0;
        const long double sum_l =
            alternating_sum<long double>(first, k_first, lo, n, m, j, sinh2, abs_sum_l);
        sum = static_cast<double>(sum_l);
      }
      if (abs_sum > 1e6 * std::abs(sum)) {
        __float128 abs_sum_q = 0;
        sum = static_cast<double>(
            alternating_sum<__float128>(first, k_first, lo, n, m, j, sinh2, abs_sum_q));
      }
      amp_abs = sum;
    }
    const Complex amp = amp_abs * std::polar(1.0, j * terms.arg_zeta);
    const double mag2 = std::norm(amp);
    ket.push_back(amp);
    norm += mag2;
    const bool beyond_cutoff = lo + j > cutoff;
    if (beyond_cutoff && (mag2 <= 1e-16 * norm || mag2 < floor)) break;
  }
  return ket;
}

}  // namespace

DisentangledCoefficients DisentangledCoefficients::from_coupling(double kappa_abs, double phi) {
  if (!(kappa_abs >= 0) || !std::isfinite(kappa_abs))
    throw std::domain_error("coupling |kappa| must be finite and >= 0");
  DisentangledCoefficients c;
  c.zeta = Complex(0.0, -1.0) * std::polar(1.0, -phi) * std::tanh(kappa_abs);
  c.eta = std::log(std::cosh(kappa_abs));
  if (!(std::abs(c.zeta) < 1.0)) throw std::domain_error("coupling too large: |zeta| == 1");
  return c;
}

Complex action_coefficient(int m, int n, int k, int l, const DisentangledCoefficients& coeffs) {
  if (m < 0 || n < 0 || k < 0 || l < 0) throw std::domain_error("photon indices must be >= 0");
  if (k > std::min(m, n)) throw std::domain_error("k must not exceed min(m, n)");
  StdLogFactorial lf;
  return CoefficientTerms(coeffs).evaluate(m, n, k, l, lf);
}

std::vector<Complex> evolve_number_state(int n, int m, const DisentangledCoefficients& coeffs,
                                         int cutoff) {
  if (n < 0 || m < 0) throw std::domain_error("photon numbers must be >= 0");
  LogFactorial lf;
  return evolve_ket(n, m, CoefficientTerms(coeffs), cutoff, lf);
}

TwoModeFockState::TwoModeFockState(int cutoff, int max_difference)
    : cutoff_(cutoff),
      max_difference_(max_difference),
      sectors_(static_cast<std::size_t>(2 * max_difference + 1)) {}

const TwoModeFockState::Block& TwoModeFockState::sector(int difference) const {
  if (std::abs(difference) > max_difference_) throw std::out_of_range("sector out of range");
  return sectors_[static_cast<std::size_t>(difference + max_difference_)];
}

TwoModeFockState::Block& TwoModeFockState::sector_mut(int difference) {
  return sectors_[static_cast<std::size_t>(difference + max_difference_)];
}

bool TwoModeFockState::locate(int nt, int nr, int& difference, int& index) const {
  if (nt < 0 || nr < 0) return false;
  difference = nt - nr;
  if (std::abs(difference) > max_difference_) return false;
  index = std::min(nt, nr);
  return index < sector(difference).rows();
}

Complex TwoModeFockState::element(int nt, int nr, int nt2, int nr2) const {
  int d1 = 0, i1 = 0, d2 = 0, i2 = 0;
  if (!locate(nt, nr, d1, i1) || !locate(nt2, nr2, d2, i2) || d1 != d2) return {0.0, 0.0};
  return sector(d1)(i1, i2);
}

Eigen::MatrixXd TwoModeFockState::joint_distribution() const {
  const int dim = max_photon_ + 1;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  for (int d = -max_difference_; d <= max_difference_; ++d) {
    const Block& b = sector(d);
    for (int i = 0; i < b.rows(); ++i) {
      const int nt = i + std::max(d, 0);
      const int nr = i + std::max(-d, 0);
      p(nt, nr) = b(i, i).real();
    }
  }
  return p;
}

Eigen::MatrixXcd TwoModeFockState::dense() const {
  const int dim = max_photon_ + 1;
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
  for (int d = -max_difference_; d <= max_difference_; ++d) {
    const Block& b = sector(d);
    for (int i = 0; i < b.rows(); ++i)
      for (int j = 0; j < b.cols(); ++j) {
        const int row = (i + std::max(d, 0)) * dim + (i + std::max(-d, 0));
        const int col = (j + std::max(d, 0)) * dim + (j + std::max(-d, 0));
        rho(row, col) = b(i, j);
      }
  }
  return rho;
}

double TwoModeFockState::trace() const {
  double t = 0.0;
  for (const Block& b : sectors_) t += b.trace().real();
  return t;
}

double TwoModeFockState::hermiticity_error() const {
  double err = 0.0;
  for (const Block& b : sectors_)
    if (b.size() > 0) err = std::max(err, (b - b.adjoint()).cwiseAbs().maxCoeff());
  return err;
}

double TwoModeFockState::min_eigenvalue() const {
  double lowest = 0.0;
  bool first = true;
  for (const Block& b : sectors_) {
    if (b.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Block> solver(b, Eigen::EigenvaluesOnly);
    const double e = solver.eigenvalues().minCoeff();
    lowest = first ? e : std::min(lowest, e);
    first = false;
  }
  return lowest;
}

Complex TwoModeFockState::expectation(std::span<const Ladder> ops) const {
  Complex total{0.0, 0.0};
  for (int d = -max_difference_; d <= max_difference_; ++d) {
    const Block& b = sector(d);
    for (int i = 0; i < b.rows(); ++i) {
      const int nt0 = i + std::max(d, 0);
      const int nr0 = i + std::max(-d, 0);
      int nt = nt0, nr = nr0;
      double coef = 1.0;
      for (auto it = ops.rbegin(); it != ops.rend() && coef != 0.0; ++it) {
        int& n = it->mode == Mode::T ? nt : nr;
        if (it->dagger) {
          ++n;
          coef *= std::sqrt(static_cast<double>(n));
        } else {
          coef *= std::sqrt(static_cast<double>(n));
          --n;
        }
      }
      if (coef == 0.0) continue;
      total += coef * element(nt0, nr0, nt, nr);
    }
  }
  return total;
}

int default_cutoff(double mu_t, double mu_r, double eps) {
  const double mu = std::max(mu_t, mu_r);
  int cutoff = static_cast<int>(std::ceil(12.0 * (1.0 + mu)));
  while (std::max(thermal_tail(mu_t, cutoff), thermal_tail(mu_r, cutoff)) >= eps / 20.0)
    ++cutoff;
  return cutoff;
}

TwoModeFockState evolve_thermal_pair(double mu_t, double mu_r,
                                     const DisentangledCoefficients& coeffs, int cutoff,
                                     double eps) {
  if (!(mu_t >= 0) || !(mu_r >= 0)) throw std::domain_error("seed means must be >= 0");
  if (cutoff < 0) throw std::domain_error("cutoff must be >= 0");
  const double input_tail = thermal_tail(mu_t, cutoff) + thermal_tail(mu_r, cutoff);
  if (input_tail >= eps / 10.0)
    throw TruncationError("cutoff " + std::to_string(cutoff) +
                              " too small: thermal input tail " + std::to_string(input_tail),
                          input_tail);

  const CoefficientTerms terms(coeffs);
  LogFactorial lf;
  const double negligible = 1e-15 * eps;

  struct Contribution {
    int n, m;
    double weight;
    std::vector<Complex> ket;
  };
  std::vector<Contribution> parts;
  parts.reserve(static_cast<std::size_t>((cutoff + 1) * (cutoff + 1)));
  std::vector<int> sector_size(static_cast<std::size_t>(2 * cutoff + 1), 0);

  for (int n = 0; n <= cutoff; ++n) {
    const double pt = thermal_weight(mu_t, n);
    if (pt == 0.0) continue;
    for (int m = 0; m <= cutoff; ++m) {
      const double pr = thermal_weight(mu_r, m);
      const double weight = pt * pr;
      // Negligible inputs are dropped; their weight shows up in the deficit.
      if (weight < negligible) continue;
      auto ket = evolve_ket(n, m, terms, cutoff, lf, negligible / weight);
      auto& size = sector_size[static_cast<std::size_t>(n - m + cutoff)];
      size = std::max(size, static_cast<int>(ket.size()));
      parts.push_back({n, m, weight, std::move(ket)});
    }
  }

  TwoModeFockState state(cutoff, cutoff);
  for (int d = -cutoff; d <= cutoff; ++d) {
    const int size = sector_size[static_cast<std::size_t>(d + cutoff)];
    state.sector_mut(d) = TwoModeFockState::Block::Zero(size, size);
    if (size > 0) state.max_photon_ = std::max(state.max_photon_, size - 1 + std::abs(d));
  }
  for (const auto& part : parts) {
    const Eigen::Map<const Eigen::VectorXcd> psi(part.ket.data(),
                                                 static_cast<Eigen::Index>(part.ket.size()));
    const auto len = psi.size();
    state.sector_mut(part.n - part.m).topLeftCorner(len, len).noalias() +=
        part.weight * psi * psi.adjoint();
  }

  state.trace_deficit_ = 1.0 - state.trace();
  if (state.trace_deficit_ > eps)
    throw TruncationError("trace deficit " + std::to_string(state.trace_deficit_) +
                              " exceeds truncation budget",
                          state.trace_deficit_);
  return state;
}

MomentSet moments(const TwoModeFockState& state) {
  const Eigen::MatrixXd p = state.joint_distribution();
  const double total = p.sum();
  double mt = 0, mr = 0, mtt = 0, mrr = 0, mtr = 0;
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) {
      const double w = p(i, j);
      if (w == 0.0) continue;
      mt += i * w;
      mr += j * w;
      mtt += static_cast<double>(i) * i * w;
      mrr += static_cast<double>(j) * j * w;
      mtr += static_cast<double>(i) * j * w;
    }
  mt /= total;
  mr /= total;
  MomentSet out;
  out.mean_t = mt;
  out.mean_r = mr;
  out.var_t = mtt / total - mt * mt;
  out.var_r = mrr / total - mr * mr;
  out.cross = mtr / total - mt * mr;
  return out;
}

Complex pair_amplitude(const TwoModeFockState& state) {
  const Ladder ops[] = {{Mode::T, false}, {Mode::R, false}};
  return state.expectation(ops) / state.trace();
}

void write_joint_distribution_csv(const TwoModeFockState& state, std::ostream& os) {
  const Eigen::MatrixXd p = state.joint_distribution();
  os << "n_t,n_r,probability\n";
  for (int i = 0; i < p.rows(); ++i)
    for (int j = 0; j < p.cols(); ++j) {
      if (p(i, j) == 0.0) continue;
      os << i << ',' << j << ',' << io::format_double(p(i, j)) << '\n';
    }
}

}  // namespace pdcsim::fock
