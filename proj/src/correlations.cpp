#include "pdcsim/correlations.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "pdcsim/io.hpp"
#include "pdcsim/parallel.hpp"

namespace pdcsim::corr {

namespace {

void check_tau(double tau) {
  if (!(tau > 0 && tau <= 1)) throw std::domain_error("transmission must lie in (0, 1]");
}

MomentSet lossy_moments(const ModeParams<double>& p, double tau) {
  p.validate();
  check_tau(tau);
  const MomentSet m = analytic_moments(p.mu_t, p.mu_r, p.n_pdc());
  MomentSet out;
  out.mean_t = tau * m.mean_t;
  out.mean_r = tau * m.mean_r;
  out.var_t = out.mean_t * (out.mean_t + 1);
  out.var_r = out.mean_r * (out.mean_r + 1);
  out.cross = tau * tau * m.cross;
  return out;
}

}  // namespace

double big_gamma(const ModeParams<double>& p, double tau) { return lossy_moments(p, tau).cross; }

std::optional<double> gamma_from_moments(const MomentSet& m) {
  const double denom = std::sqrt(m.var_t * m.var_r);
  if (!(denom > 0)) return std::nullopt;
  return m.cross / denom;
}

std::optional<double> nrf_from_moments(const MomentSet& m) {
  const double denom = m.mean_t + m.mean_r;
  if (!(denom > 0)) return std::nullopt;
  return (m.var_t + m.var_r - 2 * m.cross) / denom;
}

std::optional<double> gamma_tr(const ModeParams<double>& p, double tau) {
  return gamma_from_moments(lossy_moments(p, tau));
}

std::optional<double> nrf(const ModeParams<double>& p, double tau) {
  p.validate();
  check_tau(tau);
  const double n = p.n_pdc();
  const double s = 1 + p.mu_t + p.mu_r;
  const double denom = p.mu_t + p.mu_r + 2 * n * s;
  if (!(denom > 0)) return std::nullopt;
  const double lossless = (p.mu_t * (1 + p.mu_t) + p.mu_r * (1 + p.mu_r)) / denom;
  return tau == 1.0 ? lossless : 1 - tau + tau * lossless;
}

double nrf_threshold(double mu_t, double mu_r) {
  if (!(mu_t >= 0) || !(mu_r >= 0)) throw std::domain_error("seed means must be >= 0");
  return (mu_t * mu_t + mu_r * mu_r) / (2 * (1 + mu_t + mu_r));
}

CorrelationReport report(const ModeParams<double>& p, double tau) {
  CorrelationReport r;
  r.mu_t = p.mu_t;
  r.mu_r = p.mu_r;
  r.n_pdc = p.n_pdc();
  r.tau = tau;
  r.gamma = gamma_tr(p, tau);
  r.big_gamma = big_gamma(p, tau);
  r.nrf = nrf(p, tau);
  r.nrf_threshold_npdc = nrf_threshold(p.mu_t, p.mu_r);
  const auto verdict = check_separability_lossy(p, tau);
  r.sep_margin = verdict.margin;
  r.separable = verdict.separable;
  return r;
}

std::vector<CorrelationReport> sweep(const SweepGrid& grid, std::span<const double> taus,
                                     unsigned workers) {
  std::vector<double> tau_list(taus.begin(), taus.end());
  if (tau_list.empty()) tau_list.push_back(1.0);
  const std::size_t nt = tau_list.size();
  const std::size_t nn = grid.n_pdc.size();
  const std::size_t nr = grid.mu_r.size();
  const std::size_t count = grid.mu_t.size() * nr * nn * nt;
  std::vector<CorrelationReport> rows(count);
  parallel_for(count, workers, [&](std::size_t idx) {
    const std::size_t it = idx % nt;
    const std::size_t in = (idx / nt) % nn;
    const std::size_t ir = (idx / (nt * nn)) % nr;
    const std::size_t imt = idx / (nt * nn * nr);
    const auto p = ModeParams<double>::from_npdc(grid.mu_t[imt], grid.mu_r[ir], grid.n_pdc[in]);
    rows[idx] = report(p, tau_list[it]);
    rows[idx].n_pdc = grid.n_pdc[in];
  });
  return rows;
}

void write_csv(std::ostream& os, std::span<const CorrelationReport> rows) {
  os << "mu_t,mu_r,n_pdc,tau,gamma,nrf,margin,separable\n";
  for (const auto& r : rows) {
    os << io::format_double(r.mu_t) << ',' << io::format_double(r.mu_r) << ','
       << io::format_double(r.n_pdc) << ',' << io::format_double(r.tau) << ','
       << io::format_optional(r.gamma) << ',' << io::format_optional(r.nrf) << ','
       << io::format_double(r.sep_margin) << ',' << (r.separable ? "true" : "false") << '\n';
  }
}

}  // namespace pdcsim::corr
