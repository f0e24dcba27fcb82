#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pdcsim/correlations.hpp"
#include "pdcsim/fock.hpp"

using namespace pdcsim;

namespace {

ModeParams<double> P(double mt, double mr, double n) { return ModeParams<double>::from_npdc(mt, mr, n); }

// Large-n_PDC corrections 1 − γ (reference formulas, test-only).
double correction_general(double mt, double mr, double n) {
  const double s = 1 + mt + mr;
  return 0.5 * (mt + mr + 2 * mt * mr) / (s * s) / (n * n);
}
double correction_one_arm(double mu, double n) { return 1.0 / ((1 + n) * n) / (2 * mu); }
double correction_equal(double n) { return 1.0 / ((1 + 2 * n) * (1 + 2 * n)); }

// NRF straight from its definition.
double nrf_definition(const MomentSet& m) {
  return (m.var_t + m.var_r - 2 * m.cross) / (m.mean_t + m.mean_r);
}

}  // namespace

TEST_CASE("gamma examples") {
  CHECK(*corr::gamma_tr(P(0, 0, 0.7)) == doctest::Approx(1.0));
  CHECK(*corr::gamma_tr(P(0, 0, 3.0)) == doctest::Approx(1.0));
  CHECK(*corr::gamma_tr(P(1, 1, 1)) == doctest::Approx(0.9));
  CHECK(corr::big_gamma(P(1, 1, 1)) == doctest::Approx(18.0));
  CHECK_FALSE(corr::gamma_tr(P(0, 0, 0)).has_value());
  CHECK(*corr::gamma_tr(P(2, 1, 0)) == 0.0);
}

TEST_CASE("gamma approaches one at large n_pdc") {
  SUBCASE("general expansion") {
    const double n = 100;
    const double corr = 1 - *corr::gamma_tr(P(1, 1, n));
    CHECK(std::abs(corr / correction_general(1, 1, n) - 1) < 0.01);
  }
  SUBCASE("one-arm seed, large mean") {
    const double n = 100, mu = 1000;
    const double corr = 1 - *corr::gamma_tr(P(mu, 0, n));
    CHECK(std::abs(corr / correction_one_arm(mu, n) - 1) < 0.01);
    CHECK(std::abs((1 - *corr::gamma_tr(P(0, mu, n))) / correction_one_arm(mu, n) - 1) < 0.01);
  }
  SUBCASE("equal seeds, large mean") {
    const double n = 100, mu = 1000;
    const double corr = 1 - *corr::gamma_tr(P(mu, mu, n));
    CHECK(std::abs(corr / correction_equal(n) - 1) < 0.01);
  }
}

TEST_CASE("nrf examples") {
  CHECK(*corr::nrf(P(0, 0, 1)) == doctest::Approx(0.0));
  CHECK(*corr::nrf(P(1, 1, 0)) == doctest::Approx(2.0));
  CHECK(*corr::nrf(P(1, 1, 1.0 / 3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_FALSE(corr::nrf(P(0, 0, 0)).has_value());
}

TEST_CASE("nrf thresholds") {
  CHECK(corr::nrf_threshold(0, 0) == 0.0);
  CHECK(corr::nrf_threshold(1, 1) == doctest::Approx(1.0 / 3));
  CHECK(corr::nrf_threshold(2, 0) == doctest::Approx(2.0 / 3));
  CHECK(corr::nrf_threshold(2, 0) > separability_threshold(2.0, 0.0));
  for (double mu : {0.1, 1.0, 4.0, 30.0})
    CHECK(std::abs(corr::nrf_threshold(mu, mu) - separability_threshold(mu, mu)) < 1e-12);
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double mt = u(rng), mr = u(rng), n = u(rng);
    const double th = corr::nrf_threshold(mt, mr);
    if (std::abs(n - th) < 1e-9) continue;
    CHECK((*corr::nrf(P(mt, mr, n)) < 1.0) == (n > th));
  }
}

TEST_CASE("closed-form nrf matches its definition") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const auto p = P(u(rng), u(rng), u(rng));
    CHECK(*corr::nrf(p) ==
          doctest::Approx(nrf_definition(analytic_moments(p.mu_t, p.mu_r, p.n_pdc()))).epsilon(1e-12));
    CHECK(*corr::nrf_from_moments(analytic_moments(p.mu_t, p.mu_r, p.n_pdc())) ==
          doctest::Approx(*corr::nrf(p)).epsilon(1e-12));
  }
}

TEST_CASE("sub-shot-noise implies entanglement") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  int sub_shot = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto r = corr::report(P(u(rng), u(rng), u(rng)));
    if (r.nrf && *r.nrf < 1.0) {
      ++sub_shot;
      CHECK(r.sep_margin < 0);
      CHECK_FALSE(r.separable);
    }
  }
  CHECK(sub_shot > 100);
}

TEST_CASE("gamma in [0, 1] and symmetric under seed exchange") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double mt = u(rng), mr = u(rng), n = u(rng);
    const double g = *corr::gamma_tr(P(mt, mr, n));
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 + 1e-15);
    CHECK(g == doctest::Approx(*corr::gamma_tr(P(mr, mt, n))).epsilon(1e-13));
    CHECK(*corr::nrf(P(mt, mr, n)) == doctest::Approx(*corr::nrf(P(mr, mt, n))).epsilon(1e-13));
  }
}

TEST_CASE("monotonic in n_pdc") {
  for (auto [mt, mr] : {std::pair{0.0, 2.0}, {1.0, 1.0}, {5.0, 0.5}}) {
    double prev_g = -1, prev_nrf = 1e300;
    for (int i = 0; i <= 400; ++i) {
      const double n = 0.01 * std::pow(1000.0, i / 400.0);
      const double g = *corr::gamma_tr(P(mt, mr, n));
      const double f = *corr::nrf(P(mt, mr, n));
      CHECK(g > prev_g);
      CHECK(f < prev_nrf);
      prev_g = g;
      prev_nrf = f;
    }
  }
}

TEST_CASE("lossy correlations") {
  const auto p = P(1, 0.5, 0.8);
  const auto m = analytic_moments(1.0, 0.5, 0.8);
  const double tau = 0.4;
  // binomial loss: means ×τ, marginals stay thermal, Γ ×τ²
  const double mt = tau * m.mean_t, mr = tau * m.mean_r;
  const double expected_gamma = tau * tau * m.cross / std::sqrt(mt * (mt + 1) * mr * (mr + 1));
  CHECK(*corr::gamma_tr(p, tau) == doctest::Approx(expected_gamma));
  CHECK(corr::big_gamma(p, tau) == doctest::Approx(tau * tau * m.cross));
  CHECK(*corr::nrf(p, tau) == doctest::Approx(1 - tau + tau * *corr::nrf(p)));
  CHECK(*corr::nrf(p, 1.0) == *corr::nrf(p));
  CHECK_THROWS_AS(corr::nrf(p, 0.0), std::domain_error);
}

TEST_CASE("Fock oracle gamma and nrf agree with the closed forms") {
  for (auto [mt, mr, n] : {std::tuple{0.0, 0.0, 0.5}, {0.5, 0.0, 0.3}, {0.4, 0.6, 0.8}}) {
    const auto p = P(mt, mr, n);
    const auto s = fock::evolve_thermal_pair(
        mt, mr, fock::DisentangledCoefficients::from_coupling(p.kappa_abs), fock::default_cutoff(mt, mr));
    const auto m = fock::moments(s);
    CHECK(*corr::gamma_from_moments(m) == doctest::Approx(*corr::gamma_tr(p)).epsilon(1e-8));
    CHECK(*corr::nrf_from_moments(m) == doctest::Approx(*corr::nrf(p)).epsilon(1e-8));
  }
}

TEST_CASE("sweep order, sentinels and csv") {
  const corr::SweepGrid grid{{0.0, 2.0}, {0.0}, {0.0, 1.0}};
  const double taus[] = {1.0, 0.5};
  const auto rows = corr::sweep(grid, taus, 3);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].tau == 1.0);
  CHECK(rows[1].tau == 0.5);
  CHECK(rows[2].n_pdc == doctest::Approx(1.0));
  CHECK(rows[4].mu_t == 2.0);
  CHECK_FALSE(rows[0].gamma.has_value());
  CHECK_FALSE(rows[0].nrf.has_value());
  CHECK(rows[3].separable == rows[2].separable);
  CHECK(rows == corr::sweep(grid, taus, 1));

  std::ostringstream os;
  corr::write_csv(os, rows);
  const std::string csv = os.str();
  CHECK(csv.rfind("mu_t,mu_r,n_pdc,tau,gamma,nrf,margin,separable\n", 0) == 0);
  CHECK(csv.find("0,0,0,1,undefined,undefined,0,true\n") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}

TEST_CASE("sweep reproduces the one-arm curve shape") {
  std::vector<double> n;
  for (int i = 0; i <= 100; ++i) n.push_back(0.01 * std::pow(1000.0, i / 100.0));
  const double taus[] = {1.0};
  const auto rows = corr::sweep({{0.0}, {2.0}, n}, taus);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(*rows[i].gamma > *rows[i - 1].gamma);
    CHECK(*rows[i].nrf < *rows[i - 1].nrf);
    CHECK((*rows[i].nrf < 1) == (rows[i].n_pdc > 2.0 / 3));
  }
}
