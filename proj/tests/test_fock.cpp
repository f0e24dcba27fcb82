#include <doctest.h>

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "pdcsim/factorization.hpp"
#include "pdcsim/fock.hpp"
#include "pdcsim/gaussian.hpp"

using namespace pdcsim;
using fock::Complex;

namespace {

const double kAsinh1 = std::asinh(1.0);

// exp(ξ a†b† − ξ* a b) restricted to the sector n_T − n_R = d, in the basis
// |k + max(d,0), k + max(−d,0)⟩, k = 0..dim−1. ξ = |κ| ζ/|ζ| reproduces the
// disentangled coefficients.
Eigen::MatrixXcd sector_unitary(int d, int dim, double kappa, double phi) {
  const auto coeffs = fock::DisentangledCoefficients::from_coupling(kappa, phi);
  const Complex xi = kappa * coeffs.zeta / std::abs(coeffs.zeta);
  const int s = std::abs(d);
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; ++k) {
    const double amp = std::sqrt(double(k + s + 1) * double(k + 1));
    g(k + 1, k) = xi * amp;
    g(k, k + 1) = -std::conj(xi) * amp;
  }
  return g.exp();
}

double relative(double value, double reference) {
  return reference == 0.0 ? std::abs(value) : std::abs(value / reference - 1);
}

double max_moment_error(const MomentSet& got, const MomentSet& want) {
  return std::max({relative(got.mean_t, want.mean_t), relative(got.mean_r, want.mean_r),
                   relative(got.var_t, want.var_t), relative(got.var_r, want.var_r),
                   relative(got.cross, want.cross)});
}

fock::TwoModeFockState evolve(double mu_t, double mu_r, double n_pdc, int cutoff = 0) {
  const auto p = ModeParams<double>::from_npdc(mu_t, mu_r, n_pdc);
  if (cutoff == 0) cutoff = fock::default_cutoff(mu_t, mu_r);
  return fock::evolve_thermal_pair(
      mu_t, mu_r, fock::DisentangledCoefficients::from_coupling(p.kappa_abs), cutoff);
}

}  // namespace

TEST_CASE("disentangled coefficients") {
  for (double kappa : {0.0, 0.2, kAsinh1, 2.5}) {
    const auto c = fock::DisentangledCoefficients::from_coupling(kappa, 0.4);
    CHECK(std::abs(c.zeta) < 1.0);
    CHECK(c.eta >= 0.0);
    CHECK(std::abs(c.zeta) == doctest::Approx(std::tanh(std::acosh(std::exp(c.eta)))).epsilon(1e-14));
    if (kappa > 0) CHECK(std::arg(c.zeta) == doctest::Approx(std::arg(Complex(0, -1) * std::polar(1.0, -0.4))));
  }
}

TEST_CASE("action coefficient examples") {
  const auto none = fock::DisentangledCoefficients::from_coupling(0.0);
  CHECK(fock::action_coefficient(0, 0, 0, 0, none) == Complex(1.0, 0.0));
  CHECK(fock::action_coefficient(3, 2, 0, 0, none) == Complex(1.0, 0.0));
  CHECK(fock::action_coefficient(0, 0, 0, 1, none) == Complex(0.0, 0.0));

  const auto c = fock::DisentangledCoefficients::from_coupling(kAsinh1);
  const Complex one_pair = fock::action_coefficient(0, 0, 0, 1, c);
  CHECK(std::abs(one_pair - std::exp(-c.eta) * c.zeta) < 1e-15);
  const double t = std::tanh(kAsinh1), ch = std::cosh(kAsinh1);
  CHECK(std::norm(one_pair) == doctest::Approx(t * t / (ch * ch)).epsilon(1e-14));

  CHECK_THROWS_AS(fock::action_coefficient(2, 3, 3, 0, c), std::domain_error);
  CHECK_THROWS_AS(fock::action_coefficient(2, 3, -1, 0, c), std::domain_error);
  CHECK_THROWS_AS(fock::action_coefficient(2, 3, 0, -1, c), std::domain_error);
}

TEST_CASE("number-state evolution matches the matrix exponential of the generator") {
  for (double kappa : {0.3, kAsinh1}) {
    for (double phi : {0.0, 0.7}) {
      const auto coeffs = fock::DisentangledCoefficients::from_coupling(kappa, phi);
      for (int n = 0; n <= 8; n += 2) {
        for (int m = 0; m <= 8; m += 3) {
          const int lo = std::min(n, m);
          const Eigen::MatrixXcd u = sector_unitary(n - m, 220, kappa, phi);
          const auto ket = fock::evolve_number_state(n, m, coeffs, 8);
          REQUIRE(ket.size() < 200);
          double worst = 0;
          for (std::size_t j = 0; j < ket.size(); ++j)
            worst = std::max(worst, std::abs(ket[j] - u(static_cast<Eigen::Index>(j), lo)));
          CHECK(worst < 1e-11);
        }
      }
    }
  }
}

TEST_CASE("unitarity slice at cutoff 60") {
  const auto c = fock::DisentangledCoefficients::from_coupling(kAsinh1);
  for (int n = 0; n <= 60; n += 4)
    for (int m = 0; m <= 60; m += 6) {
      double norm = 0;
      for (const auto& a : fock::evolve_number_state(n, m, c, 60)) norm += std::norm(a);
      CHECK(norm == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("output series stops past the cutoff") {
  const auto c = fock::DisentangledCoefficients::from_coupling(0.5);
  const auto ket = fock::evolve_number_state(3, 5, c, 10);
  const int last = 3 + static_cast<int>(ket.size()) - 1;
  CHECK(last > 10);
  CHECK(std::norm(ket.back()) <= 1e-16);
}

TEST_CASE("thermal pair examples") {
  SUBCASE("vacuum without coupling") {
    const auto s = evolve(0, 0, 0, 4);
    CHECK(s.element(0, 0, 0, 0) == Complex(1.0, 0.0));
    CHECK(s.trace() == doctest::Approx(1.0));
    CHECK(std::abs(s.element(1, 1, 1, 1)) == 0.0);
  }
  SUBCASE("two-mode squeezed vacuum weights") {
    const auto s = evolve(0, 0, 1.0, 60);
    for (int n = 0; n <= 20; ++n)
      CHECK(std::abs(s.element(n, n, n, n).real() - std::pow(0.5, n + 1)) < 1e-8);
    CHECK(std::abs(s.element(1, 0, 1, 0)) < 1e-15);
  }
  SUBCASE("thermal times vacuum") {
    const auto s = evolve(0.5, 0, 0, 40);
    for (int n = 0; n <= 10; ++n)
      CHECK(s.element(n, 0, n, 0).real() ==
            doctest::Approx(std::pow(0.5, n) / std::pow(1.5, n + 1)).epsilon(1e-12));
  }
}

TEST_CASE("state invariants") {
  const auto s = evolve(0.8, 0.3, 0.6, 40);
  CHECK(s.hermiticity_error() < 1e-10);
  CHECK(s.min_eigenvalue() > -1e-9);
  CHECK(s.trace() <= 1.0 + 1e-12);
  CHECK(s.trace() > 1.0 - fock::kDefaultTruncation);
  CHECK(s.trace_deficit() == doctest::Approx(1.0 - s.trace()));
  const Eigen::MatrixXcd dense = s.dense();
  CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(dense.trace().real() == doctest::Approx(s.trace()).epsilon(1e-12));
}

TEST_CASE("truncation failures are reported") {
  CHECK_THROWS_AS(evolve(1.0, 0.0, 0.2, 5), fock::TruncationError);
  try {
    evolve(1.0, 1.0, 0.2, 5);
  } catch (const fock::TruncationError& e) {
    CHECK(e.deficit() > 0);
  }
  const int n = fock::default_cutoff(2.0, 0.5);
  CHECK(n >= 36);
  CHECK(std::pow(2.0 / 3.0, n + 1) < fock::kDefaultTruncation / 20);
}

TEST_CASE("moment examples") {
  SUBCASE("two-mode squeezed vacuum") {
    const auto m = fock::moments(evolve(0, 0, 1.0, 60));
    CHECK(m.mean_t == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.mean_r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.var_t == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(m.cross == doctest::Approx(2.0).epsilon(1e-10));
  }
  SUBCASE("uncoupled thermal seeds") {
    const auto m = fock::moments(evolve(2, 1, 0, 80));
    CHECK(m.mean_t == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(m.var_t == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(std::abs(m.cross) < 1e-12);
  }
  SUBCASE("seeded pair at cutoff 80") {
    const auto s = evolve(2, 1, 0.5, 80);
    const auto m = fock::moments(s);
    CHECK(m.mean_t == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(m.mean_r == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(m.var_t == doctest::Approx(20.0).epsilon(1e-8));
    CHECK(m.var_r == doctest::Approx(12.0).epsilon(1e-8));
    CHECK(m.cross == doctest::Approx(12.0).epsilon(1e-8));
  }
}

TEST_CASE("oracle moments match the closed forms on a small grid") {
  for (double mt : {0.0, 0.7})
    for (double mr : {0.0, 0.4})
      for (double n : {0.1, 0.6}) {
        const auto s = evolve(mt, mr, n, 60);
        const auto m = fock::moments(s);
        const auto a = analytic_moments(mt, mr, n);
        CHECK(max_moment_error(m, a) <= 10 * std::abs(s.trace_deficit()) + 1e-8);
        // thermal marginals and Cauchy–Schwarz
        CHECK(m.var_t == doctest::Approx(m.mean_t * (m.mean_t + 1)).epsilon(1e-8));
        CHECK(m.var_r == doctest::Approx(m.mean_r * (m.mean_r + 1)).epsilon(1e-8));
        CHECK(std::abs(m.cross) <= std::sqrt(m.var_t * m.var_r) * (1 + 1e-12));
        // Heisenberg picture: ⟨n_T⟩ = u²μ_T + v²(μ_R + 1)
        const auto p = ModeParams<double>::from_npdc(mt, mr, n);
        CHECK(m.mean_t ==
              doctest::Approx(p.u() * p.u() * mt + p.v() * p.v() * (mr + 1)).epsilon(1e-9));
      }
}

TEST_CASE("ladder expectations") {
  const auto s = evolve(0.5, 0.2, 0.3);
  const fock::Ladder nt[] = {{fock::Mode::T, true}, {fock::Mode::T, false}};
  CHECK(s.expectation(nt).real() / s.trace() == doctest::Approx(fock::moments(s).mean_t).epsilon(1e-12));
  const fock::Ladder single[] = {{fock::Mode::T, false}};
  CHECK(std::abs(s.expectation(single)) < 1e-15);
}

TEST_CASE("pair amplitude carries the disentangling phase") {
  for (double phi : {0.0, 1.1}) {
    const auto p = ModeParams<double>::from_npdc(0.6, 0.3, 0.4, phi);
    const auto coeffs = fock::DisentangledCoefficients::from_coupling(p.kappa_abs, phi);
    const auto s = fock::evolve_thermal_pair(p.mu_t, p.mu_r, coeffs, fock::default_cutoff(0.6, 0.3));
    const Complex expected = std::polar(p.u() * p.v() * (1 + p.mu_t + p.mu_r), std::arg(coeffs.zeta));
    CHECK(std::abs(fock::pair_amplitude(s) - expected) < 1e-9);
    const auto v = rotate_reference_phase(build_covariance(p), std::arg(coeffs.zeta));
    CHECK(std::abs(pair_amplitude(v) - expected) < 1e-12);
  }
}

TEST_CASE("joint distribution csv") {
  std::ostringstream os;
  fock::write_joint_distribution_csv(evolve(0, 0, 0, 2), os);
  const std::string text = os.str();
  CHECK(text.rfind("n_t,n_r,probability\n", 0) == 0);
  CHECK(text.find("0,0,1\n") != std::string::npos);
}

TEST_CASE("fourth moments factorize") {
  SUBCASE("vacuum seeds, small coupling") {
    const ModeParams<double> modes[] = {ModeParams<double>::from_npdc(0, 0, 0.05)};
    const auto r = ghost::validate_factorization(modes, 30);
    CHECK(r.passed);
  }
  SUBCASE("one-arm seed") {
    const ModeParams<double> modes[] = {ModeParams<double>::from_npdc(0.5, 0, 0.3)};
    CHECK(ghost::validate_factorization(modes, 40).passed);
  }
  SUBCASE("no coupling: cross term vanishes") {
    const ModeParams<double> modes[] = {ModeParams<double>{0.5, 0.5, 0.0, 0.0}};
    const auto r = ghost::validate_factorization(modes, 40);
    CHECK(r.passed);
  }
  SUBCASE("three pairs") {
    const ModeParams<double> modes[] = {ModeParams<double>::from_npdc(0, 0, 0.3),
                                        ModeParams<double>::from_npdc(0.5, 0, 0.2),
                                        ModeParams<double>::from_npdc(0.3, 0.5, 0.1)};
    const auto r = ghost::validate_factorization(modes, 40);
    CHECK(r.assignments > 3);
    CHECK(r.passed);
  }
  SUBCASE("truncation error shrinks with the cutoff") {
    const ModeParams<double> modes[] = {ModeParams<double>::from_npdc(1, 0, 0.5)};
    const auto coarse = ghost::validate_factorization(modes, 40);
    const auto fine = ghost::validate_factorization(modes, 60);
    CHECK(fine.max_relative_error < coarse.max_relative_error);
    CHECK(fine.passed);
  }
  CHECK_THROWS(ghost::validate_factorization(std::span<const ModeParams<double>>{}, 10));
}
