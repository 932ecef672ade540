#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rankone/specfun.hpp"

using namespace rankone;
using cplx = std::complex<double>;
using Catch::Approx;

TEST_CASE("log_gamma at classical points") {
  CHECK(std::abs(specfun::log_gamma({1.0, 0.0})) < 1e-14);
  CHECK(specfun::log_gamma({5.0, 0.0}).real() == Approx(std::log(24.0)).epsilon(1e-13));
  CHECK(specfun::log_gamma({0.5, 0.0}).real() ==
        Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-13));
  CHECK(specfun::log_gamma({5.0, 0.0}).imag() == 0.0);
}

TEST_CASE("log_gamma matches lgamma on the positive axis up to |z| = 1e3") {
  for (double x : {1e-3, 0.37, 2.0, 17.5, 250.0, 999.5}) {
    const double ref = std::lgamma(x);
    const double got = specfun::log_gamma({x, 0.0}).real();
    CHECK(std::abs(got - ref) <=
          1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("log_gamma satisfies the recurrence off the real axis") {
  // Gamma(z+1) = z Gamma(z), checked through exp to stay branch-insensitive
  for (cplx z : {cplx(0.25, 3.0), cplx(-2.3, 0.7), cplx(-7.5, -40.0),
                 cplx(0.0, 700.0), cplx(-600.5, 2.0)}) {
    const cplx lhs = specfun::log_gamma(z + 1.0);
    const cplx rhs = specfun::log_gamma(z) + std::log(z);
    const cplx diff = lhs - rhs;
    // agreement modulo 2 pi i
    const double wrapped = std::remainder(diff.imag(), 2.0 * std::numbers::pi);
    CHECK(std::abs(diff.real()) < 1e-11 * std::max(1.0, std::abs(lhs.real())));
    CHECK(std::abs(wrapped) < 1e-11);
  }
}

TEST_CASE("log_gamma principal branch below the axis") {
  // continuous from above on the cut: Gamma(-0.5) = -2 sqrt(pi)
  const cplx v = specfun::log_gamma({-0.5, 0.0});
  CHECK(v.real() == Approx(std::log(2.0 * std::sqrt(std::numbers::pi))).epsilon(1e-12));
  CHECK(v.imag() == Approx(-std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("log_gamma rejects poles") {
  CHECK_THROWS_AS(specfun::log_gamma({0.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(specfun::log_gamma({-3.0, 0.0}), std::domain_error);
}

TEST_CASE("reflection identity |Gamma(i lam)|^2 lam sinh(pi lam) = pi") {
  for (double lam : {0.1, 1.0, 10.0, 50.0}) {
    const double lg2 = 2.0 * specfun::log_gamma(cplx(0.0, lam)).real();
    const double log_sinh = lam * std::numbers::pi +
                            std::log1p(-std::exp(-2.0 * std::numbers::pi * lam)) -
                            std::numbers::ln2;
    const double resid =
        lg2 + std::log(lam) + log_sinh - std::log(std::numbers::pi);
    CHECK(std::abs(resid) < 1e-10);
  }
}

TEST_CASE("pochhammer basics") {
  CHECK(specfun::pochhammer(cplx(3.7, -2.0), 0) == cplx(1.0, 0.0));
  CHECK(specfun::pochhammer(2.0, 3) == Approx(24.0));
  // |(1 + i)_2| with z = B1 + i lam/2, B1 = 1, lam = 2
  const double mod = std::abs(specfun::pochhammer(cplx(1.0, 1.0), 2));
  CHECK(mod == Approx(std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("pochhammer chain property") {
  std::mt19937_64 eng(7);
  auto u = [&] { return 2.0 * (double(eng() >> 11) * 0x1.0p-53) - 1.0; };
  for (int t = 0; t < 50; ++t) {
    const cplx z(5.0 * u(), 5.0 * u());
    const int m = int(eng() % 21);
    const cplx lhs = specfun::pochhammer(z, m + 1);
    const cplx rhs = specfun::pochhammer(z, m) * (z + double(m));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("jacobi_poly basics") {
  CHECK(specfun::jacobi_poly(0, 1.3, -0.2, 0.77) == 1.0);
  CHECK(specfun::jacobi_poly(1, 0.0, 0.0, 0.3) == Approx(0.3));
  // symmetry relation P_n^{(a,b)}(-x) = (-1)^n P_n^{(b,a)}(x)
  CHECK(specfun::jacobi_poly(3, 1.0, 2.0, -0.4) ==
        Approx(-specfun::jacobi_poly(3, 2.0, 1.0, 0.4)).epsilon(1e-13));
}

TEST_CASE("three-term recurrence matches the Rodrigues oracle") {
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {0.5, -0.5}, {2.0, 1.0}}) {
    for (int n = 0; n <= 5; ++n) {
      for (int i = 0; i <= 20; ++i) {
        const double x = -1.0 + 2.0 * i / 20.0;
        const double got = specfun::jacobi_poly(n, a, b, x);
        const double ref = oracles::rodrigues_jacobi(n, a, b, x);
        CHECK(std::abs(got - ref) < 1e-12 * std::max(1.0, std::abs(ref)));
      }
    }
  }
}

TEST_CASE("OrthoPolyIndex validates") {
  CHECK_THROWS_AS(specfun::OrthoPolyIndex(-1, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(specfun::OrthoPolyIndex(2, -1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(specfun::OrthoPolyIndex(2, 0.0, -1.5), std::invalid_argument);
}

TEST_CASE("gegenbauer basics and domain") {
  CHECK(specfun::gegenbauer(0, 0.75, 0.2) == Approx(1.0));
  CHECK(specfun::gegenbauer(1, 1.0, 0.5) == Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(specfun::gegenbauer(2, 0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(specfun::gegenbauer(2, -0.6, 0.5), std::domain_error);
}

TEST_CASE("gegenbauer agrees with recurrence and Gamma-prefactor forms") {
  const int k = 3;
  const double lam = 1.5, t = 0.2;
  const double got = specfun::gegenbauer(k, lam, t);
  CHECK(std::abs(got - oracles::gegenbauer_recurrence(k, lam, t)) < 1e-10);
  // explicit prefactor Gamma(lam+1/2) Gamma(k+2 lam) /
  //   (Gamma(2 lam) Gamma(k+lam+1/2)), evaluated through lgamma
  const double pref = std::exp(std::lgamma(lam + 0.5) + std::lgamma(k + 2.0 * lam) -
                               std::lgamma(2.0 * lam) - std::lgamma(k + lam + 0.5));
  const double ref = pref * specfun::jacobi_poly(k, lam - 0.5, lam - 0.5, t);
  CHECK(std::abs(got - ref) < 1e-10);

  // a sweep against the recurrence
  for (int kk = 0; kk <= 8; ++kk)
    for (double ll : {0.5, 1.5, 3.0})
      for (double tt : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
        const double a = specfun::gegenbauer(kk, ll, tt);
        const double r = oracles::gegenbauer_recurrence(kk, ll, tt);
        CHECK(std::abs(a - r) < 1e-10 * std::max(1.0, std::abs(r)));
      }
}

TEST_CASE("norm_constant closed forms") {
  CHECK(specfun::norm_constant(0.0, 0.0, 1) == Approx(std::sqrt(3.0)).epsilon(1e-13));
  CHECK(specfun::norm_constant(0.0, 0.0, 0) == Approx(1.0).epsilon(1e-13));
  // limit case alpha+beta = -1 at n = 0 stays finite
  CHECK(specfun::norm_constant(-0.5, -0.5, 0) ==
        Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("norm_constant gives unit norm under Gauss-Jacobi quadrature") {
  const double a = 1.5, b = 0.5;
  const int n = 4;
  const auto rule = specfun::gauss_jacobi_rule(n + 1, a, b);
  const double scale = std::pow(2.0, -(a + b + 1.0));
  const double C = specfun::norm_constant(a, b, n);
  double acc = 0.0;
  for (int i = 0; i < rule.order; ++i) {
    const double p = C * specfun::jacobi_poly(n, a, b, rule.nodes[i]);
    acc += scale * rule.weights[i] * p * p;
  }
  CHECK(acc == Approx(1.0).epsilon(1e-10));
}

TEST_CASE("gauss_jacobi_rule basics") {
  const auto mid = specfun::gauss_jacobi_rule(1, 0.0, 0.0);
  CHECK(mid.nodes[0] == Approx(0.0).margin(1e-14));
  CHECK(mid.weights[0] == Approx(2.0).epsilon(1e-14));

  const auto rule = specfun::gauss_jacobi_rule(12, 0.5, 1.5);
  double mass = 0.0;
  for (double w : rule.weights) mass += w;
  const double expect = std::pow(2.0, 3.0) *
                        std::exp(std::lgamma(1.5) + std::lgamma(2.5) -
                                 std::lgamma(4.0));
  CHECK(mass == Approx(expect).epsilon(1e-13));
  CHECK_THROWS_AS(specfun::gauss_jacobi_rule(0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("gauss_jacobi_rule moment exactness") {
  const int order = 6;
  const auto rule = specfun::gauss_jacobi_rule(order, 0.0, 0.0);
  for (int k = 0; k <= 2 * order - 1; ++k) {
    double got = 0.0;
    for (int i = 0; i < order; ++i)
      got += rule.weights[i] * std::pow(rule.nodes[i], k);
    CHECK(std::abs(got - oracles::jacobi_moment(k, 0.0, 0.0)) < 1e-12);
  }
  // and for an asymmetric weight
  const auto r2 = specfun::gauss_jacobi_rule(order, 0.5, 1.5);
  for (int k = 0; k <= 2 * order - 1; ++k) {
    double got = 0.0;
    for (int i = 0; i < order; ++i)
      got += r2.weights[i] * std::pow(r2.nodes[i], k);
    CHECK(std::abs(got - oracles::jacobi_moment(k, 0.5, 1.5)) < 1e-12);
  }
}

TEST_CASE("Gram matrix of trigonometric Jacobi polynomials is the identity") {
  const int n_max = 12;
  for (auto [a, b] : std::vector<std::pair<double, double>>{
           {0.0, 0.0}, {0.5, -0.5}, {2.0, 1.0}}) {
    const auto rule = specfun::gauss_jacobi_rule(n_max + 1, a, b);
    const double scale = std::pow(2.0, -(a + b + 1.0));
    for (int m = 0; m <= n_max; ++m)
      for (int n = m; n <= n_max; ++n) {
        double g = 0.0;
        for (int i = 0; i < rule.order; ++i) {
          const double pm = specfun::jacobi_poly(m, a, b, rule.nodes[i]);
          const double pn = specfun::jacobi_poly(n, a, b, rule.nodes[i]);
          g += scale * rule.weights[i] * pm * pn;
        }
        g *= specfun::norm_constant(a, b, m) * specfun::norm_constant(a, b, n);
        CHECK(std::abs(g - (m == n ? 1.0 : 0.0)) < 1e-10);
      }
  }
}
