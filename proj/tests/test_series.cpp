#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rectnet/series.hpp"

using namespace rectnet;

namespace {
// independent oracle: sum_k (1 + 1/k) / ((k-1)!)^2
double pi_one_oracle() {
  double sum = 0.0, fact = 1.0;  // (k-1)! at k = 1
  for (int k = 1; k <= 30; ++k) {
    if (k > 1) fact *= (k - 1);
    sum += (1.0 + 1.0 / k) / (fact * fact);
  }
  return sum;
}
}  // namespace

TEST_CASE("density at the origin") {
  CHECK(density_g(0.0, 0.0) == doctest::Approx(21.6307).epsilon(2e-4));
}

TEST_CASE("g decreases in both coordinates") {
  const GnmDensity g(1, 1);
  double prev = g(0.0, 0.3);
  for (double L = 0.2; L < 4.0; L += 0.2) {
    const double v = g(L, 0.3);
    CHECK(v < prev);
    prev = v;
  }
  prev = g(0.7, 0.0);
  for (double l = 0.2; l < 4.0; l += 0.2) {
    const double v = g(0.7, l);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("total mass matches the analytic series") {
  const GnmDensity g(1, 1);
  CHECK(std::abs(g.mass() - pi_one_oracle()) < 1e-10);
  CHECK(g.mass() == doctest::Approx(3.87022).epsilon(1e-5));
}

TEST_CASE("surface moment of g is one") {
  const GnmDensity g(1, 1);
  CHECK(g.moment_surface() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("pi moments and the limit constant") {
  auto pm = pi_moments();
  CHECK(pm.pi_h == 1.0);
  CHECK(std::abs(pm.pi_one - pi_one_oracle()) < 1e-10);
  CHECK(pm.limit == doctest::Approx(1.93511).epsilon(1e-5));
}

TEST_CASE("2-d quadrature of g converges to the series mass") {
  const GnmDensity g(1, 1);
  const double quad = integrate2d([&](double L, double l) { return g(L, l); }, 20.0, 20.0, 1e-9);
  CHECK(std::abs(quad - g.mass()) < 1e-8);
}

TEST_CASE("tightening the tolerance never moves values beyond it") {
  const GnmDensity coarse(1, 1, 1e-8);
  const GnmDensity fine(1, 1, 1e-14);
  for (double L = 0.0; L <= 3.0; L += 0.5)
    for (double l = 0.0; l <= 3.0; l += 0.5) CHECK(std::abs(coarse(L, l) - fine(L, l)) < 1e-8);
}

TEST_CASE("the stationary density satisfies its recursion") {
  CHECK(gnm_fixedpoint_residual(1, 1) <= 1e-8);
  CHECK(gnm_fixedpoint_residual(2, 3) <= 1e-8);
}

TEST_CASE("termwise and quadrature masses agree for g_{2,3}") {
  const GnmDensity g(2, 3);
  const double quad = integrate2d([&](double L, double l) { return g(L, l); }, 25.0, 25.0, 1e-9);
  CHECK(std::abs(quad - g.mass()) < 1e-7);
}

TEST_CASE("marginal CDFs are proper") {
  const GnmDensity g(1, 1);
  CHECK(g.marginal_len_cdf(0.0) == 0.0);
  CHECK(g.marginal_len_cdf(60.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(g.marginal_wid_cdf(60.0) == doctest::Approx(1.0).epsilon(1e-12));
  double prev = 0.0;
  for (double x = 0.1; x < 8.0; x += 0.1) {
    const double v = g.marginal_len_cdf(x);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("bin masses sum to the total") {
  const GnmDensity g(1, 1);
  double sum = 0.0;
  const double edges[] = {0.0, 0.5, 1.0, 2.0, 4.0, 40.0};
  for (size_t i = 0; i + 1 < 6; ++i)
    for (size_t j = 0; j + 1 < 6; ++j) sum += g.bin_mass(edges[i], edges[i + 1], edges[j], edges[j + 1]);
  CHECK(sum == doctest::Approx(g.mass()).epsilon(1e-10));
}

TEST_CASE("adaptive quadrature sanity") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0.0, 1.0) ==
        doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(adaptive_simpson([](double x) { return std::exp(-x); }, 0.0, 10.0) ==
        doctest::Approx(1.0 - std::exp(-10.0)).epsilon(1e-10));
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS(GnmDensity(0, 1));
  CHECK_THROWS(GnmDensity(1, 1, 0.0));
  CHECK_THROWS(density_g(-1.0, 0.0));
}
