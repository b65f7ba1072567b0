#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rectnet/rng.hpp"
#include "rectnet/series.hpp"
#include "rectnet/stats.hpp"

using namespace rectnet;

TEST_CASE("ks test is calibrated on its own distribution") {
  size_t above = 0;
  for (uint64_t rep = 0; rep < 100; ++rep) {
    Stream s(replicate_key(100, rep));
    std::vector<double> xs(200);
    for (auto& x : xs) x = s.exponential();
    auto r = ks_test(xs, [](double x) { return 1.0 - std::exp(-x); });
    if (r.p > 0.05) ++above;
  }
  CHECK(above >= 90);
}

TEST_CASE("ks test rejects a wrong distribution") {
  Stream s(replicate_key(101, 0));
  std::vector<double> xs(2000);
  for (auto& x : xs) x = s.exponential();
  const GnmDensity g(1, 1);
  auto r = ks_test(xs, [&](double x) { return g.marginal_len_cdf(x); });
  CHECK(r.p < 1e-3);
}

TEST_CASE("kolmogorov tail values") {
  CHECK(kolmogorov_q(1.36) == doctest::Approx(0.0491).epsilon(2e-2));
  CHECK(kolmogorov_q(1.63) == doctest::Approx(0.0100).epsilon(5e-2));
  CHECK(kolmogorov_q(0.0) == 1.0);
}

TEST_CASE("regularized gamma matches known values") {
  // P(1/2, 1/2) = erf(sqrt(1/2))
  CHECK(regularized_gamma_p(0.5, 0.5) == doctest::Approx(std::erf(std::sqrt(0.5))).epsilon(1e-10));
  // chi^2_2 survival is exp(-x/2)
  CHECK(chi2_sf(3.0, 2.0) == doctest::Approx(std::exp(-1.5)).epsilon(1e-10));
}

TEST_CASE("chi-square goodness of fit is calibrated") {
  size_t above = 0;
  for (uint64_t rep = 0; rep < 100; ++rep) {
    Stream s(replicate_key(102, rep));
    std::vector<double> obs(10, 0.0), expd(10, 50.0);
    for (int i = 0; i < 500; ++i) ++obs[s.next_u64() % 10];
    auto r = chi2_gof(obs, expd);
    if (r.p > 0.01) ++above;
  }
  CHECK(above >= 95);
}

TEST_CASE("wilson interval brackets the point estimate") {
  auto [lo, hi] = wilson_interval(50, 100);
  CHECK(lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.5962).epsilon(1e-3));
  auto [lo0, hi0] = wilson_interval(0, 100);
  CHECK(lo0 == 0.0);
  CHECK(hi0 > 0.0);
  auto [lon, hin] = wilson_interval(100, 100);
  CHECK(hin == 1.0);
  CHECK(lon < 1.0);
}

TEST_CASE("linear fit recovers an exact line") {
  std::vector<double> x = {1, 2, 3, 4, 5}, y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometric bin edges carry a leading zero and a fixed ratio") {
  auto e = geometric_bin_edges(0.01, 12.0, 64);
  REQUIRE(e.size() == 65);
  CHECK(e[0] == 0.0);
  CHECK(e[1] == doctest::Approx(0.01));
  CHECK(e.back() == doctest::Approx(12.0));
  const double r = e[3] / e[2];
  for (size_t i = 2; i + 1 < e.size(); ++i) CHECK(e[i + 1] / e[i] == doctest::Approx(r).epsilon(1e-9));
}

TEST_CASE("histogram counts respect the edges") {
  auto e = geometric_bin_edges(1.0, 8.0, 4);  // 0,1,2,4,8
  auto c = histogram_counts({0.5, 1.5, 3.0, 5.0, 9.0}, e);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == 1);
  CHECK(c[1] == 1);
  CHECK(c[2] == 1);
  CHECK(c[3] == 1);
}

TEST_CASE("mean and standard error") {
  auto [m, se] = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(m == doctest::Approx(2.5));
  CHECK(se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)).epsilon(1e-12));
}
