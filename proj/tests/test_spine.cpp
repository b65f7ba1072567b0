#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rectnet/spine.hpp"

using namespace rectnet;

TEST_CASE("spine surface never increases and strictly drops at jumps") {
  Stream s(replicate_key(1, 0));
  for (int path = 0; path < 300; ++path) {
    SpineState z{2.0 + 3.0 * s.uniform(), 1.0 + 2.0 * s.uniform(), 0.0, false};
    double h = z.len * z.wid;
    int guard = 0;
    while (!z.frozen) {
      const double age_before = z.age;
      spine_step(z, s);
      const double h2 = z.len * z.wid;
      CHECK(h2 <= h);
      if (!z.frozen && z.age == 0.0 && age_before >= 0.0) CHECK(h2 < h);  // jumped
      h = h2;
      REQUIRE(++guard < 100000);
    }
    CHECK(z.age == z.len);
  }
}

TEST_CASE("stick length never increases and jumps reset the age") {
  Stream s(replicate_key(2, 0));
  for (int path = 0; path < 300; ++path) {
    StickState z{1.0 + 5.0 * s.uniform(), 0.0, false};
    double len = z.len;
    while (!z.frozen) {
      stick_step(z, s);
      CHECK(z.len <= len);
      if (!z.frozen) CHECK(z.age == 0.0);
      len = z.len;
    }
  }
}

TEST_CASE("no-jump freezing happens with probability e^{-L}") {
  const size_t n = 40000;
  size_t immediate = 0;
  for (size_t i = 0; i < n; ++i) {
    Stream s(replicate_key(3, i));
    StickState z{1.0, 0.0, false};
    stick_step(z, s);
    if (z.frozen) ++immediate;
  }
  const double p = static_cast<double>(immediate) / n;
  const double target = std::exp(-1.0);
  CHECK(std::abs(p - target) < 3 * std::sqrt(target * (1 - target) / n));
}

TEST_CASE("stick jump picks the aged fragment size-biasedly") {
  // first jumps near age 0.4 from L=1 pick the left piece with probability ~0.4
  size_t in_window = 0, left = 0;
  for (size_t i = 0; i < 400000; ++i) {
    Stream s(replicate_key(4, i));
    const double d = s.exponential();
    if (d >= 1.0) continue;  // froze
    const bool picked_left = s.uniform() < d / 1.0;
    if (d > 0.35 && d < 0.45) {
      ++in_window;
      if (picked_left) ++left;
    }
  }
  REQUIRE(in_window > 3000);
  const double frac = static_cast<double>(left) / in_window;
  CHECK(std::abs(frac - 0.4) < 0.03);
}

TEST_CASE("coupling inequalities hold pathwise with shared draws") {
  size_t no_switch = 0;
  for (size_t i = 0; i < 10000; ++i) {
    Stream d1(replicate_key(5, i, 1)), d2(replicate_key(5, i, 2));
    auto rec = couple(5.0, 3.0, 0.0, d1, d2);
    CHECK(rec.ineq_ok);
    CHECK(rec.tau <= rec.tau1 + rec.tau2);
    CHECK(rec.side1 >= rec.stick1_final);
    CHECK(rec.side2 >= rec.stick2_final);
    // dimension 2 never activated: the width coordinate is untouched
    if (rec.frozen_dim == 1 && rec.tau == rec.tau1) {
      ++no_switch;
      CHECK(rec.side2 == 3.0);
      CHECK(rec.side1 == rec.stick1_final);
    }
  }
  CHECK(no_switch > 0);
}

TEST_CASE("freezing tail: survival starts at one and decreases") {
  auto c = freezing_tail(2.0, {0.0, 1.0, 2.0, 4.0, 8.0}, 2000, TailKind::Stick, 11);
  CHECK(c.p[0] == 1.0);
  for (size_t i = 0; i + 1 < c.p.size(); ++i) CHECK(c.p[i + 1] <= c.p[i]);
  for (size_t i = 0; i < c.p.size(); ++i) {
    CHECK(c.lo[i] <= c.p[i]);
    CHECK(c.p[i] <= c.hi[i]);
  }
}

TEST_CASE("short sticks freeze within geometric rounds of length L") {
  // tau is stochastically below L * Geometric(1 - e^{-1})
  auto c = freezing_tail(0.5, {0.5, 1.0, 1.5}, 20000, TailKind::Stick, 12);
  const double q = std::exp(-1.0);
  for (size_t k = 1; k <= 3; ++k) {
    const double bound = std::pow(q, static_cast<double>(k));
    CHECK(c.p[k - 1] <= bound + 3 * std::sqrt(bound * (1 - bound) / 20000.0) + 1e-9);
  }
}

TEST_CASE("harmonic moment bound and kernel-chain oracle agree") {
  auto rep = harmonic_moment(2.0, [](double) { return 1.0; }, 1.0, 100000, 13);
  CHECK(rep.within_bound);
  CHECK(rep.estimate <= std::exp(-2.0) / 2.0 + 2 * 2.718281828459045 + 3 * rep.se);
  CHECK(rep.agree_z <= 3.0);

  // tiny sticks freeze at once: the moment blows up like 1/L
  auto tiny = harmonic_moment(0.01, [](double) { return 1.0; }, 1.0, 20000, 14);
  CHECK(tiny.estimate > 0.9 / 0.01 * std::exp(-0.01));
  CHECK(tiny.estimate < 1.2 / 0.01);
}

TEST_CASE("volterra function: closed form and kernel iteration coincide") {
  auto tab = volterra_u(5.0, 1e-3);
  CHECK(tab.closed[0] == 1.0);
  CHECK(tab.iterated[0] == doctest::Approx(1.0).epsilon(1e-9));
  // initial slope 2
  CHECK((tab.closed[1] - tab.closed[0]) / 1e-3 == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(tab.sup_diff <= 1e-4);
  // u(1) ~ 3.94
  const size_t i1 = 1000;
  CHECK(tab.closed[i1] == doctest::Approx(3.93592).epsilon(1e-4));
  CHECK(tab.iterated[i1] == doctest::Approx(3.93592).epsilon(1e-4));
  // linear growth bound u <= 1 + 2 e x
  for (size_t i = 0; i < tab.x.size(); i += 50)
    CHECK(tab.iterated[i] <= 1.0 + 2 * 2.718281828459045 * tab.x[i] + 1e-9);
  // second difference reproduces u'' = e^{-x} u'
  for (size_t i = 500; i + 1 < tab.x.size(); i += 777) {
    const double h = 1e-3;
    const double d1 = (tab.closed[i + 1] - tab.closed[i - 1]) / (2 * h);
    const double d2 = (tab.closed[i + 1] - 2 * tab.closed[i] + tab.closed[i - 1]) / (h * h);
    CHECK(std::abs(d2 - std::exp(-tab.x[i]) * d1) < 0.01);
  }
  CHECK_THROWS_AS(volterra_u(5.0, 0.1), std::invalid_argument);
}

TEST_CASE("many-to-one at t = 0 is an identity") {
  auto rep = many_to_one_check({2.0, 1.0, 0.0, false}, 0.0,
                               [](double L, double l, double) { return L * l; }, 2000, 15);
  CHECK(rep.spine_est == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rep.direct_est == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("many-to-one is exact for the surface on a state grid") {
  for (SpineState z : {SpineState{1, 1, 0, false}, SpineState{2, 1, 0, false},
                       SpineState{5, 3, 1, false}}) {
    for (double t : {1.0, 3.0}) {
      auto rep = many_to_one_check(z, t, [](double L, double l, double) { return L * l; }, 2000,
                                   19);
      const double pooled = std::sqrt(rep.spine_se * rep.spine_se + rep.direct_se * rep.direct_se);
      CHECK(std::abs(rep.spine_est - rep.direct_est) <= 3 * pooled + 1e-9 * z.len * z.wid);
    }
  }
}

TEST_CASE("many-to-one agrees for a decaying surface functional") {
  auto rep = many_to_one_check(
      {2.0, 1.0, 0.0, false}, 3.0,
      [](double L, double l, double) { return L * l * std::exp(-L - l); }, 30000, 16);
  CHECK(rep.z <= 3.0);
}

TEST_CASE("spine freeze samples stay within the initial sizes") {
  auto samples = spine_freeze_sample(2.0, 1.5, 5000, 17);
  size_t untouched = 0;
  for (const auto& s : samples) {
    CHECK(s.len <= 2.0);
    CHECK(s.wid <= 2.0);
    CHECK(s.tau > 0.0);
    if (s.len == 2.0 && s.wid == 1.5) ++untouched;
  }
  // the no-jump path freezes at (L, l, L) with probability >= e^{-L}
  const double p = static_cast<double>(untouched) / samples.size();
  const double floor_p = std::exp(-2.0);
  CHECK(p >= floor_p - 3 * std::sqrt(floor_p * (1 - floor_p) / samples.size()));
}
