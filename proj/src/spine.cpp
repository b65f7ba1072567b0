#include "rectnet/spine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rectnet/parallel.hpp"
#include "rectnet/rectangles.hpp"
#include "rectnet/stats.hpp"

namespace rectnet {

namespace {
constexpr double kE = 2.718281828459045;

void freeze_if_degenerate(SpineState& s) {
  if (s.age >= s.len) {
    s.age = s.len;
    s.frozen = true;
  }
}
}  // namespace

double spine_step(SpineState& s, Stream& rng) {
  if (s.frozen) return 0.0;
  const double d = rng.exponential();
  if (s.age + d >= s.len) {
    const double elapsed = s.len - s.age;
    s.age = s.len;
    s.frozen = true;
    return elapsed;
  }
  const double a = s.age + d;
  if (rng.uniform() < (s.len - a) / s.len) {
    s = {s.len - a, s.wid, 0.0, false};
  } else {
    s = {s.wid, a, 0.0, false};
  }
  freeze_if_degenerate(s);
  return d;
}

double stick_step(StickState& s, Stream& rng) {
  if (s.frozen) return 0.0;
  const double d = rng.exponential();
  if (s.age + d >= s.len) {
    const double elapsed = s.len - s.age;
    s.age = s.len;
    s.frozen = true;
    return elapsed;
  }
  const double a = s.age + d;
  // size-biased pick: the aged fragment (length a) with probability a/L
  if (rng.uniform() < a / s.len) {
    s = {a, 0.0, false};
  } else {
    s = {s.len - a, 0.0, false};
  }
  if (s.age >= s.len) s.frozen = true;
  return d;
}

SpineState spine_at(SpineState z, double t, Stream& rng) {
  double elapsed = 0.0;
  while (!z.frozen) {
    const double to_freeze = z.len - z.age;
    const double d = rng.exponential();
    if (d >= to_freeze) {
      if (elapsed + to_freeze > t) {
        z.age += t - elapsed;
        return z;
      }
      z.age = z.len;
      z.frozen = true;
      return z;
    }
    if (elapsed + d > t) {
      z.age += t - elapsed;
      return z;
    }
    elapsed += d;
    z.age += d;
    if (rng.uniform() < (z.len - z.age) / z.len) {
      z = {z.len - z.age, z.wid, 0.0, false};
    } else {
      z = {z.wid, z.age, 0.0, false};
    }
    freeze_if_degenerate(z);
  }
  return z;
}

double spine_freeze(SpineState& z, Stream& rng, uint64_t max_events) {
  double tau = 0.0;
  uint64_t n = 0;
  while (!z.frozen) {
    tau += spine_step(z, rng);
    if (++n > max_events) throw std::runtime_error("spine path exceeded the event cap");
  }
  return tau;
}

double stick_freeze(StickState& z, Stream& rng, uint64_t max_events) {
  double tau = 0.0;
  uint64_t n = 0;
  while (!z.frozen) {
    tau += stick_step(z, rng);
    if (++n > max_events) throw std::runtime_error("stick path exceeded the event cap");
  }
  return tau;
}

StickPath stick_path(double len, double age, Stream& rng, uint64_t max_events) {
  if (!(age >= 0) || !(age <= len)) throw std::invalid_argument("stick needs 0 <= age <= len");
  StickPath p;
  StickState s{len, age, age >= len};
  double t = 0.0;
  uint64_t n = 0;
  while (!s.frozen) {
    const double d = rng.exponential();
    if (s.age + d >= s.len) {
      t += s.len - s.age;
      s.age = s.len;
      s.frozen = true;
      break;
    }
    const double a = s.age + d;
    t += d;
    const bool left = rng.uniform() < a / s.len;
    s = {left ? a : s.len - a, 0.0, false};
    p.jumps.push_back({t, s.len, left});
    if (s.len <= 0.0) {
      s.frozen = true;
      break;
    }
    if (++n > max_events) throw std::runtime_error("stick path exceeded the event cap");
  }
  p.tau = t;
  p.final_len = s.len;
  return p;
}

CouplingRecord couple(double len, double wid, double age, Stream& dim1, Stream& dim2) {
  if (!(age >= 0) || !(age < len) || !(wid > 0))
    throw std::invalid_argument("couple needs 0 <= age < len and wid > 0");
  const StickPath p[2] = {stick_path(len, age, dim1), stick_path(wid, 0.0, dim2)};
  size_t idx[2] = {0, 0};
  double consumed[2] = {0.0, 0.0};
  double cur[2] = {len, wid};
  int dim = 0;
  double ytime = 0.0;
  int frozen_dim = 0;
  while (true) {
    const StickPath& path = p[dim];
    size_t j = idx[dim];
    while (j < path.jumps.size() && !path.jumps[j].left) ++j;
    if (j == path.jumps.size()) {  // this dimension runs to its freeze
      ytime += path.tau - consumed[dim];
      consumed[dim] = path.tau;
      cur[dim] = path.final_len;
      idx[dim] = j;
      frozen_dim = dim;
      break;
    }
    ytime += path.jumps[j].t - consumed[dim];
    consumed[dim] = path.jumps[j].t;
    cur[dim] = path.jumps[j].len;
    idx[dim] = j + 1;
    dim = 1 - dim;
  }
  CouplingRecord rec;
  rec.tau = ytime;
  rec.tau1 = p[0].tau;
  rec.tau2 = p[1].tau;
  rec.side1 = cur[0];
  rec.side2 = cur[1];
  rec.stick1_final = p[0].final_len;
  rec.stick2_final = p[1].final_len;
  rec.frozen_dim = frozen_dim + 1;
  rec.ineq_ok = rec.tau <= rec.tau1 + rec.tau2 && rec.side1 >= rec.stick1_final &&
                rec.side2 >= rec.stick2_final;
  return rec;
}

SurvivalCurve freezing_tail(double len, const std::vector<double>& grid, size_t n,
                            TailKind kind, uint64_t seed) {
  if (n < 1000) throw std::invalid_argument("freezing_tail needs at least 1000 paths");
  std::vector<double> taus(n);
  parallel_for(n, [&](size_t i) {
    Stream s(replicate_key(seed, i, 0xf73e));
    if (kind == TailKind::Stick) {
      StickState z{len, 0.0, false};
      taus[i] = stick_freeze(z, s);
    } else {
      SpineState z{len, len, 0.0, false};
      taus[i] = spine_freeze(z, s);
    }
  });
  SurvivalCurve c;
  c.paths = n;
  c.t = grid;
  for (double t : grid) {
    size_t k = 0;
    for (double tau : taus)
      if (tau > t) ++k;
    auto [lo, hi] = wilson_interval(k, n);
    c.p.push_back(static_cast<double>(k) / n);
    c.lo.push_back(lo);
    c.hi.push_back(hi);
  }
  return c;
}

namespace {

// Inverse-CDF sampler of the skeleton kernel: conditional jump target density
// y (e^{-y} + e^{-(x-y)}) / (x (1 - e^{-x})) on (0, x).
double sample_skeleton_jump(double x, double u) {
  auto cdf_num = [x](double y) {
    return (1.0 - std::exp(-y) * (1.0 + y)) + std::exp(-x) * (std::exp(y) * (y - 1.0) + 1.0);
  };
  const double total = x * (1.0 - std::exp(-x));
  const double target = u * total;
  double lo = 0.0, hi = x;
  for (int it = 0; it < 80; ++it) {
    const double mid = (lo + hi) / 2;
    if (cdf_num(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (lo + hi) / 2;
}

}  // namespace

HarmonicMomentReport harmonic_moment(double len, const std::function<double(double)>& f,
                                     double f_sup, size_t n, uint64_t seed) {
  std::vector<double> direct(n), oracle(n);
  parallel_for(n, [&](size_t i) {
    {
      Stream s(replicate_key(seed, i, 0x4a31));
      StickPath p = stick_path(len, 0.0, s);
      direct[i] = f(p.final_len) / p.final_len;
    }
    {
      Stream s(replicate_key(seed, i, 0x4a32));
      double x = len;
      while (s.uniform() >= std::exp(-x)) x = sample_skeleton_jump(x, s.uniform());
      oracle[i] = f(x) / x;
    }
  });
  HarmonicMomentReport rep;
  auto [m1, se1] = mean_se(direct);
  auto [m2, se2] = mean_se(oracle);
  rep.estimate = m1;
  rep.se = se1;
  rep.oracle = m2;
  rep.oracle_se = se2;
  rep.bound = f(len) / len * std::exp(-len) + 2 * kE * f_sup;
  rep.within_bound = rep.estimate <= rep.bound + 3 * rep.se;
  rep.agree_z = std::abs(m1 - m2) / std::sqrt(se1 * se1 + se2 * se2 + 1e-300);
  return rep;
}

VolterraTable volterra_u(double x_max, double step) {
  if (!(step > 0) || step > 1e-2) throw std::invalid_argument("step must be in (0, 1e-2]");
  const size_t n = static_cast<size_t>(std::llround(x_max / step));
  VolterraTable tab;
  tab.x.resize(n + 1);
  for (size_t i = 0; i <= n; ++i) tab.x[i] = i * step;

  // closed form by cumulative Simpson with midpoints
  tab.closed.resize(n + 1);
  tab.closed[0] = 1.0;
  auto g = [](double y) { return std::exp(1.0 - std::exp(-y)); };
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double a = tab.x[i], b = tab.x[i + 1];
    acc += (b - a) / 6.0 * (g(a) + 4.0 * g((a + b) / 2) + g(b));
    tab.closed[i + 1] = 1.0 + 2.0 * acc;
  }

  // kernel series: u = sum_k u_k, u_0 = 1,
  // u_{k+1}(x) = int_0^x e^{-y} u_k(y) dy + e^{-x} int_0^x e^{y} u_k(y) dy
  std::vector<double> sum(n + 1, 1.0), cur(n + 1, 1.0), next(n + 1);
  size_t it = 0;
  for (;; ++it) {
    if (it >= 100) throw std::runtime_error("volterra iteration did not converge");
    double a_acc = 0.0, b_acc = 0.0, sup = 0.0;
    next[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
      const double y0 = tab.x[i - 1], y1 = tab.x[i];
      a_acc += step / 2 * (std::exp(-y0) * cur[i - 1] + std::exp(-y1) * cur[i]);
      b_acc += step / 2 * (std::exp(y0) * cur[i - 1] + std::exp(y1) * cur[i]);
      next[i] = a_acc + std::exp(-y1) * b_acc;
    }
    for (size_t i = 0; i <= n; ++i) {
      sum[i] += next[i];
      sup = std::max(sup, next[i]);
    }
    cur.swap(next);
    if (sup < 1e-12) break;
  }
  tab.iterations = it + 1;
  tab.iterated = std::move(sum);
  tab.sup_diff = 0.0;
  for (size_t i = 0; i <= n; ++i)
    tab.sup_diff = std::max(tab.sup_diff, std::abs(tab.iterated[i] - tab.closed[i]));
  return tab;
}

ManyToOneReport many_to_one_check(SpineState z, double t,
                                  const std::function<double(double, double, double)>& f,
                                  size_t n, uint64_t seed, unsigned threads) {
  const double hz = z.len * z.wid;
  std::vector<double> va(n), vb(n);
  parallel_for(
      n,
      [&](size_t i) {
        {
          Stream s(replicate_key(seed, i, 0x5e1f));
          SpineState y = spine_at(z, t, s);
          va[i] = hz * f(y.len, y.wid, y.age) / (y.len * y.wid);
        }
        {
          Population pop(derive_seed(seed, i, 0xb0b1), Rect{z.len, z.wid, z.age});
          pop.run(Until::t_max(t));
          vb[i] = pop.empirical(
              t, [&](double L, double l, double a, bool) { return f(L, l, a); },
              Support::FiniteOnly);
        }
      },
      threads);
  ManyToOneReport rep;
  auto [ma, sa] = mean_se(va);
  auto [mb, sb] = mean_se(vb);
  rep.spine_est = ma;
  rep.spine_se = sa;
  rep.direct_est = mb;
  rep.direct_se = sb;
  rep.z = std::abs(ma - mb) / std::sqrt(sa * sa + sb * sb + 1e-300);
  rep.paths = n;
  rep.small_sample_warning = n < 1000;
  return rep;
}

std::vector<FreezeSample> spine_freeze_sample(double len, double wid, size_t n, uint64_t seed) {
  if (!(len > 0) || !(wid > 0)) throw std::invalid_argument("sizes must be positive");
  std::vector<FreezeSample> out(n);
  parallel_for(n, [&](size_t i) {
    Stream s(replicate_key(seed, i, 0x9dfe));
    SpineState z{len, wid, 0.0, false};
    const double tau = spine_freeze(z, s);
    out[i] = {z.len, z.wid, tau};
  });
  return out;
}

}  // namespace rectnet
