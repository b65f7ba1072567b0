#include "rectnet/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rectnet/parallel.hpp"
#include "rectnet/spine.hpp"

namespace rectnet {

PiMcReport pi_estimate_mc(const std::function<double(double, double, double)>& f, size_t n,
                          uint64_t seed, double h_floor, unsigned threads) {
  std::vector<double> vals(n);
  std::vector<uint8_t> cut(n, 0);
  parallel_for(
      n,
      [&](size_t i) {
        Stream s(replicate_key(seed, i, 0x91e0));
        const double len = s.exponential() + s.exponential();  // density x e^{-x}
        const double wid = s.exponential() + s.exponential();
        SpineState z{len, wid, 0.0, false};
        spine_freeze(z, s);
        const double h = z.len * z.wid;
        if (h < h_floor) {
          vals[i] = 0.0;
          cut[i] = 1;
        } else {
          vals[i] = f(z.len, z.wid, z.age) / h;
        }
      },
      threads);
  PiMcReport rep;
  auto [m, se] = mean_se(vals);
  rep.estimate = m;
  rep.se = se;
  rep.paths = n;
  rep.h_floor = h_floor;
  rep.variance_warning = !(h_floor > 0);
  for (uint8_t c : cut) rep.truncated += c;
  return rep;
}

ConvergenceReport convergence_study(const std::function<double(double, double, double, bool)>& f,
                                    const std::vector<double>& t_grid, size_t reps, double limit,
                                    uint64_t seed, unsigned threads) {
  if (reps < 10) throw std::invalid_argument("convergence_study needs >= 10 replicates");
  if (t_grid.empty()) throw std::invalid_argument("empty time grid");
  const double t_max = *std::max_element(t_grid.begin(), t_grid.end());
  std::vector<std::vector<double>> est(t_grid.size(), std::vector<double>(reps));
  parallel_for(
      reps,
      [&](size_t i) {
        Population pop(derive_seed(seed, i, 0xc0de));
        pop.run(Until::t_max(t_max));
        for (size_t k = 0; k < t_grid.size(); ++k) {
          const double t = t_grid[k];
          est[k][i] = pop.empirical(t, f, Support::FiniteOnly) / (t * t);
        }
      },
      threads);
  ConvergenceReport rep;
  rep.limit = limit;
  std::vector<double> lx, ly;
  for (size_t k = 0; k < t_grid.size(); ++k) {
    ConvergencePoint p;
    p.t = t_grid[k];
    p.reps = reps;
    auto [m, se] = mean_se(est[k]);
    p.mean = m;
    p.se = se;
    double mse = 0.0;
    for (double e : est[k]) mse += (e - limit) * (e - limit);
    p.mse = mse / reps;
    rep.points.push_back(p);
    lx.push_back(std::log(p.t));
    ly.push_back(std::log(std::max(p.mse, 1e-300)));
  }
  if (t_grid.size() >= 4) {
    rep.mse_fit = linear_fit(lx, ly);
    for (size_t k = 0; k < lx.size(); ++k)
      rep.fit_residuals.push_back(ly[k] - (rep.mse_fit.intercept + rep.mse_fit.slope * lx[k]));
  }
  return rep;
}

double g_mass_below_surface(double eps, double tol) {
  if (!(eps > 0)) return 0.0;
  const GnmDensity g(1, 1, tol);
  double total = 0.0;
  for (const auto& t : g.terms()) {
    // int_0^inf e^{-aL L} (1 - e^{-al eps / L}) / al dL
    auto f = [&](double L) {
      if (L <= 0) return 1.0 / t.al;
      return (1.0 - std::exp(-t.al * eps / L)) / t.al * std::exp(-t.aL * L);
    };
    total += t.coef * adaptive_simpson(f, 0.0, 50.0, 1e-11);
  }
  return total;
}

std::vector<SmallFragmentPoint> small_fragments(const std::vector<double>& eps_grid, double t,
                                                size_t reps, uint64_t seed, unsigned threads) {
  for (double e : eps_grid)
    if (!(e > 0)) throw std::invalid_argument("eps must be positive");
  std::vector<std::vector<double>> counts(eps_grid.size(), std::vector<double>(reps));
  std::vector<double> totals(reps);
  parallel_for(
      reps,
      [&](size_t i) {
        Population pop(derive_seed(seed, i, 0x5af3));
        pop.run(Until::t_max(t));
        std::vector<size_t> c(eps_grid.size(), 0);
        size_t tot = 0;
        for (const auto& a : pop.snapshot(t)) {
          if (!(std::isfinite(a.len) && std::isfinite(a.wid))) continue;
          ++tot;
          const double h = a.len * a.wid;
          for (size_t k = 0; k < eps_grid.size(); ++k)
            if (h < eps_grid[k]) ++c[k];
        }
        for (size_t k = 0; k < eps_grid.size(); ++k) counts[k][i] = static_cast<double>(c[k]);
        totals[i] = static_cast<double>(tot);
      },
      threads);
  const double pi1 = pi_moments().pi_one;
  auto [tot_mean, tot_se] = mean_se(totals);
  std::vector<SmallFragmentPoint> out;
  for (size_t k = 0; k < eps_grid.size(); ++k) {
    SmallFragmentPoint p;
    p.eps = eps_grid[k];
    auto [m, se] = mean_se(counts[k]);
    p.mean_count = m;
    p.se = se;
    p.fraction = tot_mean > 0 ? m / tot_mean : 0.0;
    p.series_fraction = g_mass_below_surface(p.eps) / pi1;
    p.shape_ratio = m / (p.eps * std::log1p(1.0 / p.eps));
    out.push_back(p);
  }
  return out;
}

namespace {

template <typename Rec>
TreeStats tree_stats_impl(const std::vector<Rec>& recs) {
  if (recs.empty()) throw std::invalid_argument("empty tree");
  TreeStats ts;
  std::vector<uint64_t> size(recs.size(), 1);
  std::vector<uint8_t> has_child(recs.size(), 0);
  for (const auto& r : recs)
    if (r.parent != 0xffffffffu) has_child[r.parent] = 1;
  uint64_t max_gen = 0;
  for (const auto& r : recs) max_gen = std::max(max_gen, r.label.generation());
  ts.nodes.assign(max_gen, 0);
  ts.leaves.assign(max_gen, 0);
  for (size_t i = recs.size(); i-- > 0;) {
    const auto& r = recs[i];
    const uint64_t g = r.label.generation() - 1;
    ts.nodes[g] += 1;
    if (!has_child[i]) ts.leaves[g] += 1;
    if (r.parent != 0xffffffffu) size[r.parent] += size[i];
  }
  for (size_t g = 0; g < ts.nodes.size(); ++g)
    ts.leaf_fraction.push_back(ts.nodes[g] ? static_cast<double>(ts.leaves[g]) / ts.nodes[g] : 0.0);
  uint64_t max_size = 0;
  for (uint64_t s : size) max_size = std::max(max_size, s);
  for (uint64_t k = 1; k <= max_size; k *= 2) {
    size_t n = 0;
    for (uint64_t s : size)
      if (s >= k) ++n;
    ts.thresholds.push_back(k);
    ts.subtree_survival.push_back(static_cast<double>(n) / recs.size());
  }
  return ts;
}

}  // namespace

TreeStats tree_stats(const Population& pop) { return tree_stats_impl(pop.records()); }

TreeStats tree_stats(const NetworkState& net) { return tree_stats_impl(net.records()); }

GofReport gof_frozen_marginals(const std::vector<double>& lens, const std::vector<double>& wids,
                               double tol) {
  if (lens.size() < 100) throw std::invalid_argument("need at least 100 samples");
  const GnmDensity g(1, 1, tol);
  GofReport rep;
  rep.samples = lens.size();
  rep.len = ks_test(lens, [&](double x) { return g.marginal_len_cdf(x); });
  rep.wid = ks_test(wids, [&](double x) { return g.marginal_wid_cdf(x); });
  // chi-square on the geometric histogram of the length marginal
  const auto edges = geometric_bin_edges(0.01, 12.0, 64);
  const auto counts = histogram_counts(lens, edges);
  std::vector<double> obs, expd;
  const double n = static_cast<double>(lens.size());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    obs.push_back(static_cast<double>(counts[i]));
    expd.push_back(n * (g.marginal_len_cdf(edges[i + 1]) - g.marginal_len_cdf(edges[i])));
  }
  // tail above the last edge
  obs.push_back(n - std::accumulate(counts.begin(), counts.end(), 0.0));
  expd.push_back(n * (1.0 - g.marginal_len_cdf(edges.back())));
  rep.chi2_len = chi2_gof(obs, expd);
  return rep;
}

}  // namespace rectnet
