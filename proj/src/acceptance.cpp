#include "rectnet/acceptance.hpp"

#include <cmath>
#include <sstream>

#include "rectnet/analytics.hpp"
#include "rectnet/network.hpp"
#include "rectnet/parallel.hpp"
#include "rectnet/pde.hpp"
#include "rectnet/rectangles.hpp"
#include "rectnet/series.hpp"
#include "rectnet/spine.hpp"
#include "rectnet/stats.hpp"

namespace rectnet {

namespace {

std::string fmt(double v, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

CriterionResult c1_surface_law(bool quick, unsigned threads) {
  const double t = 50.0;
  const size_t seeds = quick ? 5 : 20;
  std::vector<double> means(seeds);
  std::vector<double> gaps(seeds);
  parallel_for(
      seeds,
      [&](size_t i) {
        Population p(i + 1);
        p.run(Until::t_max(t));
        means[i] = p.finite_surface(t) / (t * t);
        gaps[i] = std::min(p.min_surface_gap(), t * t / 2 - p.finite_surface(t));
      },
      threads);
  auto [mean, se] = mean_se(means);
  double min_gap = kInf;
  for (double g : gaps) min_gap = std::min(min_gap, g);
  CriterionResult r;
  r.pass = std::abs(mean - 0.5) <= 0.03 && min_gap >= 0.0;
  r.detail = "mean <Z,h>/t^2 = " + fmt(mean) + " (se " + fmt(se, 3) + "), |mean-0.5| = " +
             fmt(std::abs(mean - 0.5)) + " (need <= 0.03); min pathwise gap = " + fmt(min_gap) +
             " (need >= 0)";
  return r;
}

CriterionResult c2_count_law(bool quick, unsigned threads) {
  const double t = 50.0;
  const size_t seeds = quick ? 5 : 20;
  const double limit = pi_moments().limit;
  std::vector<double> means(seeds);
  parallel_for(
      seeds,
      [&](size_t i) {
        Population p(i + 1);
        p.run(Until::t_max(t));
        means[i] = static_cast<double>(p.finite_count(t)) / (t * t);
      },
      threads);
  auto [mean, se] = mean_se(means);
  const double rel = std::abs(mean - limit) / limit;
  CriterionResult r;
  r.pass = rel <= 0.05;
  r.detail = "mean <Z,1>/t^2 = " + fmt(mean) + " (se " + fmt(se, 3) + ") vs Pi(1)/2 = " +
             fmt(limit) + "; rel err = " + fmt(rel) + " (need <= 0.05)";
  return r;
}

CriterionResult c3_stationary_density(bool quick, unsigned threads) {
  const double t = 30.0;
  const size_t seeds = quick ? 10 : 50;
  std::vector<std::vector<double>> lens(seeds), wids(seeds);
  parallel_for(
      seeds,
      [&](size_t i) {
        Population p(101 + i);
        p.run(Until::t_max(t));
        for (const auto& a : p.snapshot(t)) {
          if (a.frozen && std::isfinite(a.len) && std::isfinite(a.wid)) {
            lens[i].push_back(a.len);
            wids[i].push_back(a.wid);
          }
        }
      },
      threads);
  std::vector<double> all_len, all_wid;
  for (size_t i = 0; i < seeds; ++i) {
    all_len.insert(all_len.end(), lens[i].begin(), lens[i].end());
    all_wid.insert(all_wid.end(), wids[i].begin(), wids[i].end());
  }
  const GnmDensity g(1, 1);
  const double dL = ks_statistic(all_len, [&](double x) { return g.marginal_len_cdf(x); });
  const double dW = ks_statistic(all_wid, [&](double x) { return g.marginal_wid_cdf(x); });
  CriterionResult r;
  r.pass = dL <= 0.02 && dW <= 0.02;
  r.detail = "pooled n = " + std::to_string(all_len.size()) + "; KS(L) = " + fmt(dL) +
             ", KS(l) = " + fmt(dW) + " (need <= 0.02 each)";
  return r;
}

CriterionResult c4_equivalence(bool quick, unsigned threads) {
  const size_t seeds = quick ? 3 : 10;
  const uint64_t events = quick ? 2000 : 10000;
  std::vector<EquivalenceReport> reps(seeds);
  parallel_for(
      seeds, [&](size_t i) { reps[i] = equivalence_check(i + 1, events); }, threads);
  bool ok = true;
  double worst = 0.0;
  std::string first;
  for (const auto& rep : reps) {
    ok = ok && rep.ok;
    worst = std::max(worst, rep.max_abs_diff);
    if (!rep.ok && first.empty()) first = rep.detail;
  }
  CriterionResult r;
  r.pass = ok;
  r.detail = std::to_string(seeds) + " seeds x " + std::to_string(events) +
             " events; max |diff| = " + fmt(worst, 3) + " (need <= 1e-9)" +
             (first.empty() ? "" : "; " + first);
  return r;
}

CriterionResult c5_coupling(bool quick, unsigned) {
  const size_t n = quick ? 2000 : 10000;
  size_t violations = 0;
  for (size_t i = 0; i < n; ++i) {
    Stream d1(replicate_key(505, i, 1)), d2(replicate_key(505, i, 2));
    auto rec = couple(5.0, 3.0, 0.0, d1, d2);
    if (!rec.ineq_ok) ++violations;
  }
  CriterionResult r;
  r.pass = violations == 0;
  r.detail = std::to_string(n) + " coupled paths from (5,3,0); violations = " +
             std::to_string(violations) + " (need 0)";
  return r;
}

CriterionResult c6_many_to_one(bool quick, unsigned threads) {
  const size_t n = quick ? 20000 : 100000;
  const double t = 3.0;
  struct Case {
    double len, wid;
    const char* fname;
    std::function<double(double, double, double)> f;
  };
  std::vector<Case> cases;
  for (double l : {1.0, 2.0}) {
    cases.push_back({l, 1.0, "h", [](double L, double w, double) { return L * w; }});
    cases.push_back({l, 1.0, "h*exp(-L-l)", [](double L, double w, double) {
                       return L * w * std::exp(-L - w);
                     }});
  }
  CriterionResult r;
  r.pass = true;
  std::ostringstream os;
  for (const auto& c : cases) {
    auto rep = many_to_one_check({c.len, c.wid, 0.0, false}, t, c.f, n,
                                 7000 + static_cast<uint64_t>(c.len * 10), threads);
    // exact-identity cases carry only rounding noise; allow it as absolute slack
    const double pooled = std::sqrt(rep.spine_se * rep.spine_se + rep.direct_se * rep.direct_se);
    const bool ok = std::abs(rep.spine_est - rep.direct_est) <= 3 * pooled + 1e-9;
    r.pass = r.pass && ok;
    os << "z=(" << c.len << "," << c.wid << ",0) f=" << c.fname << ": A=" << fmt(rep.spine_est, 5)
       << " B=" << fmt(rep.direct_est, 5) << " |A-B|/se=" << fmt(rep.z, 3) << (ok ? " ok" : " FAIL")
       << "; ";
  }
  r.detail = os.str() + "(need |A-B| <= 3 pooled SE at n = " + std::to_string(n) + ")";
  return r;
}

CriterionResult c7_freezing_tail(bool quick, unsigned) {
  const size_t n = quick ? 20000 : 100000;
  std::vector<double> grid;
  for (double t = 20.0; t <= 80.0 + 1e-9; t += 5.0) grid.push_back(t);
  auto curve = freezing_tail(10.0, grid, n, TailKind::Stick, 707);
  std::vector<double> xs, ys;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double survivors = curve.p[i] * static_cast<double>(n);
    if (survivors >= 10.0) {
      xs.push_back(grid[i]);
      ys.push_back(std::log(curve.p[i]));
    }
  }
  CriterionResult r;
  std::ostringstream os;
  os << n << " stick paths from (10,0); usable grid points in [20,80] (>=10 survivors): "
     << xs.size();
  if (xs.size() >= 4) {
    auto fit = linear_fit(xs, ys);
    r.pass = fit.r2 >= 0.98 && fit.slope < 0;
    os << "; slope = " << fmt(fit.slope, 4) << ", R^2 = " << fmt(fit.r2, 4)
       << " (need R^2 >= 0.98, slope < 0)";
  } else {
    r.pass = false;
    os << " -- too few populated points for the [20,80] fit (survival at 20: " << fmt(curve.p[0], 3)
       << ", at 30: " << fmt(curve.p[2], 3) << "); cannot satisfy the criterion as stated";
  }
  r.detail = os.str();
  return r;
}

CriterionResult c8_volterra(bool, unsigned) {
  auto tab = volterra_u(5.0, 1e-3);
  bool bound_ok = true;
  for (size_t i = 0; i < tab.x.size(); ++i) {
    if (tab.iterated[i] > 1.0 + 2 * 2.718281828459045 * tab.x[i] + 1e-9) bound_ok = false;
  }
  CriterionResult r;
  r.pass = tab.sup_diff <= 1e-4 && tab.closed[0] == 1.0 && tab.iterated[0] == 1.0 && bound_ok;
  r.detail = "sup |iteration - closed| = " + fmt(tab.sup_diff, 3) +
             " on [0,5] (need <= 1e-4); u(0) = " + fmt(tab.closed[0]) +
             "; linear bound u <= 1+2ex " + (bound_ok ? "holds" : "FAILS") + "; " +
             std::to_string(tab.iterations) + " kernel iterations";
  return r;
}

CriterionResult c9_immigration(bool quick, unsigned threads) {
  const size_t reps = quick ? 2000 : 10000;
  auto p_res = characteristics_solve(PdeWhich::P, 10.0, 1e-3);
  auto m_res = characteristics_solve(PdeWhich::M, 10.0, 1e-3, 1.0);
  auto layers10 = mc_layer_validate(10.0, reps, 909, 2.0, 1.0, 1.0, threads);
  auto layers3 = mc_layer_validate(3.0, reps, 910, 2.0, 1.0, 1.0, threads);

  const bool solver_ok = p_res.sup_err_p <= 1e-5 && m_res.sup_err_m <= 1e-5 &&
                         p_res.max_mass_drift <= 1e-8;
  const bool ks_ok = layers10.doubly_ks.d <= 0.02;
  const double singly_rel =
      std::abs(layers10.singly_mean - layers10.singly_expected) / layers10.singly_expected;
  const bool singly_ok = singly_rel <= 0.02;
  const bool atom_ok =
      std::abs(layers3.atom_freq - layers3.atom_expected) <= 3 * layers3.atom_se + 1e-12;

  CriterionResult r;
  r.pass = solver_ok && ks_ok && singly_ok && atom_ok;
  std::ostringstream os;
  os << "solver sup errs p/m = " << fmt(p_res.sup_err_p, 3) << "/" << fmt(m_res.sup_err_m, 3)
     << " (need <= 1e-5), mass drift " << fmt(p_res.max_mass_drift, 3)
     << "; doubly KS@t=10 = " << fmt(layers10.doubly_ks.d, 4) << " (need <= 0.02)"
     << "; singly count(w<=2) = " << fmt(layers10.singly_mean, 5) << " vs "
     << fmt(layers10.singly_expected, 5) << " rel " << fmt(singly_rel, 3) << " (need <= 0.02)"
     << "; atom freq@t=3 = " << fmt(layers3.atom_freq, 4) << " vs " << fmt(layers3.atom_expected, 4)
     << " (3se = " << fmt(3 * layers3.atom_se, 4) << ")"
     << "; layer bins within 3se: " << layers10.bins_within_3se << "/" << layers10.bins.size()
     << "; tail ok: " << (layers10.tail_ok ? "yes" : "no");
  r.detail = os.str();
  return r;
}

CriterionResult c10_fixed_point(bool, unsigned) {
  const double res11 = gnm_fixedpoint_residual(1, 1, 5.0, 0.25);
  const double mass11 = GnmDensity(1, 1).mass();
  const double mass23 = GnmDensity(2, 3).mass();
  const bool residual_ok = res11 <= 1e-8;
  const bool mass11_ok = mass11 <= 1.0 + 1e-10;
  const bool mass23_ok = mass23 <= 1.0 / 6.0 + 1e-10;
  CriterionResult r;
  r.pass = residual_ok && mass11_ok && mass23_ok;
  r.detail = "fixed-point residual(1,1) on [0,5]^2 = " + fmt(res11, 3) +
             " (need <= 1e-8); mass g_{1,1} = " + fmt(mass11, 6) +
             " vs bound 1 (" + (mass11_ok ? "ok" : "FAIL") + "), mass g_{2,3} = " +
             fmt(mass23, 6) + " vs bound 1/6 = " + fmt(1.0 / 6, 6) + " (" +
             (mass23_ok ? "ok" : "FAIL") + ")";
  return r;
}

CriterionResult c11_l2_rate(bool quick, unsigned threads) {
  const size_t reps = quick ? 50 : 200;
  auto rep = convergence_study([](double L, double l, double, bool) { return L * l; },
                               {10.0, 20.0, 40.0, 80.0}, reps, 0.5, 1111, threads);
  CriterionResult r;
  const double slope = rep.mse_fit.slope;
  r.pass = slope >= -1.4 && slope <= -0.6;
  std::ostringstream os;
  os << "f = h, " << reps << " replicates; MSE(t) =";
  for (const auto& p : rep.points) os << " " << fmt(p.mse, 3) << "@t=" << p.t;
  os << "; log-log slope = " << fmt(slope, 4) << " (need in [-1.4,-0.6]), R^2 = "
     << fmt(rep.mse_fit.r2, 4);
  r.detail = os.str();
  return r;
}

CriterionResult c12_fusion_on_branch(bool quick, unsigned threads) {
  const size_t seeds = quick ? 3 : 10;
  const uint64_t events = quick ? 2000 : 10000;
  std::vector<size_t> bad(seeds);
  parallel_for(
      seeds,
      [&](size_t i) {
        NetworkState st(i + 1);
        st.advance(Until::n_events(events));
        bad[i] = st.fusion_on_branch_violations();
      },
      threads);
  size_t total = 0;
  for (size_t b : bad) total += b;
  CriterionResult r;
  r.pass = total == 0;
  r.detail = std::to_string(seeds) + " geometric runs x " + std::to_string(events) +
             " events; fusion points off traced segments: " + std::to_string(total) + " (need 0)";
  return r;
}

}  // namespace

const char* criterion_name(int id) {
  switch (id) {
    case 1: return "surface law <Z_t,h>/t^2 -> 1/2 with pathwise bound";
    case 2: return "count law <Z_t,1>/t^2 -> Pi(1)/2";
    case 3: return "stationary density marginals (KS)";
    case 4: return "geometry-rectangle equivalence under shared streams";
    case 5: return "spine-stick coupling inequalities";
    case 6: return "many-to-one h-transform consistency";
    case 7: return "stick freezing-time tail shape";
    case 8: return "volterra function u: iteration vs closed form";
    case 9: return "immigration layers vs closed-form age laws";
    case 10: return "stationary density fixed point and mass bound";
    case 11: return "L2 convergence rate (MSE slope)";
    case 12: return "fusion points lie on traced segments";
  }
  return "unknown";
}

std::vector<int> criterion_ids(bool quick) {
  if (quick) return {1, 2, 3, 4, 5, 8, 9};
  return {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
}

CriterionResult run_criterion(int id, bool quick, unsigned threads) {
  CriterionResult r;
  switch (id) {
    case 1: r = c1_surface_law(quick, threads); break;
    case 2: r = c2_count_law(quick, threads); break;
    case 3: r = c3_stationary_density(quick, threads); break;
    case 4: r = c4_equivalence(quick, threads); break;
    case 5: r = c5_coupling(quick, threads); break;
    case 6: r = c6_many_to_one(quick, threads); break;
    case 7: r = c7_freezing_tail(quick, threads); break;
    case 8: r = c8_volterra(quick, threads); break;
    case 9: r = c9_immigration(quick, threads); break;
    case 10: r = c10_fixed_point(quick, threads); break;
    case 11: r = c11_l2_rate(quick, threads); break;
    case 12: r = c12_fusion_on_branch(quick, threads); break;
    default: r.detail = "unknown criterion"; break;
  }
  r.id = id;
  r.name = criterion_name(id);
  return r;
}

}  // namespace rectnet
