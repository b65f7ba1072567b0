// Command-line front end: simulation, analytics and validation runs with
// reproducible manifests.
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rectnet/acceptance.hpp"
#include "rectnet/analytics.hpp"
#include "rectnet/io.hpp"
#include "rectnet/manifest.hpp"
#include "rectnet/network.hpp"
#include "rectnet/parallel.hpp"
#include "rectnet/pde.hpp"
#include "rectnet/rectangles.hpp"
#include "rectnet/series.hpp"
#include "rectnet/spine.hpp"
#include "rectnet/stats.hpp"

#include <json.hpp>

using namespace rectnet;

namespace {

struct Common {
  uint64_t seed = 1;
  std::string out = "out";
  unsigned threads = 0;
  std::string format = "csv,jsonl,svg";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "run seed")->envname("RECTNET_SEED");
  cmd->add_option("--out", c.out, "output directory")->envname("RECTNET_OUT");
  cmd->add_option("--threads", c.threads, "worker threads (0 = auto)")
      ->envname("RECTNET_THREADS");
  cmd->add_option("--format", c.format, "output formats to write (csv,jsonl,svg)")
      ->envname("RECTNET_FORMAT");
}

bool wants(const Common& c, const std::string& fmt) {
  return c.format.find(fmt) != std::string::npos;
}

std::vector<double> parse_grid(const std::string& spec) {
  // "a:b:step" or comma-separated values
  std::vector<double> g;
  if (spec.find(':') != std::string::npos) {
    double a, b, s;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3 || s <= 0)
      throw CLI::ValidationError("--grid", "expected a:b:step");
    for (double x = a; x <= b + 1e-12; x += s) g.push_back(x);
    return g;
  }
  std::string rest = spec;
  size_t pos;
  while ((pos = rest.find(',')) != std::string::npos) {
    g.push_back(std::stod(rest.substr(0, pos)));
    rest = rest.substr(pos + 1);
  }
  if (!rest.empty()) g.push_back(std::stod(rest));
  return g;
}

Until make_until(double t_max, uint64_t events_max) {
  return events_max > 0 ? Until::n_events(events_max) : Until::t_max(t_max);
}

void write_frozen_histograms(const Population& pop, double t, const std::string& path,
                             size_t bins) {
  std::vector<double> lens, wids;
  for (const auto& a : pop.snapshot(t)) {
    if (a.frozen && std::isfinite(a.len) && std::isfinite(a.wid)) {
      lens.push_back(a.len);
      wids.push_back(a.wid);
    }
  }
  const auto edges = geometric_bin_edges(0.01, 12.0, bins);
  const auto cl = histogram_counts(lens, edges);
  const auto cw = histogram_counts(wids, edges);
  const GnmDensity g(1, 1);
  CsvWriter csv(path);
  std::string edge_list;
  for (double e : edges) edge_list += fmt_double(e) + " ";
  csv.comment("frozen rectangle marginals at t = " + fmt_double(t) +
              ", n = " + std::to_string(lens.size()));
  csv.comment("bin edges (length units): " + edge_list);
  csv.row({"bin_lo", "bin_hi", "count_L", "count_l", "model_L", "model_l"});
  const double n = static_cast<double>(lens.size());
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    const double pl = g.marginal_len_cdf(edges[i + 1]) - g.marginal_len_cdf(edges[i]);
    const double pw = g.marginal_wid_cdf(edges[i + 1]) - g.marginal_wid_cdf(edges[i]);
    csv.row({csv_cell(edges[i]), csv_cell(edges[i + 1]), std::to_string(cl[i]),
             std::to_string(cw[i]), csv_cell(n * pl), csv_cell(n * pw)});
  }
}

int cmd_simulate_network(const Common& c, double t_max, uint64_t events_max,
                         const std::string& policy, double left_prob, bool check) {
  RunManifest man(c.out, "simulate-network");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("t_max", fmt_double(t_max));
  man.set_option("events_max", std::to_string(events_max));
  man.set_option("policy", policy);
  man.set_option("left_prob", fmt_double(left_prob));
  man.set_option("format", c.format);
  man.write_started();
  try {
    auto pol = parse_policy(policy);
    if (!pol) throw std::invalid_argument("unknown policy: " + policy);
    NetworkState st(c.seed, *pol, left_prob);
    st.advance(make_until(t_max, events_max));
    const double t = std::isfinite(st.horizon()) ? st.horizon() : t_max;
    if (wants(c, "jsonl")) {
      const std::string jsonl = man.path_in_dir("branches.jsonl");
      st.write_jsonl(jsonl);
      man.add_output(jsonl);
    }
    if (wants(c, "svg")) {
      const std::string svg = man.path_in_dir("network.svg");
      st.render_svg(svg, t);
      man.add_output(svg);
    }
    if (check && *pol == BranchPolicy::RightOnly) {
      auto rep = st.point_location_check(t, 10000, c.seed);
      const double area = st.clipped_area_sum(t);
      nlohmann::ordered_json j;
      j["samples"] = rep.samples;
      j["interior_once"] = rep.interior_once;
      j["on_edge"] = rep.on_edge;
      j["bad"] = rep.bad;
      j["clipped_area_sum"] = area;
      j["triangle_area"] = t * t / 2;
      j["fusion_violations"] = st.fusion_on_branch_violations();
      j["crossings"] = st.count_crossings(t);
      const std::string rp = man.path_in_dir("network_checks.json");
      write_text_file(rp, j.dump(2) + "\n");
      man.add_output(rp);
    }
    std::printf("simulate-network: %llu events, %zu branches, horizon %s\n",
                (unsigned long long)st.events_processed(), st.records().size(),
                fmt_double(st.horizon()).c_str());
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_simulate_rectangles(const Common& c, double t_max, uint64_t events_max, size_t bins) {
  RunManifest man(c.out, "simulate-rectangles");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("t_max", fmt_double(t_max));
  man.set_option("events_max", std::to_string(events_max));
  man.set_option("bins", std::to_string(bins));
  man.set_option("format", c.format);
  man.write_started();
  try {
    Population pop(c.seed);
    pop.run(make_until(t_max, events_max));
    const double t = std::isfinite(pop.horizon()) ? pop.horizon() : t_max;
    if (wants(c, "jsonl")) {
      const std::string jsonl = man.path_in_dir("rectangles.jsonl");
      pop.write_jsonl(jsonl, t);
      man.add_output(jsonl);
    }
    const std::string hist = man.path_in_dir("frozen_histograms.csv");
    write_frozen_histograms(pop, t, hist, bins);
    man.add_output(hist);
    nlohmann::ordered_json j;
    j["events"] = pop.events_processed();
    j["records"] = pop.records().size();
    j["finite_count"] = pop.finite_count(t);
    j["finite_surface"] = pop.finite_surface(t);
    j["surface_bound_ok"] = pop.min_surface_gap() >= 0.0;
    j["doubly_unique_ok"] = pop.doubly_unique_ok();
    const std::string sp = man.path_in_dir("summary.json");
    write_text_file(sp, j.dump(2) + "\n");
    man.add_output(sp);
    std::printf("simulate-rectangles: %llu events, %zu records, <Z,1> = %zu\n",
                (unsigned long long)pop.events_processed(), pop.records().size(),
                pop.finite_count(t));
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_spine(const Common& c, double len, double wid, size_t samples, bool m2o, double t,
              size_t n) {
  RunManifest man(c.out, "spine");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("len", fmt_double(len));
  man.set_option("wid", fmt_double(wid));
  man.set_option("samples", std::to_string(samples));
  man.write_started();
  try {
    auto xs = spine_freeze_sample(len, wid, samples, c.seed);
    const std::string sp = man.path_in_dir("spine_freeze_samples.csv");
    {
      CsvWriter csv(sp);
      csv.comment("spine freeze samples from (" + fmt_double(len) + ", " + fmt_double(wid) +
                  ", 0); columns in length/time units");
      csv.row({"L_tau", "l_tau", "tau"});
      for (const auto& s : xs) csv.row({csv_cell(s.len), csv_cell(s.wid), csv_cell(s.tau)});
    }
    man.add_output(sp);
    if (m2o) {
      auto rep = many_to_one_check({len, wid, 0.0, false}, t,
                                   [](double L, double w, double) { return L * w; }, n, c.seed,
                                   c.threads);
      nlohmann::ordered_json j;
      j["f"] = "h";
      j["t"] = t;
      j["paths"] = rep.paths;
      j["spine_estimate"] = rep.spine_est;
      j["spine_se"] = rep.spine_se;
      j["direct_estimate"] = rep.direct_est;
      j["direct_se"] = rep.direct_se;
      j["z"] = rep.z;
      const std::string mp = man.path_in_dir("many_to_one.json");
      write_text_file(mp, j.dump(2) + "\n");
      man.add_output(mp);
    }
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_stick(const Common& c, double len, size_t paths, const std::string& grid_spec,
              bool harmonic, bool volterra) {
  RunManifest man(c.out, "stick");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("len", fmt_double(len));
  man.set_option("paths", std::to_string(paths));
  man.set_option("grid", grid_spec);
  man.write_started();
  try {
    auto grid = parse_grid(grid_spec);
    auto curve = freezing_tail(len, grid, paths, TailKind::Stick, c.seed);
    const std::string sp = man.path_in_dir("stick_survival.csv");
    {
      CsvWriter csv(sp);
      csv.comment("stick freezing-time survival from (" + fmt_double(len) +
                  ", 0) with Wilson 95% bands; " + std::to_string(paths) + " paths");
      csv.row({"t", "survival", "wilson_lo", "wilson_hi"});
      for (size_t i = 0; i < curve.t.size(); ++i)
        csv.row({csv_cell(curve.t[i]), csv_cell(curve.p[i]), csv_cell(curve.lo[i]),
                 csv_cell(curve.hi[i])});
    }
    man.add_output(sp);
    if (volterra) {
      auto tab = volterra_u(5.0, 1e-3);
      CsvWriter csv(man.path_in_dir("u_table.csv"));
      csv.comment("comparison function u: closed form vs kernel iteration, sup diff " +
                  fmt_double(tab.sup_diff));
      csv.row({"x", "u_closed", "u_iter"});
      for (size_t i = 0; i < tab.x.size(); i += 10)
        csv.row({csv_cell(tab.x[i]), csv_cell(tab.closed[i]), csv_cell(tab.iterated[i])});
      man.add_output(man.path_in_dir("u_table.csv"));
    }
    if (harmonic) {
      auto rep = harmonic_moment(len, [](double) { return 1.0; }, 1.0, paths, c.seed);
      nlohmann::ordered_json j;
      j["f"] = "1";
      j["estimate"] = rep.estimate;
      j["se"] = rep.se;
      j["kernel_chain_oracle"] = rep.oracle;
      j["oracle_se"] = rep.oracle_se;
      j["bound"] = rep.bound;
      j["within_bound"] = rep.within_bound;
      j["agreement_z"] = rep.agree_z;
      const std::string hp = man.path_in_dir("harmonic_moment.json");
      write_text_file(hp, j.dump(2) + "\n");
      man.add_output(hp);
    }
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_couple(const Common& c, double len, double wid, double age, size_t paths) {
  RunManifest man(c.out, "couple");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("len", fmt_double(len));
  man.set_option("wid", fmt_double(wid));
  man.set_option("age", fmt_double(age));
  man.set_option("paths", std::to_string(paths));
  man.write_started();
  try {
    const std::string sp = man.path_in_dir("coupling.csv");
    size_t violations = 0;
    {
      CsvWriter csv(sp);
      csv.comment("spine-stick coupling records from (" + fmt_double(len) + ", " +
                  fmt_double(wid) + ", " + fmt_double(age) + ")");
      csv.row({"tau", "tau1", "tau2", "L_tau", "l_tau", "stick1_final", "stick2_final",
               "frozen_dim", "ineq_ok"});
      for (size_t i = 0; i < paths; ++i) {
        Stream d1(replicate_key(c.seed, i, 1)), d2(replicate_key(c.seed, i, 2));
        auto rec = couple(len, wid, age, d1, d2);
        if (!rec.ineq_ok) ++violations;
        csv.row({csv_cell(rec.tau), csv_cell(rec.tau1), csv_cell(rec.tau2), csv_cell(rec.side1),
                 csv_cell(rec.side2), csv_cell(rec.stick1_final), csv_cell(rec.stick2_final),
                 std::to_string(rec.frozen_dim), rec.ineq_ok ? "1" : "0"});
      }
    }
    man.add_output(sp);
    std::printf("couple: %zu paths, %zu inequality violations\n", paths, violations);
    man.finalize(true);
    return violations == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_density(const Common& c, const std::string& grid_spec, double tol, int n, int m,
                size_t mc_paths) {
  RunManifest man(c.out, "density");
  man.set_option("grid", grid_spec);
  man.set_option("tol", fmt_double(tol));
  man.set_option("n", std::to_string(n));
  man.set_option("m", std::to_string(m));
  man.write_started();
  try {
    auto grid = parse_grid(grid_spec);
    const GnmDensity g(n, m, tol);
    const std::string dp = man.path_in_dir("density.csv");
    {
      CsvWriter csv(dp);
      csv.comment("stationary density g_{" + std::to_string(n) + "," + std::to_string(m) +
                  "} on the grid (L, l in length units), series tolerance " + fmt_double(tol));
      csv.row({"L", "l", "g"});
      for (double L : grid)
        for (double l : grid) csv.row({csv_cell(L), csv_cell(l), csv_cell(g(L, l))});
    }
    man.add_output(dp);
    auto pm = pi_moments(tol);
    nlohmann::ordered_json j;
    j["mass"] = g.mass();
    j["pi_one"] = pm.pi_one;
    j["pi_h"] = pm.pi_h;
    j["limit_constant"] = pm.limit;
    j["fixed_point_residual"] = gnm_fixedpoint_residual(n, m, 5.0, 0.25, tol);
    if (mc_paths > 0) {
      auto mc = pi_estimate_mc([](double, double, double) { return 1.0; }, mc_paths, c.seed,
                               1e-4, c.threads);
      j["pi_one_mc"] = mc.estimate;
      j["pi_one_mc_se"] = mc.se;
      j["pi_one_mc_paths"] = mc.paths;
    }
    const std::string mp = man.path_in_dir("pi_moments.json");
    write_text_file(mp, j.dump(2) + "\n");
    man.add_output(mp);
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_pde(const Common& c, const std::string& which, double l, double t_max, double step,
            bool mc, size_t reps) {
  RunManifest man(c.out, "pde");
  man.set_option("which", which);
  man.set_option("l", fmt_double(l));
  man.set_option("t_max", fmt_double(t_max));
  man.set_option("step", fmt_double(step));
  man.write_started();
  try {
    const PdeWhich w = (which == "m") ? PdeWhich::M : PdeWhich::P;
    auto res = characteristics_solve(w, t_max, step, l);
    auto dump = [&](const AgeLaw& law, const std::string& name) {
      CsvWriter csv(man.path_in_dir(name));
      csv.comment("age law at t = " + fmt_double(law.t) + " (ages in time units)");
      csv.row({"age", "density"});
      for (size_t i = 0; i < law.nodes.size(); ++i)
        csv.row({csv_cell(law.nodes[i]), csv_cell(law.density[i])});
      csv.row({});
      for (const auto& a : law.atoms) csv.row({"atom@" + fmt_double(a.pos), csv_cell(a.mass)});
      man.add_output(man.path_in_dir(name));
    };
    dump(res.p, "pde_p.csv");
    if (w == PdeWhich::M) dump(res.m, "pde_m.csv");
    nlohmann::ordered_json j;
    j["sup_err_p"] = res.sup_err_p;
    j["sup_err_m"] = res.sup_err_m;
    j["max_mass_drift"] = res.max_mass_drift;
    if (mc) {
      auto layers = mc_layer_validate(t_max, reps, c.seed, 2.0, 1.0, 1.0, c.threads);
      j["doubly_ks_d"] = layers.doubly_ks.d;
      j["doubly_ks_p"] = layers.doubly_ks.p;
      j["atom_freq"] = layers.atom_freq;
      j["atom_expected"] = layers.atom_expected;
      j["singly_mean"] = layers.singly_mean;
      j["singly_expected"] = layers.singly_expected;
      j["bins_within_3se"] = layers.bins_within_3se;
      j["bins_total"] = layers.bins.size();
      j["tail_mean"] = layers.tail_mean;
      j["tail_bound"] = layers.tail_bound;
      j["tail_ok"] = layers.tail_ok;
    }
    const std::string rp = man.path_in_dir("pde_report.json");
    write_text_file(rp, j.dump(2) + "\n");
    man.add_output(rp);
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_stats(const Common& c, double t_max) {
  RunManifest man(c.out, "stats");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("t_max", fmt_double(t_max));
  man.write_started();
  try {
    Population pop(c.seed);
    pop.run(Until::t_max(t_max));
    auto ts = tree_stats(pop);
    {
      CsvWriter csv(man.path_in_dir("tree_generations.csv"));
      csv.comment("genealogical tree statistics at t = " + fmt_double(t_max));
      csv.row({"generation", "nodes", "leaves", "leaf_fraction"});
      for (size_t g = 0; g < ts.nodes.size(); ++g)
        csv.row({std::to_string(g + 1), std::to_string(ts.nodes[g]), std::to_string(ts.leaves[g]),
                 csv_cell(ts.leaf_fraction[g])});
      man.add_output(man.path_in_dir("tree_generations.csv"));
    }
    {
      CsvWriter csv(man.path_in_dir("subtree_survival.csv"));
      csv.comment("P(subtree size >= k) for a uniformly chosen node");
      csv.row({"k", "survival"});
      for (size_t i = 0; i < ts.thresholds.size(); ++i)
        csv.row({std::to_string(ts.thresholds[i]), csv_cell(ts.subtree_survival[i])});
      man.add_output(man.path_in_dir("subtree_survival.csv"));
    }
    std::vector<double> lens, wids;
    for (const auto& a : pop.snapshot(t_max)) {
      if (a.frozen && std::isfinite(a.len) && std::isfinite(a.wid)) {
        lens.push_back(a.len);
        wids.push_back(a.wid);
      }
    }
    if (lens.size() >= 100) {
      auto rep = gof_frozen_marginals(lens, wids);
      nlohmann::ordered_json j;
      j["samples"] = rep.samples;
      j["ks_len_d"] = rep.len.d;
      j["ks_len_p"] = rep.len.p;
      j["ks_wid_d"] = rep.wid.d;
      j["ks_wid_p"] = rep.wid.p;
      j["chi2_len_stat"] = rep.chi2_len.stat;
      j["chi2_len_p"] = rep.chi2_len.p;
      write_text_file(man.path_in_dir("gof.json"), j.dump(2) + "\n");
      man.add_output(man.path_in_dir("gof.json"));
    }
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_converge(const Common& c, const std::string& fname, const std::string& grid_spec,
                 size_t reps) {
  RunManifest man(c.out, "converge");
  man.set_option("seed", std::to_string(c.seed));
  man.set_option("f", fname);
  man.set_option("t_grid", grid_spec);
  man.set_option("replicates", std::to_string(reps));
  man.write_started();
  try {
    auto grid = parse_grid(grid_spec);
    std::function<double(double, double, double, bool)> f;
    double limit;
    if (fname == "h") {
      f = [](double L, double l, double, bool) { return L * l; };
      limit = 0.5;
    } else if (fname == "one" || fname == "1") {
      f = [](double, double, double, bool) { return 1.0; };
      limit = pi_moments().limit;
    } else {
      throw std::invalid_argument("unknown test function: " + fname);
    }
    auto rep = convergence_study(f, grid, reps, limit, c.seed, c.threads);
    {
      CsvWriter csv(man.path_in_dir("convergence.csv"));
      csv.comment("<Z_t,f>/t^2 for f = " + fname + ", limit " + fmt_double(limit) + ", " +
                  std::to_string(reps) + " replicates");
      csv.row({"t", "mean", "se", "mse", "replicates"});
      for (const auto& p : rep.points)
        csv.row({csv_cell(p.t), csv_cell(p.mean), csv_cell(p.se), csv_cell(p.mse),
                 std::to_string(p.reps)});
      man.add_output(man.path_in_dir("convergence.csv"));
    }
    nlohmann::ordered_json j;
    j["limit"] = rep.limit;
    j["mse_slope"] = rep.mse_fit.slope;
    j["mse_intercept"] = rep.mse_fit.intercept;
    j["fit_r2"] = rep.mse_fit.r2;
    j["fit_residuals"] = rep.fit_residuals;
    write_text_file(man.path_in_dir("convergence_fit.json"), j.dump(2) + "\n");
    man.add_output(man.path_in_dir("convergence_fit.json"));
    man.finalize(true);
    return 0;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

int cmd_validate(const Common& c, bool quick, int criterion) {
  RunManifest man(c.out, "validate");
  man.set_option("quick", quick ? "true" : "false");
  man.set_option("criterion", std::to_string(criterion));
  man.write_started();
  try {
    std::vector<int> ids = criterion >= 1 ? std::vector<int>{criterion} : criterion_ids(quick);
    bool all = true;
    nlohmann::ordered_json results = nlohmann::ordered_json::array();
    for (int id : ids) {
      auto r = run_criterion(id, quick, c.threads);
      all = all && r.pass;
      std::printf("%s criterion %2d: %s -- %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.detail.c_str());
      std::fflush(stdout);
      nlohmann::ordered_json jr;
      jr["id"] = r.id;
      jr["name"] = r.name;
      jr["pass"] = r.pass;
      jr["detail"] = r.detail;
      results.push_back(jr);
    }
    nlohmann::ordered_json j;
    j["quick"] = quick;
    j["all_pass"] = all;
    j["results"] = results;
    write_text_file(man.path_in_dir("validation.json"), j.dump(2) + "\n");
    man.add_output(man.path_in_dir("validation.json"));
    man.finalize(true);
    return all ? 0 : 1;
  } catch (const std::exception& e) {
    man.finalize(false, e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"growing orthogonal planar network / aging-rectangle branching toolkit"};
  app.require_subcommand(1);

  Common c;

  auto* sn = app.add_subcommand("simulate-network", "event-driven geometric construction");
  add_common(sn, c);
  double sn_tmax = 30.0;
  uint64_t sn_events = 0;
  std::string sn_policy = "right-only";
  double sn_left = 0.5;
  bool sn_check = false;
  sn->add_option("--t-max", sn_tmax, "time horizon");
  sn->add_option("--events-max", sn_events, "branching-event budget (overrides --t-max)");
  sn->add_option("--policy", sn_policy,
                 "right-only | both-annihilate | both-cross | both-priority")
      ->envname("RECTNET_POLICY");
  sn->add_option("--left-prob", sn_left, "lateral side coin for the both-sides variants");
  sn->add_flag("--check", sn_check, "run point-location and area accounting checks");

  auto* sr = app.add_subcommand("simulate-rectangles", "aging-rectangle branching process");
  add_common(sr, c);
  double sr_tmax = 30.0;
  uint64_t sr_events = 0;
  size_t sr_bins = 64;
  sr->add_option("--t-max", sr_tmax, "time horizon");
  sr->add_option("--events-max", sr_events, "branching-event budget (overrides --t-max)");
  sr->add_option("--bins", sr_bins, "histogram bin count")->envname("RECTNET_BINS");

  auto* sp = app.add_subcommand("spine", "size-biased typical rectangle");
  add_common(sp, c);
  double sp_len = 2.0, sp_wid = 1.0, sp_t = 3.0;
  size_t sp_samples = 10000, sp_n = 20000;
  bool sp_m2o = false;
  sp->add_option("--len", sp_len, "initial length");
  sp->add_option("--wid", sp_wid, "initial width");
  sp->add_option("--samples", sp_samples, "freeze samples");
  sp->add_flag("--many-to-one", sp_m2o, "run the h-transform consistency check");
  sp->add_option("--t", sp_t, "many-to-one horizon");
  sp->add_option("--n", sp_n, "many-to-one paths");

  auto* st = app.add_subcommand("stick", "one-dimensional stick fragmentation");
  add_common(st, c);
  double st_len = 10.0;
  size_t st_paths = 100000;
  std::string st_grid = "0:80:5";
  bool st_harm = false;
  st->add_option("--len", st_len, "initial length");
  st->add_option("--paths", st_paths, "paths");
  st->add_option("--grid", st_grid, "survival grid a:b:step");
  st->add_flag("--harmonic", st_harm, "estimate the harmonic freeze moment");
  bool st_volterra = false;
  st->add_flag("--volterra", st_volterra, "tabulate the comparison function u");

  auto* cp = app.add_subcommand("couple", "pathwise spine-stick coupling");
  add_common(cp, c);
  double cp_len = 5.0, cp_wid = 3.0, cp_age = 0.0;
  size_t cp_paths = 10000;
  cp->add_option("--len", cp_len, "initial length");
  cp->add_option("--wid", cp_wid, "initial width");
  cp->add_option("--age", cp_age, "initial age");
  cp->add_option("--paths", cp_paths, "paths");

  auto* de = app.add_subcommand("density", "stationary density series evaluation");
  add_common(de, c);
  std::string de_grid = "0:5:0.1";
  double de_tol = 1e-10;
  int de_n = 1, de_m = 1;
  de->add_option("--grid", de_grid, "evaluation grid a:b:step")->envname("RECTNET_GRID");
  de->add_option("--tol", de_tol, "series truncation tolerance")->envname("RECTNET_TOL");
  de->add_option("--n", de_n, "first series index");
  de->add_option("--m", de_m, "second series index");
  size_t de_mc = 0;
  de->add_option("--mc-pi", de_mc, "cross-check Pi(1) by spinal Monte Carlo with this many paths");

  auto* pd = app.add_subcommand("pde", "transport equations for the immigration layers");
  add_common(pd, c);
  std::string pd_which = "m";
  double pd_l = 1.0, pd_tmax = 10.0, pd_step = 1e-3;
  bool pd_mc = false;
  size_t pd_reps = 10000;
  pd->add_option("--which", pd_which, "p | m");
  pd->add_option("--l", pd_l, "width parameter for m");
  pd->add_option("--t-max", pd_tmax, "horizon");
  pd->add_option("--step", pd_step, "grid step");
  pd->add_flag("--mc", pd_mc, "Monte Carlo layer validation");
  pd->add_option("--replicates", pd_reps, "Monte Carlo replicates");

  auto* ts = app.add_subcommand("stats", "genealogy tree statistics and goodness of fit");
  add_common(ts, c);
  double ts_tmax = 30.0;
  ts->add_option("--t-max", ts_tmax, "time horizon");

  auto* cv = app.add_subcommand("converge", "empirical-measure convergence study");
  add_common(cv, c);
  std::string cv_f = "h", cv_grid = "10,20,40,80";
  size_t cv_reps = 200;
  cv->add_option("--f", cv_f, "test function: h | one");
  cv->add_option("--t-grid", cv_grid, "time grid (comma list or a:b:step)");
  cv->add_option("--replicates", cv_reps, "replicates");

  auto* va = app.add_subcommand("validate", "acceptance suite, one pass/fail line per criterion");
  add_common(va, c);
  bool va_quick = false;
  int va_crit = 0;
  va->add_flag("--quick", va_quick, "criteria 1-5 and 8-9 at reduced replicate counts");
  va->add_option("--criterion", va_crit, "run a single criterion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;  // usage errors exit 2
  }

  if (sn->parsed())
    return cmd_simulate_network(c, sn_tmax, sn_events, sn_policy, sn_left, sn_check);
  if (sr->parsed()) return cmd_simulate_rectangles(c, sr_tmax, sr_events, sr_bins);
  if (sp->parsed()) return cmd_spine(c, sp_len, sp_wid, sp_samples, sp_m2o, sp_t, sp_n);
  if (st->parsed()) return cmd_stick(c, st_len, st_paths, st_grid, st_harm, st_volterra);
  if (cp->parsed()) return cmd_couple(c, cp_len, cp_wid, cp_age, cp_paths);
  if (de->parsed()) return cmd_density(c, de_grid, de_tol, de_n, de_m, de_mc);
  if (pd->parsed()) return cmd_pde(c, pd_which, pd_l, pd_tmax, pd_step, pd_mc, pd_reps);
  if (ts->parsed()) return cmd_stats(c, ts_tmax);
  if (cv->parsed()) return cmd_converge(c, cv_f, cv_grid, cv_reps);
  if (va->parsed()) return cmd_validate(c, va_quick, va_crit);
  return 2;
}
