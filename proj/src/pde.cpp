#include "rectnet/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rectnet/parallel.hpp"
#include "rectnet/rectangles.hpp"
#include "rectnet/series.hpp"

namespace rectnet {

double AgeLaw::total_mass() const {
  double m = 0.0;
  for (size_t i = 0; i + 1 < nodes.size(); ++i)
    m += (nodes[i + 1] - nodes[i]) * (density[i] + density[i + 1]) / 2;
  for (const auto& a : atoms) m += a.mass;
  return m;
}

double AgeLaw::density_at(double a) const {
  if (nodes.empty() || a < nodes.front() || a > nodes.back()) return 0.0;
  const size_t i = std::min(
      nodes.size() - 2,
      static_cast<size_t>(std::max(0.0, std::floor((a - nodes.front()) / step))));
  const double w = (a - nodes[i]) / (nodes[i + 1] - nodes[i]);
  return density[i] * (1 - w) + density[i + 1] * w;
}

namespace {
std::vector<double> uniform_nodes(double hi, double step) {
  const size_t n = static_cast<size_t>(std::ceil(hi / step - 1e-12));
  std::vector<double> nodes(n + 1);
  for (size_t i = 0; i <= n; ++i) nodes[i] = i * step;
  return nodes;
}
}  // namespace

AgeLaw p_eval(double t, double step) {
  AgeLaw law;
  law.t = t;
  law.step = step;
  if (t <= 0) {
    law.nodes = {0.0};
    law.density = {0.0};
    law.atoms.push_back({0.0, 1.0});
    return law;
  }
  law.nodes = uniform_nodes(t, step);
  law.density.resize(law.nodes.size());
  // tabulate the left limit at the support edge so the trapezoid mass closes
  for (size_t i = 0; i < law.nodes.size(); ++i)
    law.density[i] = law.nodes[i] <= t ? std::exp(-law.nodes[i]) : 0.0;
  law.atoms.push_back({t, std::exp(-t)});
  return law;
}

AgeLaw m_eval(double t, double l, double step) {
  AgeLaw law;
  law.t = t;
  law.step = step;
  if (l > t) {  // empty law
    law.nodes = {0.0};
    law.density = {0.0};
    return law;
  }
  const double s = t - l;
  law.nodes = uniform_nodes(std::max(s, step), step);
  law.density.resize(law.nodes.size(), 0.0);
  for (size_t i = 0; i < law.nodes.size(); ++i) {
    const double a = law.nodes[i];
    if (a <= s) law.density[i] = (2.0 + (s - a)) * std::exp(-l - a);
  }
  law.atoms.push_back({s, std::exp(-t)});
  return law;
}

double m_total_mass(double t, double l) {
  if (l > t) return 0.0;
  return (1.0 + (t - l)) * std::exp(-l);
}

CharacteristicsResult characteristics_solve(PdeWhich which, double t_max, double step,
                                            double l) {
  if (!(step > 0) || step > 1e-3 * t_max)
    throw std::invalid_argument("step must satisfy step <= 1e-3 * t_max");
  const size_t n_steps = static_cast<size_t>(std::llround(t_max / step));
  const double h = step;
  const double decay = std::exp(-h);
  const double w = (1.0 - decay) / h;  // deposited cell average per unit inflow

  // cell averages over [j h, (j+1) h); transport is an exact shift + decay
  std::vector<double> pc(n_steps + 1, 0.0), mc(n_steps + 1, 0.0);
  AgeAtom p_atom{0.0, 1.0};
  std::vector<AgeAtom> m_atoms;
  double p_mass = 1.0, m_mass = 0.0;

  // one-sided read of the p density: behind the support front the cells are
  // exact averages, so linear inter/extrapolation from the two highest filled
  // cells is second-order accurate
  auto p_read = [&](double age, size_t filled) {
    if (filled < 2) return 0.0;
    const double x = age / h - 0.5;
    long i = static_cast<long>(std::floor(x));
    const long last = static_cast<long>(filled) - 1;
    if (i + 1 > last) i = last - 1;
    if (i < 0) i = 0;
    const double fr = x - static_cast<double>(i);
    return pc[i] * (1 - fr) + pc[i + 1] * fr;
  };

  CharacteristicsResult res;
  double t = 0.0;
  bool m_atom_injected = false;
  for (size_t k = 0; k < n_steps; ++k) {
    const double t_old = t;
    t += h;
    for (size_t j = pc.size() - 1; j >= 1; --j) pc[j] = pc[j - 1] * decay;
    p_atom.pos += h;
    p_atom.mass *= decay;
    // renewal boundary of p: the inflow rate equals the total mass, which is
    // conserved and equal to one; deposited exactly over the new cell
    pc[0] = w * 1.0;
    p_mass = decay * p_mass + h * pc[0];
    double check = p_atom.mass;
    for (double c : pc) check += h * c;
    res.max_mass_drift = std::max(res.max_mass_drift, std::abs(check - 1.0));

    if (which == PdeWhich::M) {
      for (size_t j = mc.size() - 1; j >= 1; --j) mc[j] = mc[j - 1] * decay;
      for (auto& a : m_atoms) {
        a.pos += h;
        a.mass *= decay;
      }
      // p(l)-source integrated with the exact switch-on at tau = l; behind the
      // front p_tau(l) is constant in tau, so a single read suffices
      double src = 0.0;
      if (t > l - 1e-12) {
        const double tau0 = std::max(t_old, l);
        src = p_read(l, k + 1) * (1.0 - std::exp(-(t - tau0)));
        if (src < 0) src = 0;
      }
      // implicit trapezoid for the mass part, with the atom of p crossing age
      // l injected after the deposit (the jump sits at the step endpoint)
      const double m_old = m_mass;
      const double m_pre = (decay * m_old + h * w * m_old / 2 + src) / (1.0 - h * w / 2);
      mc[0] = w * (m_old + m_pre) / 2 + src / h;
      double inject = 0.0;
      if (!m_atom_injected && t >= l - 1e-12) {
        inject = p_atom.mass;
        m_atoms.push_back({t - l, inject});
        m_atom_injected = true;
      }
      m_mass = m_pre + inject;
    }
  }

  auto cells_to_law = [&](const std::vector<double>& cells, double tt) {
    AgeLaw law;
    law.t = tt;
    law.step = h;
    law.nodes.resize(cells.size());
    law.density = cells;
    for (size_t i = 0; i < cells.size(); ++i) law.nodes[i] = (i + 0.5) * h;
    return law;
  };
  res.p = cells_to_law(pc, t);
  res.p.atoms.push_back(p_atom);
  res.m = cells_to_law(mc, t);
  res.m.atoms = m_atoms;

  for (size_t i = 0; i < pc.size(); ++i) {
    const double a = (i + 0.5) * h;
    if (a >= t_max - 1.5 * h) continue;  // the closed density lives on a < t
    res.sup_err_p = std::max(res.sup_err_p, std::abs(pc[i] - std::exp(-a)));
  }
  res.sup_err_p = std::max(res.sup_err_p, std::abs(p_atom.pos - t_max));
  res.sup_err_p = std::max(res.sup_err_p, std::abs(p_atom.mass - std::exp(-t_max)));
  if (which == PdeWhich::M) {
    const double s = t_max - l;
    for (size_t i = 0; i < mc.size(); ++i) {
      const double a = (i + 0.5) * h;
      if (a >= s - 1.5 * h) continue;
      const double ref = (2.0 + (s - a)) * std::exp(-l - a);
      res.sup_err_m = std::max(res.sup_err_m, std::abs(mc[i] - ref));
    }
    if (m_atoms.empty()) {
      res.sup_err_m = kInf;
    } else {
      res.sup_err_m = std::max(res.sup_err_m, std::abs(m_atoms.back().pos - s));
      res.sup_err_m = std::max(res.sup_err_m, std::abs(m_atoms.back().mass - std::exp(-t_max)));
    }
  }
  return res;
}

namespace {

// E[#{singly-infinite with width in [l1,l2], age in [a1,a2)}] at time t.
double m_bin_expected(double t, double l1, double l2, double a1, double a2) {
  auto a_part = [&](double l) {
    const double s = t - l;
    if (s < a1) return 0.0;
    const double beta = std::min(a2, s);
    if (beta <= a1) return 0.0;
    // int_{a1}^{beta} (2 + s - a) e^{-a} da
    const double ea = std::exp(-a1), eb = std::exp(-beta);
    const double val = (2.0 + s) * (ea - eb) - (ea * (a1 + 1.0) - eb * (beta + 1.0));
    return std::exp(-l) * val;
  };
  // split at the kinks l = t - a2 and l = t - a1
  std::vector<double> cuts = {l1, l2};
  for (double c : {t - a2, t - a1})
    if (c > l1 && c < l2) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  double val = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    val += adaptive_simpson(a_part, cuts[i], cuts[i + 1], 1e-10);
  // atom line a = t - l
  const double lo = std::max(l1, t - a2), hi = std::min(l2, t - a1);
  if (hi > lo) val += std::exp(-t) * (hi - lo);
  return val;
}

}  // namespace

LayerValidationReport mc_layer_validate(double t, size_t reps, uint64_t seed, double width_max,
                                        double l0, double a0, unsigned threads) {
  if (reps < 1000) throw std::invalid_argument("mc_layer_validate needs >= 1e3 replicates");
  const std::vector<double> wedges = {0.0, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> aedges = {0.0, 1.0, 2.0, 4.0, 8.0};

  struct PerRep {
    double doubly_age = 0.0;
    size_t singly_small = 0;
    size_t tail = 0;
    std::vector<size_t> bins;
  };
  std::vector<PerRep> rows(reps);
  const size_t nbins = (wedges.size() - 1) * (aedges.size() - 1);
  parallel_for(
      reps,
      [&](size_t i) {
        Population pop(derive_seed(seed, i, 0x1a7e));
        pop.run(Until::t_max(t));
        PerRep row;
        row.bins.assign(nbins, 0);
        for (const auto& a : pop.snapshot(t)) {
          if (std::isinf(a.len) && std::isinf(a.wid)) {
            row.doubly_age = a.age;
          } else if (std::isinf(a.len)) {
            if (a.wid <= width_max) ++row.singly_small;
            if (a.wid >= l0 && a.age >= a0) ++row.tail;
            for (size_t wi = 0; wi + 1 < wedges.size(); ++wi) {
              if (a.wid < wedges[wi] || a.wid >= wedges[wi + 1]) continue;
              for (size_t ai = 0; ai + 1 < aedges.size(); ++ai) {
                if (a.age >= aedges[ai] && a.age < aedges[ai + 1])
                  ++row.bins[wi * (aedges.size() - 1) + ai];
              }
            }
          }
        }
        rows[i] = std::move(row);
      },
      threads);

  LayerValidationReport rep;
  rep.reps = reps;
  std::vector<double> cont;
  size_t atom_hits = 0;
  for (const auto& r : rows) {
    if (r.doubly_age >= t - 1e-12) {
      ++atom_hits;
    } else {
      cont.push_back(r.doubly_age);
    }
  }
  const double et = std::exp(-t);
  rep.atom_freq = static_cast<double>(atom_hits) / reps;
  rep.atom_expected = et;
  rep.atom_se = std::sqrt(rep.atom_freq * (1 - rep.atom_freq) / reps);
  if (!cont.empty()) {
    rep.doubly_ks = ks_test(cont, [t](double a) {
      return (1.0 - std::exp(-a)) / (1.0 - std::exp(-t));
    });
  }
  {
    std::vector<double> xs(reps);
    for (size_t i = 0; i < reps; ++i) xs[i] = static_cast<double>(rows[i].singly_small);
    auto [m, se] = mean_se(xs);
    rep.singly_mean = m;
    rep.singly_se = se;
    const double w = width_max;
    rep.singly_expected = (1.0 + t) * (1.0 - std::exp(-w)) - (1.0 - (1.0 + w) * std::exp(-w));
  }
  for (size_t wi = 0; wi + 1 < wedges.size(); ++wi) {
    for (size_t ai = 0; ai + 1 < aedges.size(); ++ai) {
      LayerBin b;
      b.l1 = wedges[wi];
      b.l2 = wedges[wi + 1];
      b.a1 = aedges[ai];
      b.a2 = aedges[ai + 1];
      b.expected = m_bin_expected(t, b.l1, b.l2, b.a1, b.a2);
      std::vector<double> xs(reps);
      for (size_t i = 0; i < reps; ++i)
        xs[i] = static_cast<double>(rows[i].bins[wi * (aedges.size() - 1) + ai]);
      auto [m, se] = mean_se(xs);
      b.observed_mean = m;
      b.observed_se = se;
      b.z = std::abs(m - b.expected) / (se > 0 ? se : 1e-300);
      if (b.z <= 3.0) ++rep.bins_within_3se;
      rep.bins.push_back(b);
    }
  }
  {
    std::vector<double> xs(reps);
    for (size_t i = 0; i < reps; ++i) xs[i] = static_cast<double>(rows[i].tail);
    auto [m, se] = mean_se(xs);
    rep.tail_mean = m;
    rep.tail_se = se;
    rep.tail_bound = t * std::exp(-l0 - a0);
    rep.tail_ok = m <= rep.tail_bound + 3 * se;
  }
  return rep;
}

}  // namespace rectnet
