#pragma once

#include <cstdint>
#include <vector>

#include "rectnet/stats.hpp"

namespace rectnet {

struct AgeAtom {
  double pos = 0.0;
  double mass = 0.0;
};

// Age law = absolutely continuous part tabulated on a uniform grid plus
// point atoms, carried separately end to end.
struct AgeLaw {
  double t = 0.0;
  double step = 0.0;
  std::vector<double> nodes;
  std::vector<double> density;
  std::vector<AgeAtom> atoms;

  double total_mass() const;          // trapezoid + atoms
  double density_at(double a) const;  // linear interpolation, 0 outside
};

// Closed-form age law of the doubly-infinite rectangle:
// e^{-a} on [0,t) plus an atom e^{-t} at a = t.
AgeLaw p_eval(double t, double step = 1e-3);
// Closed-form mean (width, age) law of singly-infinite rectangles at width l:
// (2+(t-a-l)) e^{-l-a} on [0, t-l] plus an atom e^{-t} at a = t-l.
AgeLaw m_eval(double t, double l, double step = 1e-3);

double m_total_mass(double t, double l);  // (1+(t-l)) e^{-l} for l <= t

enum class PdeWhich { P, M };

struct CharacteristicsResult {
  AgeLaw p;
  AgeLaw m;
  double max_mass_drift = 0.0;  // max |mass(p) - 1| over steps
  double sup_err_p = 0.0;       // against the closed form at t_max
  double sup_err_m = 0.0;
};

// Upwind integration along characteristics with exact exponential decay per
// step and the renewal boundary condition closed implicitly through the
// trapezoid mass. For M the boundary source includes p_t(l) and the atom of p
// crossing age l injects the atom of m.
CharacteristicsResult characteristics_solve(PdeWhich which, double t_max, double step,
                                            double l = 1.0);

struct LayerBin {
  double l1, l2, a1, a2;
  double expected = 0.0;
  double observed_mean = 0.0;
  double observed_se = 0.0;
  double z = 0.0;
};

struct LayerValidationReport {
  size_t reps = 0;
  KsResult doubly_ks;         // continuous ages vs the conditional CDF of p
  double atom_freq = 0.0;     // fraction of runs still in the initial state
  double atom_expected = 0.0; // e^{-t}
  double atom_se = 0.0;
  double singly_mean = 0.0;   // # singly-infinite with width <= width_max
  double singly_expected = 0.0;
  double singly_se = 0.0;
  std::vector<LayerBin> bins;
  size_t bins_within_3se = 0;
  double tail_mean = 0.0;     // #{L = inf, l >= l0, a >= a0}
  double tail_bound = 0.0;    // t e^{-l0-a0}
  double tail_se = 0.0;
  bool tail_ok = false;
};

LayerValidationReport mc_layer_validate(double t, size_t reps, uint64_t seed,
                                        double width_max = 2.0, double l0 = 1.0,
                                        double a0 = 1.0, unsigned threads = 0);

}  // namespace rectnet
