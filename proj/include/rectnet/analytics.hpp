#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rectnet/network.hpp"
#include "rectnet/rectangles.hpp"
#include "rectnet/series.hpp"
#include "rectnet/stats.hpp"

namespace rectnet {

struct PiMcReport {
  double estimate = 0.0;
  double se = 0.0;
  size_t paths = 0;
  size_t truncated = 0;     // contributions dropped by the h floor
  double h_floor = 0.0;
  bool variance_warning = false;  // no truncation requested
};

// Monte Carlo Pi(f): (L, l) sampled from the size-biased exponential x e^{-x}
// in both coordinates, the spine run to freezing, and f(Y_tau)/h(Y_tau)
// averaged. f takes (len, wid, age); at freezing age = len.
PiMcReport pi_estimate_mc(const std::function<double(double, double, double)>& f, size_t n,
                          uint64_t seed, double h_floor = 0.0, unsigned threads = 0);

struct ConvergencePoint {
  double t = 0.0;
  double mean = 0.0;
  double se = 0.0;
  double mse = 0.0;
  size_t reps = 0;
};

struct ConvergenceReport {
  std::vector<ConvergencePoint> points;
  double limit = 0.0;
  LinearFit mse_fit;  // log MSE against log t
  std::vector<double> fit_residuals;
};

// Replicated estimates of <Z_t, f>/t^2 on the grid with MSE against the
// limit and a log-log slope fit. One simulation per replicate, snapshotted
// at every grid time. f sees (len, wid, age, frozen), finite support.
ConvergenceReport convergence_study(const std::function<double(double, double, double, bool)>& f,
                                    const std::vector<double>& t_grid, size_t reps, double limit,
                                    uint64_t seed, unsigned threads = 0);

struct SmallFragmentPoint {
  double eps = 0.0;
  double mean_count = 0.0;
  double se = 0.0;
  double fraction = 0.0;         // mean count / mean <Z_t,1>
  double series_fraction = 0.0;  // mass of g on {L*l < eps} / Pi(1)
  double shape_ratio = 0.0;      // mean count / (eps log(1+1/eps))
};

std::vector<SmallFragmentPoint> small_fragments(const std::vector<double>& eps_grid, double t,
                                                size_t reps, uint64_t seed,
                                                unsigned threads = 0);

// Mass of the stationary density below surface eps, by termwise quadrature.
double g_mass_below_surface(double eps, double tol = 1e-12);

struct TreeStats {
  std::vector<uint64_t> nodes;          // index 0 = generation 1
  std::vector<uint64_t> leaves;
  std::vector<double> leaf_fraction;
  std::vector<uint64_t> thresholds;     // subtree-size thresholds (powers of two)
  std::vector<double> subtree_survival; // P(subtree size >= threshold), uniform node
};

TreeStats tree_stats(const Population& pop);
TreeStats tree_stats(const NetworkState& net);

struct GofReport {
  KsResult len;
  KsResult wid;
  Chi2Result chi2_len;
  size_t samples = 0;
};

// Frozen-rectangle marginals against the normalized marginals of g.
GofReport gof_frozen_marginals(const std::vector<double>& lens, const std::vector<double>& wids,
                               double tol = 1e-12);

}  // namespace rectnet
