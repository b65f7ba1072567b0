#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rectnet/rng.hpp"

namespace rectnet {

// Size-biased typical rectangle (L, l, a). Surface L*l never increases.
struct SpineState {
  double len = 1.0;
  double wid = 1.0;
  double age = 0.0;
  bool frozen = false;
};

// One-dimensional stick with aging: (L, a), frozen when a reaches L.
struct StickState {
  double len = 1.0;
  double age = 0.0;
  bool frozen = false;
};

// One exponential clock tick. Returns the time consumed; the state either
// freezes (age = len) or jumps with the size-biased fragment choice and age
// reset to zero. Two draws per jump: the clock and the fragment coin.
double spine_step(SpineState& s, Stream& rng);
double stick_step(StickState& s, Stream& rng);

SpineState spine_at(SpineState z, double t, Stream& rng);
// Runs to freezing; returns tau and leaves the frozen state in z.
double spine_freeze(SpineState& z, Stream& rng, uint64_t max_events = 1000000);
double stick_freeze(StickState& z, Stream& rng, uint64_t max_events = 1000000);

struct StickJump {
  double t;     // path-local time of the jump
  double len;   // new length
  bool left;    // aged fragment picked (length = age before reboot)
};
struct StickPath {
  std::vector<StickJump> jumps;
  double tau = 0.0;
  double final_len = 0.0;
};
StickPath stick_path(double len, double age, Stream& rng, uint64_t max_events = 1000000);

// Pathwise coupling of the spine with two independent sticks. The spine is
// reconstructed from the stick paths by alternating dimensions at their
// left-fragment selections; the reported freeze sizes are tracked by the
// dimension that drives them (the coordinates of Y swap at every switch).
struct CouplingRecord {
  double tau = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double side1 = 0.0;        // final size of the dimension-1 driven side (L_tau)
  double side2 = 0.0;        // final size of the dimension-2 driven side (l_tau)
  double stick1_final = 0.0; // L^1_{tau_1}
  double stick2_final = 0.0; // L^2_{tau_2}
  int frozen_dim = 1;
  bool ineq_ok = false;      // tau <= tau1+tau2, side1 >= stick1, side2 >= stick2
};
CouplingRecord couple(double len, double wid, double age, Stream& dim1, Stream& dim2);

struct SurvivalCurve {
  std::vector<double> t;
  std::vector<double> p;
  std::vector<double> lo;
  std::vector<double> hi;
  size_t paths = 0;
};
enum class TailKind { Stick, Spine };
// Empirical P(tau > t) on the grid with Wilson bands. The spine variant
// starts from the square (len, len, 0).
SurvivalCurve freezing_tail(double len, const std::vector<double>& grid, size_t n,
                            TailKind kind, uint64_t seed);

struct HarmonicMomentReport {
  double estimate = 0.0;
  double se = 0.0;
  double oracle = 0.0;     // independent skeleton-chain sampler of the kernel v
  double oracle_se = 0.0;
  double bound = 0.0;      // f(L)/L e^{-L} + 2e sup|f|
  bool within_bound = false;
  double agree_z = 0.0;    // |estimate - oracle| / pooled se
};
// Monte Carlo E_{(L,0)}[ f(L_tau) / L_tau ] for the stick, with the analytic
// upper bound and a kernel-chain cross-check.
HarmonicMomentReport harmonic_moment(double len, const std::function<double(double)>& f,
                                     double f_sup, size_t n, uint64_t seed);

struct VolterraTable {
  std::vector<double> x;
  std::vector<double> closed;    // 1 + 2 int_0^x exp(1 - e^{-y}) dy
  std::vector<double> iterated;  // fixed point of the kernel e^{-y}+e^{-(x-y)}
  double sup_diff = 0.0;
  size_t iterations = 0;
};
VolterraTable volterra_u(double x_max, double step);

struct ManyToOneReport {
  double spine_est = 0.0;
  double spine_se = 0.0;
  double direct_est = 0.0;
  double direct_se = 0.0;
  double z = 0.0;  // |A - B| / pooled se
  size_t paths = 0;
  bool small_sample_warning = false;
};
// h-transform consistency: h(z) E_z[f(Y_t)/h(Y_t)] against the branching
// population mean of <Z_t, f>, with f given as f(len, wid, age).
ManyToOneReport many_to_one_check(SpineState z, double t,
                                  const std::function<double(double, double, double)>& f,
                                  size_t n, uint64_t seed, unsigned threads = 0);

struct FreezeSample {
  double len = 0.0;
  double wid = 0.0;
  double tau = 0.0;
};
std::vector<FreezeSample> spine_freeze_sample(double len, double wid, size_t n, uint64_t seed);

}  // namespace rectnet
