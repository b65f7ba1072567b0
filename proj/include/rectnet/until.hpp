#pragma once

#include <cstdint>

namespace rectnet {

// Simulation budget: a number of branching events or a time horizon.
struct Until {
  enum class Kind { Events, Time } kind = Kind::Time;
  uint64_t events = 0;
  double t = 0.0;
  static Until n_events(uint64_t n) { return {Kind::Events, n, 0.0}; }
  static Until t_max(double t) { return {Kind::Time, 0, t}; }
};

}  // namespace rectnet
