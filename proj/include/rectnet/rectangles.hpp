#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rectnet/genealogy.hpp"
#include "rectnet/geometry.hpp"
#include "rectnet/rng.hpp"
#include "rectnet/until.hpp"

namespace rectnet {

// Aging rectangle state (L, l, a). Sides may be +inf; a rectangle is frozen
// exactly when a finite length has been fully aged through.
struct Rect {
  double len = kInf;
  double wid = kInf;
  double age = 0.0;
};

// Fragmentation at age a: straight offspring (L-a, l, 0), orthogonal
// offspring (l, a, 0). Requires a finite, non-frozen rectangle.
std::pair<Rect, Rect> branch_finite(double len, double wid, double age);

// Immigration step of the infinite layers: the doubly-infinite rectangle
// emits (inf, delta, 0); a singly-infinite one of width l emits (l, delta, 0).
Rect immigrate_doubly(double delta);
Rect immigrate_singly(double wid, double delta);

struct RectRecord {
  Label label;
  double len = kInf;
  double wid = kInf;
  double birth = 0.0;
  double age0 = 0.0;   // age at creation (nonzero only for a custom root)
  double delta = 0.0;  // exponential clock consumed by this rectangle
  uint32_t parent = kNoParent;
  static constexpr uint32_t kNoParent = 0xffffffffu;

  bool branches() const { return age0 + delta < len; }
  double ring_time() const { return birth + delta; }
  double freeze_time() const { return birth + (len - age0); }  // +inf for infinite length
};

struct PopAtom {
  uint32_t rec = 0;
  double len = 0.0;
  double wid = 0.0;
  double age = 0.0;
  bool frozen = false;
};

enum class Support { FiniteOnly, All };

// Event-driven exact simulation of the branching process of aging rectangles
// with freezing and double immigration. Every rectangle consumes exactly one
// exponential from its own label-keyed stream, which couples this process
// pathwise to the geometric construction.
class Population {
 public:
  explicit Population(uint64_t seed, Rect init = Rect{});

  void run(Until until);

  double horizon() const { return horizon_; }
  uint64_t events_processed() const { return events_; }
  uint64_t seed() const { return seed_; }
  const std::vector<RectRecord>& records() const { return recs_; }

  // Optional memory budget: a run that would exceed it stops early and the
  // partial result is flagged.
  void set_max_records(size_t n) { max_records_ = n; }
  bool truncated() const { return truncated_; }

  std::vector<PopAtom> snapshot(double t) const;  // V(t) u W(t)

  // Sum of f over the snapshot, restricted by the support filter.
  // f sees (len, wid, age, frozen); non-finite values raise.
  double empirical(double t, const std::function<double(double, double, double, bool)>& f,
                   Support support = Support::FiniteOnly) const;

  double finite_surface(double t) const;  // <Z_t, h> over finite rectangles
  size_t finite_count(double t) const;

  // Smallest value of t^2/2 - <Z_t,h> seen at event times during run().
  double min_surface_gap() const { return min_gap_; }
  // Largest deviation of the doubly-infinite count from one at event times.
  bool doubly_unique_ok() const { return doubly_ok_; }

  void write_jsonl(const std::string& path, double t) const;

 private:
  uint32_t spawn(const Label& label, double len, double wid, double birth, double age0,
                 uint32_t parent);
  void process(uint32_t rec);

  struct Event {
    double t;
    uint32_t rec;
  };
  bool event_later(const Event& a, const Event& b) const;

  uint64_t seed_ = 0;
  std::vector<RectRecord> recs_;
  std::vector<Event> queue_;
  double horizon_ = 0.0;
  double clock_ = 0.0;
  uint64_t events_ = 0;
  size_t max_records_ = SIZE_MAX;
  bool truncated_ = false;
  double running_finite_surface_ = 0.0;
  double min_gap_ = kInf;
  int64_t doubly_count_ = 0;
  bool doubly_ok_ = true;
};

// Shared-randomness equivalence of the geometric network and the rectangle
// process: identical (label, L, l, birth, freeze) multisets up to tolerance.
struct EquivalenceReport {
  bool ok = false;
  size_t compared = 0;
  double max_abs_diff = 0.0;
  std::string first_diff_label;
  std::string detail;
};

EquivalenceReport equivalence_check(uint64_t seed, uint64_t n_events, double tol = 1e-9);

}  // namespace rectnet
