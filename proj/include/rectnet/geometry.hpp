#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "rectnet/genealogy.hpp"

namespace rectnet {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Point {
  double x = 0.0;
  double y = 0.0;
};

Point advance_point(Point p, Dir d, double dist);

// Axis-aligned imprint segment. `line` is the fixed coordinate (y for
// horizontal, x for vertical); the extent along the segment is [lo, hi]
// with hi possibly infinite. `start` and `t0` give the tracing origin and
// its start time, so coverage-by-time questions stay answerable.
struct ImprintSegment {
  double line = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double start = 0.0;  // trace origin coordinate along the segment axis
  double t0 = 0.0;     // time tracing started at `start`
  uint32_t owner = 0;  // index of the creating branch record; boundary = none
  Label owner_label;   // tie-break key for equal-distance candidates
  static constexpr uint32_t kBoundary = 0xffffffffu;
};

struct Hit {
  Point point;
  double distance = 0.0;
  uint32_t owner = ImprintSegment::kBoundary;
  Label owner_label;
};

// Union of traced half-lines the construction stops new rays against.
// Segments are only ever added. Candidate filtering goes through sorted
// per-coordinate maps; the scan over intervening empty levels is linear,
// which is fine at desk scale.
class Imprint {
 public:
  Imprint();  // quadrant boundary only

  void add(Dir d, Point origin, double length, double t0, uint32_t owner,
           const Label& owner_label = Label::root());

  // Nearest strictly-positive-distance intersection of the ray with any
  // segment, or nullopt. Equal-distance candidates resolve to the
  // lexicographically smallest owner label.
  std::optional<Hit> first_hit(Point origin, Dir d) const;

  size_t segment_count() const { return count_; }

  template <typename F>
  void for_each(F&& f) const {
    for (const auto& [k, v] : horiz_)
      for (const auto& s : v) f(/*horizontal=*/true, s);
    for (const auto& [k, v] : vert_)
      for (const auto& s : v) f(/*horizontal=*/false, s);
  }

 private:
  std::map<double, std::vector<ImprintSegment>> horiz_;  // keyed by y
  std::map<double, std::vector<ImprintSegment>> vert_;   // keyed by x
  size_t count_ = 0;
};

}  // namespace rectnet
