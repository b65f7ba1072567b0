#include "rectnet/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace rectnet {

Point advance_point(Point p, Dir d, double dist) {
  switch (d) {
    case Dir::PlusX: return {p.x + dist, p.y};
    case Dir::MinusY: return {p.x, p.y - dist};
    case Dir::MinusX: return {p.x - dist, p.y};
    case Dir::PlusY: return {p.x, p.y + dist};
  }
  return p;
}

Imprint::Imprint() {
  // {0} x (-inf, 0]: the y-axis wall, present from the start.
  ImprintSegment wall;
  wall.line = 0.0;
  wall.lo = -kInf;
  wall.hi = 0.0;
  wall.start = 0.0;
  wall.t0 = -kInf;  // covered at all times
  wall.owner = ImprintSegment::kBoundary;
  vert_[0.0].push_back(wall);
  ++count_;
}

void Imprint::add(Dir d, Point origin, double length, double t0, uint32_t owner,
                  const Label& owner_label) {
  ImprintSegment s;
  s.t0 = t0;
  s.owner = owner;
  s.owner_label = owner_label;
  const bool horizontal = (d == Dir::PlusX || d == Dir::MinusX);
  if (horizontal) {
    s.line = origin.y;
    s.start = origin.x;
    if (d == Dir::PlusX) {
      s.lo = origin.x;
      s.hi = origin.x + length;
    } else {
      s.lo = origin.x - length;
      s.hi = origin.x;
    }
    horiz_[s.line].push_back(s);
  } else {
    s.line = origin.x;
    s.start = origin.y;
    if (d == Dir::PlusY) {
      s.lo = origin.y;
      s.hi = origin.y + length;
    } else {
      s.lo = origin.y - length;
      s.hi = origin.y;
    }
    vert_[s.line].push_back(s);
  }
  ++count_;
}

namespace {

// Nearest covered coordinate of [lo,hi] strictly ahead of `from` when moving
// in +1/-1 direction along the segment axis; nan when none.
double nearest_ahead(double lo, double hi, double from, int sign) {
  if (sign > 0) {
    if (hi <= from) return std::nan("");
    double c = std::max(lo, from);
    if (c <= from) return std::nan("");  // covers points arbitrarily close: excluded
    return c;
  }
  if (lo >= from) return std::nan("");
  double c = std::min(hi, from);
  if (c >= from) return std::nan("");
  return c;
}

}  // namespace

std::optional<Hit> Imprint::first_hit(Point origin, Dir d) const {
  const bool vertical_ray = (d == Dir::MinusY || d == Dir::PlusY);
  const int sign = (d == Dir::PlusX || d == Dir::PlusY) ? +1 : -1;
  // Coordinate moving along the ray and the fixed cross coordinate.
  const double along0 = vertical_ray ? origin.y : origin.x;
  const double cross = vertical_ray ? origin.x : origin.y;

  std::optional<Hit> best;
  auto consider = [&](double along, const ImprintSegment& s) {
    double dist = sign > 0 ? along - along0 : along0 - along;
    if (!(dist > 0.0)) return;
    if (!best || dist < best->distance ||
        (dist == best->distance && s.owner_label < best->owner_label)) {
      Hit h;
      h.distance = dist;
      h.owner = s.owner;
      h.owner_label = s.owner_label;
      h.point = vertical_ray ? Point{cross, along} : Point{along, cross};
      best = h;
    }
  };

  // Perpendicular blockers: levels of the other orientation crossed by the ray.
  const auto& perp = vertical_ray ? horiz_ : vert_;
  if (sign > 0) {
    for (auto it = perp.upper_bound(along0); it != perp.end(); ++it) {
      bool found = false;
      for (const auto& s : it->second) {
        if (s.lo <= cross && cross <= s.hi) {
          consider(it->first, s);
          found = true;
        }
      }
      if (found) break;  // sorted levels: the first covering level is nearest
    }
  } else {
    for (auto it = std::map<double, std::vector<ImprintSegment>>::const_reverse_iterator(
             perp.lower_bound(along0));
         it != perp.rend(); ++it) {
      bool found = false;
      for (const auto& s : it->second) {
        if (s.lo <= cross && cross <= s.hi) {
          consider(it->first, s);
          found = true;
        }
      }
      if (found) break;
    }
  }

  // Collinear blockers: segments on the ray's own line, hit end-on.
  const auto& coll = vertical_ray ? vert_ : horiz_;
  auto it = coll.find(cross);
  if (it != coll.end()) {
    for (const auto& s : it->second) {
      double c = nearest_ahead(s.lo, s.hi, along0, sign);
      if (!std::isnan(c)) consider(c, s);
    }
  }
  return best;
}

}  // namespace rectnet
