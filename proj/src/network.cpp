#include "rectnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "rectnet/io.hpp"

#include <json.hpp>

namespace rectnet {

namespace {
constexpr uint64_t kSideSalt = 0x51DEC011ull;  // side-coin stream salt

Dir rotate_ccw(Dir d) { return static_cast<Dir>((static_cast<uint8_t>(d) + 3) % 4); }

struct Box {
  double xlo, xhi, ylo, yhi;
};

Box record_box(const BranchRecord& r) {
  const double len = r.inact_time - r.birth;
  const double wid = r.width;
  const double ox = r.origin.x, oy = r.origin.y;
  switch (r.dir) {
    case Dir::PlusX: return {ox, ox + len, oy - wid, oy};
    case Dir::MinusY: return {ox - wid, ox, oy - len, oy};
    case Dir::MinusX: return {ox - len, ox, oy, oy + wid};
    case Dir::PlusY: return {ox, ox + wid, oy, oy + len};
  }
  return {0, 0, 0, 0};
}

double axis_coord(Point p, Dir d) {
  return (d == Dir::PlusX || d == Dir::MinusX) ? p.x : p.y;
}

}  // namespace

const char* policy_name(BranchPolicy p) {
  switch (p) {
    case BranchPolicy::RightOnly: return "right-only";
    case BranchPolicy::BothSidesAnnihilate: return "both-annihilate";
    case BranchPolicy::BothSidesCross: return "both-cross";
    case BranchPolicy::BothSidesPriority: return "both-priority";
  }
  return "?";
}

std::optional<BranchPolicy> parse_policy(const std::string& s) {
  if (s == "right-only") return BranchPolicy::RightOnly;
  if (s == "both-annihilate") return BranchPolicy::BothSidesAnnihilate;
  if (s == "both-cross") return BranchPolicy::BothSidesCross;
  if (s == "both-priority") return BranchPolicy::BothSidesPriority;
  return std::nullopt;
}

bool NetworkState::event_later(const Event& a, const Event& b) const {
  if (a.t != b.t) return a.t > b.t;
  return recs_[b.rec].label < recs_[a.rec].label;
}

NetworkState::NetworkState(uint64_t seed, BranchPolicy policy, double both_sides_left_prob)
    : seed_(seed), policy_(policy), left_prob_(both_sides_left_prob) {
  const bool right_only = (policy_ == BranchPolicy::RightOnly);
  Filament root;
  root.origin = {0.0, 0.0};
  root.dir = Dir::PlusX;
  root.start = 0.0;
  root.stop = kInf;
  fils_.push_back(root);
  if (right_only) {
    // [U1> = [0,inf) x {0}, the x-axis half of the quadrant boundary.
    imprint_.add(Dir::PlusX, {0.0, 0.0}, kInf, 0.0, 0, Label::first());
  } else {
    bs_pending_.push_back({});
    bs_gen_.push_back(0);
    bs_branch_times_.push_back({});
  }
  spawn(Label::first(), 0.0, {0.0, 0.0}, Dir::PlusX, kInf, kInf, 0, BranchRecord::kNoParent);
}

void NetworkState::spawn(const Label& label, double birth, Point origin, Dir dir, double width,
                         double inact, uint32_t filament, uint32_t parent) {
  BranchRecord r;
  r.label = label;
  r.birth = birth;
  Stream s(seed_, label);
  r.branch_time = birth + s.exponential();
  r.inact_time = inact;
  r.origin = origin;
  r.dir = dir;
  r.width = width;
  r.filament = filament;
  r.parent = parent;
  const uint32_t idx = static_cast<uint32_t>(recs_.size());
  recs_.push_back(std::move(r));
  const bool schedule = (policy_ == BranchPolicy::RightOnly)
                            ? recs_[idx].branch_time < recs_[idx].inact_time
                            : true;  // both-sides stops are dynamic; checked at pop
  if (schedule) {
    queue_.push_back({recs_[idx].branch_time, idx});
    std::push_heap(queue_.begin(), queue_.end(),
                   [this](const Event& a, const Event& b) { return event_later(a, b); });
  }
}

void NetworkState::process_event_right_only(const Event& ev) {
  const BranchRecord r = recs_[ev.rec];  // copy: recs_ may reallocate
  const double T = r.branch_time;
  const Point x_u = advance_point(r.origin, r.dir, T - r.birth);

  // Straight offspring rides the same filament and inherits the inactivation.
  spawn(r.label.straight_child(), T, x_u, r.dir, r.width, r.inact_time, r.filament, ev.rec);

  // Orthogonal offspring: new ray stopped against the current imprint.
  const Dir d2 = rotate_cw(r.dir);
  auto hit = imprint_.first_hit(x_u, d2);
  const double inact2 = hit ? T + hit->distance : kInf;
  const uint32_t fid = static_cast<uint32_t>(fils_.size());
  fils_.push_back({x_u, d2, T, inact2, 0});
  const uint32_t child = static_cast<uint32_t>(recs_.size());
  spawn(r.label.orth_child(), T, x_u, d2, T - r.birth, inact2, fid, ev.rec);
  imprint_.add(d2, x_u, hit ? hit->distance : kInf, T, child, recs_[child].label);
}

void NetworkState::advance(Until until) {
  auto gt = [this](const Event& a, const Event& b) { return event_later(a, b); };
  uint64_t budget = (until.kind == Until::Kind::Events) ? until.events : 0;
  const bool by_time = (until.kind == Until::Kind::Time);
  if (by_time && until.t < clock_) throw std::invalid_argument("t_max before current clock");

  auto bs_ready = [&]() {
    while (!bs_queue_.empty()) {
      const BsEvent& e = bs_queue_.front();
      if (bs_gen_[e.fil] == e.gen) return true;
      std::pop_heap(bs_queue_.begin(), bs_queue_.end(),
                    [](const BsEvent& a, const BsEvent& b) {
                      return a.t > b.t || (a.t == b.t && a.fil > b.fil);
                    });
      bs_queue_.pop_back();
    }
    return false;
  };
  auto bs_gt = [](const BsEvent& a, const BsEvent& b) {
    return a.t > b.t || (a.t == b.t && a.fil > b.fil);
  };

  while (true) {
    const bool have_branch = !queue_.empty();
    const bool have_arrival = (policy_ != BranchPolicy::RightOnly) && bs_ready();
    if (!have_branch && !have_arrival) break;
    double tb = have_branch ? queue_.front().t : kInf;
    double ta = have_arrival ? bs_queue_.front().t : kInf;
    if (ta <= tb) {
      if (by_time && ta > until.t) break;
      BsEvent e = bs_queue_.front();
      std::pop_heap(bs_queue_.begin(), bs_queue_.end(), bs_gt);
      bs_queue_.pop_back();
      clock_ = e.t;
      bs_handle_arrival(e.fil, e.t);
      continue;
    }
    if (by_time && tb > until.t) break;
    if (!by_time && budget == 0) break;
    Event ev = queue_.front();
    std::pop_heap(queue_.begin(), queue_.end(), gt);
    queue_.pop_back();
    clock_ = ev.t;
    if (policy_ == BranchPolicy::RightOnly) {
      process_event_right_only(ev);
    } else {
      process_event_both_sides(ev);
    }
    ++events_;
    if (!by_time) --budget;
  }

  if (by_time) {
    horizon_ = until.t;
  } else {
    horizon_ = queue_.empty() ? kInf : std::nextafter(queue_.front().t, -kInf);
  }
  if (policy_ != BranchPolicy::RightOnly) {
    // settle collision arrivals up to the horizon before the state is queried
    while (bs_ready() && bs_queue_.front().t <= horizon_) {
      BsEvent e = bs_queue_.front();
      std::pop_heap(bs_queue_.begin(), bs_queue_.end(), bs_gt);
      bs_queue_.pop_back();
      clock_ = e.t;
      bs_handle_arrival(e.fil, e.t);
    }
    for (auto& r : recs_) r.inact_time = fils_[r.filament].stop;
  }
}

std::vector<RectAtom> NetworkState::extract_rectangles(double t) const {
  if (policy_ != BranchPolicy::RightOnly)
    throw std::runtime_error("rectangle extraction requires the right-only policy");
  if (t > horizon_) throw std::invalid_argument("t beyond simulated horizon");
  std::vector<RectAtom> out;
  out.reserve(recs_.size());
  for (uint32_t i = 0; i < recs_.size(); ++i) {
    const BranchRecord& r = recs_[i];
    if (r.birth > t) continue;
    if (r.branches() && r.branch_time <= t) continue;  // replaced by offspring
    RectAtom a;
    a.rec = i;
    a.len = r.length();
    a.wid = r.width;
    a.age = std::min(t - r.birth, a.len);
    a.frozen = std::isfinite(a.len) && t >= r.inact_time;
    out.push_back(a);
  }
  return out;
}

PointLocationReport NetworkState::point_location_check(double t, size_t n_samples,
                                                       uint64_t seed) const {
  auto atoms = extract_rectangles(t);
  std::vector<Box> boxes;
  boxes.reserve(atoms.size());
  for (const auto& a : atoms) boxes.push_back(record_box(recs_[a.rec]));

  PointLocationReport rep;
  rep.samples = n_samples;
  Stream s(replicate_key(seed, 0, 0xb0d1e5));
  const double tol = 1e-9;
  for (size_t k = 0; k < n_samples; ++k) {
    const double px = s.uniform() * t / 2;
    const double py = -(s.uniform() * t / 2);
    size_t inside = 0;
    bool edge = false;
    for (const Box& b : boxes) {
      if (px < b.xlo - tol || px > b.xhi + tol || py < b.ylo - tol || py > b.yhi + tol) continue;
      const bool strict = px > b.xlo + tol && px < b.xhi - tol && py > b.ylo + tol && py < b.yhi - tol;
      if (strict) {
        ++inside;
      } else {
        edge = true;
      }
    }
    if (edge) {
      ++rep.on_edge;
    } else if (inside == 1) {
      ++rep.interior_once;
    } else {
      ++rep.bad;
      rep.worst_count = std::max(rep.worst_count, inside);
    }
  }
  return rep;
}

double NetworkState::clipped_area_sum(double t) const {
  auto atoms = extract_rectangles(t);
  auto tri = [](double x) { return x > 0 ? x * x / 2 : 0.0; };
  double sum = 0.0;
  for (const auto& a : atoms) {
    Box b = record_box(recs_[a.rec]);
    b.xlo = std::max(b.xlo, 0.0);
    b.ylo = std::max(b.ylo, -t);
    b.xhi = std::min(b.xhi, t);
    b.yhi = std::min(b.yhi, 0.0);
    if (b.xhi <= b.xlo || b.yhi <= b.ylo) continue;
    const double area = (b.xhi - b.xlo) * (b.yhi - b.ylo);
    // subtract the part beyond x - y > t
    const double cut = tri(b.xhi - b.ylo - t) - tri(b.xlo - b.ylo - t) -
                       tri(b.xhi - b.yhi - t) + tri(b.xlo - b.yhi - t);
    sum += area - cut;
  }
  return sum;
}

size_t NetworkState::fusion_on_branch_violations() const {
  if (policy_ != BranchPolicy::RightOnly) return 0;
  const double tol = 1e-9;
  size_t bad = 0;
  // Collect all imprint segments once; indexed scan per fused record through
  // the sorted maps would also do, but the map ranges need both orientations.
  struct Seg {
    bool horizontal;
    ImprintSegment s;
  };
  std::vector<Seg> segs;
  imprint_.for_each([&](bool horizontal, const ImprintSegment& s) {
    segs.push_back({horizontal, s});
  });
  for (const auto& r : recs_) {
    if (!(r.inact_time <= r.branch_time)) continue;  // branched: no fusion
    if (!std::isfinite(r.inact_time) || r.inact_time > horizon_) continue;
    const Point q = advance_point(r.origin, r.dir, r.inact_time - r.birth);
    bool covered = false;
    for (const auto& e : segs) {
      if (e.s.owner != ImprintSegment::kBoundary && &recs_[e.s.owner] == &r) continue;
      const double cross = e.horizontal ? q.y : q.x;
      const double along = e.horizontal ? q.x : q.y;
      if (std::abs(cross - e.s.line) > tol) continue;
      if (along < e.s.lo - tol || along > e.s.hi + tol) continue;
      // traced by the fusion time?
      const double trace_time =
          e.s.t0 == -kInf ? -kInf : e.s.t0 + std::abs(along - e.s.start);
      if (trace_time <= r.inact_time + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) ++bad;
  }
  return bad;
}

size_t NetworkState::count_crossings(double t) const {
  struct Ext {
    bool horizontal;
    double line, lo, hi;
  };
  std::vector<Ext> ext;
  for (const auto& f : fils_) {
    const double e = std::min(t, f.stop) - f.start;
    if (!(e > 0)) continue;
    Point tip = advance_point(f.origin, f.dir, e);
    Ext x;
    x.horizontal = (f.dir == Dir::PlusX || f.dir == Dir::MinusX);
    if (x.horizontal) {
      x.line = f.origin.y;
      x.lo = std::min(f.origin.x, tip.x);
      x.hi = std::max(f.origin.x, tip.x);
    } else {
      x.line = f.origin.x;
      x.lo = std::min(f.origin.y, tip.y);
      x.hi = std::max(f.origin.y, tip.y);
    }
    ext.push_back(x);
  }
  size_t n = 0;
  const double tol = 1e-9;  // fusion endpoint contacts are not crossings
  for (size_t i = 0; i < ext.size(); ++i) {
    for (size_t j = i + 1; j < ext.size(); ++j) {
      if (ext[i].horizontal == ext[j].horizontal) continue;
      const Ext& h = ext[i].horizontal ? ext[i] : ext[j];
      const Ext& v = ext[i].horizontal ? ext[j] : ext[i];
      if (v.line > h.lo + tol && v.line < h.hi - tol && h.line > v.lo + tol &&
          h.line < v.hi - tol)
        ++n;
    }
  }
  return n;
}

void NetworkState::write_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& r : recs_) {
    nlohmann::ordered_json j;
    j["label"] = r.label.str();
    j["birth"] = r.birth;
    j["branch_time"] = r.branch_time;
    if (std::isfinite(r.inact_time)) {
      j["inact_time"] = r.inact_time;
    } else {
      j["inact_time"] = nullptr;
    }
    j["origin"] = {r.origin.x, r.origin.y};
    j["dir"] = dir_name(r.dir);
    out << j.dump() << "\n";
  }
}

void NetworkState::render_svg(const std::string& path, double t) const {
  if (policy_ == BranchPolicy::RightOnly) {
    render_svg(path, t, 0.0, std::max(t, 1.0), -std::max(t, 1.0), 0.0);
  } else {
    double m = std::max(t, 1.0);
    render_svg(path, t, -m, m, -m, m);
  }
}

void NetworkState::render_svg(const std::string& path, double t, double xmin, double xmax,
                              double ymin, double ymax) const {
  const double w = xmax - xmin, h = ymax - ymin;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << fmt_fixed(w) << " "
      << fmt_fixed(h) << "\">\n";
  const std::string stroke = fmt_fixed(std::max(w, h) / 600.0);
  auto line = [&](double x1, double y1, double x2, double y2) {
    // clamp to the viewport; y axis flipped for display
    x1 = std::clamp(x1, xmin, xmax);
    x2 = std::clamp(x2, xmin, xmax);
    y1 = std::clamp(y1, ymin, ymax);
    y2 = std::clamp(y2, ymin, ymax);
    out << "<line x1=\"" << fmt_fixed(x1 - xmin) << "\" y1=\"" << fmt_fixed(ymax - y1)
        << "\" x2=\"" << fmt_fixed(x2 - xmin) << "\" y2=\"" << fmt_fixed(ymax - y2)
        << "\" stroke=\"black\" stroke-width=\"" << stroke << "\"/>\n";
  };
  size_t first_fil = 0;
  if (policy_ == BranchPolicy::RightOnly) {
    // quadrant boundary: x-axis (also the root branch) and y-axis wall
    line(0.0, 0.0, xmax, 0.0);
    line(0.0, 0.0, 0.0, ymin);
    first_fil = 1;
  }
  for (size_t i = first_fil; i < fils_.size(); ++i) {
    const Filament& f = fils_[i];
    const double e = std::min(t, f.stop) - f.start;
    if (!(e > 0)) continue;
    Point tip = advance_point(f.origin, f.dir, e);
    if (std::max(f.origin.x, tip.x) < xmin || std::min(f.origin.x, tip.x) > xmax ||
        std::max(f.origin.y, tip.y) < ymin || std::min(f.origin.y, tip.y) > ymax)
      continue;
    line(f.origin.x, f.origin.y, tip.x, tip.y);
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
}

// ---------------------------------------------------------------------------
// Both-sides variants (Appendix-B style, full plane, physical stopping rule).
// ---------------------------------------------------------------------------

std::optional<std::tuple<double, double, double>> NetworkState::bs_crossing(
    uint32_t self, uint32_t other) const {
  const Filament& F = fils_[self];
  const Filament& G = fils_[other];
  const bool fh = (F.dir == Dir::PlusX || F.dir == Dir::MinusX);
  const bool gh = (G.dir == Dir::PlusX || G.dir == Dir::MinusX);
  auto sgn = [](Dir d) { return (d == Dir::PlusX || d == Dir::PlusY) ? 1.0 : -1.0; };
  if (fh != gh) {
    // perpendicular: crossing point is (vertical.x, horizontal.y)
    const double qx = fh ? G.origin.x : F.origin.x;
    const double qy = fh ? F.origin.y : G.origin.y;
    const double dF = fh ? (qx - F.origin.x) * sgn(F.dir) : (qy - F.origin.y) * sgn(F.dir);
    const double dG = gh ? (qx - G.origin.x) * sgn(G.dir) : (qy - G.origin.y) * sgn(G.dir);
    if (!(dF > 0) || dG < 0) return std::nullopt;
    const double tF = F.start + dF;
    const double tG = G.start + dG;
    if (tG > tF) return std::nullopt;  // self passes first; other's problem
    return std::make_tuple(tF, dF, dG);
  }
  // same orientation: only exactly collinear filaments interact
  const double lineF = fh ? F.origin.y : F.origin.x;
  const double lineG = gh ? G.origin.y : G.origin.x;
  if (lineF != lineG) return std::nullopt;
  const double aF = axis_coord(F.origin, F.dir);
  const double aG = axis_coord(G.origin, G.dir);
  const double sF = sgn(F.dir), sG = sgn(G.dir);
  if (sF == sG) {
    // chasing: self runs into other's trace origin
    const double d = (aG - aF) * sF;
    if (!(d > 0)) return std::nullopt;
    const double tF = F.start + d;
    if (G.start > tF) return std::nullopt;  // other not born when self passes
    return std::make_tuple(tF, d, 0.0);
  }
  // facing: tips meet halfway in time
  const double gap = (aG - aF) * sF;
  if (!(gap > 0)) return std::nullopt;
  const double tstar = (gap + F.start + G.start) / 2;
  if (tstar < std::max(F.start, G.start)) return std::nullopt;
  return std::make_tuple(tstar, tstar - F.start, tstar - G.start);
}

NetworkState::BsCandidate NetworkState::bs_next_candidate(uint32_t fil, double after) const {
  BsCandidate best;
  if (policy_ == BranchPolicy::BothSidesCross) return best;  // tips cross freely
  for (uint32_t g = 0; g < fils_.size(); ++g) {
    if (g == fil) continue;
    auto c = bs_crossing(fil, g);
    if (!c) continue;
    auto [tF, dF, dG] = *c;
    if (tF <= after) continue;
    if (tF >= fils_[fil].stop) continue;
    // skip blockers already known to stop short of the crossing
    if (dG > fils_[g].stop - fils_[g].start) continue;
    if (!best.valid || tF < best.t_arrive ||
        (tF == best.t_arrive && g < best.other)) {
      best.valid = true;
      best.t_arrive = tF;
      best.other = g;
      best.d_self = dF;
      best.d_other = dG;
    }
  }
  return best;
}

void NetworkState::bs_relax_new_filament(uint32_t fil) {
  auto bs_gt = [](const BsEvent& a, const BsEvent& b) {
    return a.t > b.t || (a.t == b.t && a.fil > b.fil);
  };
  bs_pending_[fil] = bs_next_candidate(fil, fils_[fil].start);
  ++bs_gen_[fil];
  if (bs_pending_[fil].valid) {
    bs_queue_.push_back({bs_pending_[fil].t_arrive, fil, bs_gen_[fil]});
    std::push_heap(bs_queue_.begin(), bs_queue_.end(), bs_gt);
  }
  // the new trace may block existing tips earlier than their current pending
  if (policy_ == BranchPolicy::BothSidesCross) return;
  for (uint32_t f = 0; f < fils_.size(); ++f) {
    if (f == fil || fils_[f].stop < kInf) continue;
    auto c = bs_crossing(f, fil);
    if (!c) continue;
    auto [tF, dF, dG] = *c;
    if (tF <= clock_) continue;  // a tip only meets traces strictly ahead of it
    if (tF >= fils_[f].stop) continue;
    if (bs_pending_[f].valid && bs_pending_[f].t_arrive <= tF) continue;
    bs_pending_[f] = {tF, fil, dF, dG, true};
    ++bs_gen_[f];
    bs_queue_.push_back({tF, f, bs_gen_[f]});
    std::push_heap(bs_queue_.begin(), bs_queue_.end(), bs_gt);
  }
}

uint32_t NetworkState::bs_lateral_count(uint32_t fil, double t) const {
  const auto& v = bs_branch_times_[fil];
  return static_cast<uint32_t>(std::upper_bound(v.begin(), v.end(), t) - v.begin());
}

void NetworkState::bs_handle_arrival(uint32_t fil, double now) {
  auto repush = [&](double after) {
    bs_pending_[fil] = bs_next_candidate(fil, after);
    ++bs_gen_[fil];
    if (bs_pending_[fil].valid) {
      bs_queue_.push_back({bs_pending_[fil].t_arrive, fil, bs_gen_[fil]});
      std::push_heap(bs_queue_.begin(), bs_queue_.end(),
                     [](const BsEvent& a, const BsEvent& b) {
                       return a.t > b.t || (a.t == b.t && a.fil > b.fil);
                     });
    }
  };
  Filament& F = fils_[fil];
  if (F.stop <= now) return;  // already stopped
  const BsCandidate cand = bs_pending_[fil];
  if (!cand.valid || cand.t_arrive != now) return;  // stale
  Filament& G = fils_[cand.other];
  if (cand.d_other > G.stop - G.start) {  // blocker stopped short; rescan
    repush(now);
    return;
  }
  if (policy_ == BranchPolicy::BothSidesPriority && G.stop > now) {
    // two active tips cross: the filament with least lateral branching continues
    const uint32_t cf = bs_lateral_count(fil, now);
    const uint32_t cg = bs_lateral_count(cand.other, now);
    if (cf < cg || (cf == cg && fil < cand.other)) {
      G.stop = now;  // loser stops at its current tip position
      ++bs_gen_[cand.other];
      repush(now);
      return;
    }
  }
  F.stop = now;
  ++bs_gen_[fil];
}

void NetworkState::process_event_both_sides(const Event& ev) {
  const BranchRecord r = recs_[ev.rec];
  const double T = r.branch_time;
  if (fils_[r.filament].stop <= T) return;  // tip stopped before branching
  const Point x_u = advance_point(r.origin, r.dir, T - r.birth);
  bs_branch_times_[r.filament].push_back(T);

  spawn(r.label.straight_child(), T, x_u, r.dir, r.width, kInf, r.filament, ev.rec);

  Stream coin(replicate_key(seed_ ^ kSideSalt, recs_.size()));
  const bool left = coin.uniform() < left_prob_;
  const Dir d2 = left ? rotate_ccw(r.dir) : rotate_cw(r.dir);
  const uint32_t fid = static_cast<uint32_t>(fils_.size());
  fils_.push_back({x_u, d2, T, kInf, 0});
  fils_[r.filament].lateral += 1;
  bs_pending_.push_back({});
  bs_gen_.push_back(0);
  bs_branch_times_.push_back({});
  spawn(r.label.orth_child(), T, x_u, d2, T - r.birth, kInf, fid, ev.rec);
  bs_relax_new_filament(fid);
}

}  // namespace rectnet
