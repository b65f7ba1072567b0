#include "rectnet/rectangles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include "rectnet/io.hpp"
#include "rectnet/network.hpp"

#include <json.hpp>

namespace rectnet {

std::pair<Rect, Rect> branch_finite(double len, double wid, double age) {
  if (!(age >= 0) || !(age < len) || !std::isfinite(len) || !std::isfinite(wid))
    throw std::invalid_argument("branch_finite needs a finite non-frozen rectangle");
  return {Rect{len - age, wid, 0.0}, Rect{wid, age, 0.0}};
}

Rect immigrate_doubly(double delta) {
  if (!(delta > 0)) throw std::invalid_argument("immigration step needs delta > 0");
  return Rect{kInf, delta, 0.0};
}

Rect immigrate_singly(double wid, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("immigration step needs delta > 0");
  return Rect{wid, delta, 0.0};
}

Population::Population(uint64_t seed, Rect init) : seed_(seed) {
  if (init.age > init.len) throw std::invalid_argument("initial age exceeds length");
  spawn(Label::first(), init.len, init.wid, 0.0, init.age, RectRecord::kNoParent);
}

bool Population::event_later(const Event& a, const Event& b) const {
  if (a.t != b.t) return a.t > b.t;
  return recs_[b.rec].label < recs_[a.rec].label;
}

uint32_t Population::spawn(const Label& label, double len, double wid, double birth,
                           double age0, uint32_t parent) {
  RectRecord r;
  r.label = label;
  r.len = len;
  r.wid = wid;
  r.birth = birth;
  r.age0 = age0;
  Stream s(seed_, label);
  r.delta = s.exponential();
  r.parent = parent;
  const uint32_t idx = static_cast<uint32_t>(recs_.size());
  recs_.push_back(std::move(r));
  if (recs_[idx].branches()) {
    queue_.push_back({recs_[idx].ring_time(), idx});
    std::push_heap(queue_.begin(), queue_.end(),
                   [this](const Event& a, const Event& b) { return event_later(a, b); });
  }
  if (std::isfinite(len) && std::isfinite(wid)) running_finite_surface_ += len * wid;
  if (std::isinf(len) && std::isinf(wid)) ++doubly_count_;
  return idx;
}

void Population::process(uint32_t rec) {
  const RectRecord r = recs_[rec];  // copy: recs_ reallocates
  const double T = r.ring_time();
  const double a = r.age0 + r.delta;
  if (std::isfinite(r.len) && std::isfinite(r.wid)) running_finite_surface_ -= r.len * r.wid;
  if (std::isinf(r.len) && std::isinf(r.wid)) --doubly_count_;
  // straight offspring (L-a, l, 0); orthogonal offspring (l, a, 0)
  spawn(r.label.straight_child(), r.len - a, r.wid, T, 0.0, rec);
  spawn(r.label.orth_child(), r.wid, a, T, 0.0, rec);
  if (doubly_count_ != 1) doubly_ok_ = false;
  const double gap = T * T / 2 - running_finite_surface_;
  min_gap_ = std::min(min_gap_, gap);
}

void Population::run(Until until) {
  auto gt = [this](const Event& a, const Event& b) { return event_later(a, b); };
  uint64_t budget = (until.kind == Until::Kind::Events) ? until.events : 0;
  const bool by_time = (until.kind == Until::Kind::Time);
  if (by_time && until.t < clock_) throw std::invalid_argument("t_max before current clock");
  while (!queue_.empty()) {
    if (by_time && queue_.front().t > until.t) break;
    if (!by_time && budget == 0) break;
    if (recs_.size() + 2 > max_records_) {
      truncated_ = true;
      break;
    }
    Event ev = queue_.front();
    std::pop_heap(queue_.begin(), queue_.end(), gt);
    queue_.pop_back();
    clock_ = ev.t;
    process(ev.rec);
    ++events_;
    if (!by_time) --budget;
  }
  const bool partial = truncated_ && !queue_.empty();
  horizon_ = (by_time && !partial)
                 ? until.t
                 : (queue_.empty() ? kInf : std::nextafter(queue_.front().t, -kInf));
}

std::vector<PopAtom> Population::snapshot(double t) const {
  if (t > horizon_) throw std::invalid_argument("t beyond simulated horizon");
  std::vector<PopAtom> out;
  out.reserve(recs_.size());
  for (uint32_t i = 0; i < recs_.size(); ++i) {
    const RectRecord& r = recs_[i];
    if (r.birth > t) continue;
    if (r.branches() && r.ring_time() <= t) continue;
    PopAtom a;
    a.rec = i;
    a.len = r.len;
    a.wid = r.wid;
    a.age = std::min(r.age0 + (t - r.birth), r.len);
    a.frozen = std::isfinite(r.len) && t >= r.freeze_time();
    out.push_back(a);
  }
  return out;
}

double Population::empirical(double t,
                             const std::function<double(double, double, double, bool)>& f,
                             Support support) const {
  double sum = 0.0;
  for (const auto& a : snapshot(t)) {
    if (support == Support::FiniteOnly && !(std::isfinite(a.len) && std::isfinite(a.wid)))
      continue;
    const double v = f(a.len, a.wid, a.age, a.frozen);
    if (!std::isfinite(v)) throw std::runtime_error("test function non-finite on an atom");
    sum += v;
  }
  return sum;
}

double Population::finite_surface(double t) const {
  return empirical(t, [](double L, double l, double, bool) { return L * l; });
}

size_t Population::finite_count(double t) const {
  return static_cast<size_t>(
      empirical(t, [](double, double, double, bool) { return 1.0; }));
}

void Population::write_jsonl(const std::string& path, double t) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& a : snapshot(t)) {
    const RectRecord& r = recs_[a.rec];
    nlohmann::ordered_json j;
    j["label"] = r.label.str();
    j["L"] = std::isfinite(a.len) ? nlohmann::ordered_json(a.len) : nlohmann::ordered_json(nullptr);
    j["l"] = std::isfinite(a.wid) ? nlohmann::ordered_json(a.wid) : nlohmann::ordered_json(nullptr);
    j["birth"] = r.birth;
    j["freeze"] = a.frozen ? nlohmann::ordered_json(r.freeze_time()) : nlohmann::ordered_json(nullptr);
    j["age_at_t"] = a.age;
    out << j.dump() << "\n";
  }
}

EquivalenceReport equivalence_check(uint64_t seed, uint64_t n_events, double tol) {
  NetworkState net(seed, BranchPolicy::RightOnly);
  net.advance(Until::n_events(n_events));
  Population pop(seed);
  pop.run(Until::n_events(n_events));

  EquivalenceReport rep;
  struct Tuple {
    double len, wid, birth, freeze;
  };
  std::map<std::vector<uint32_t>, Tuple> geo;
  for (const auto& r : net.records()) {
    geo[r.label.word()] = {r.length(), r.width, r.birth, r.inact_time};
  }
  auto diff1 = [](double a, double b) {
    if (std::isinf(a) && std::isinf(b)) return 0.0;
    return std::abs(a - b);
  };
  rep.ok = true;
  if (geo.size() != pop.records().size()) {
    rep.ok = false;
    rep.detail = "record counts differ: " + std::to_string(geo.size()) + " vs " +
                 std::to_string(pop.records().size());
  }
  for (const auto& r : pop.records()) {
    auto it = geo.find(r.label.word());
    if (it == geo.end()) {
      rep.ok = false;
      if (rep.first_diff_label.empty()) rep.first_diff_label = r.label.str();
      continue;
    }
    const Tuple& g = it->second;
    double d = std::max(std::max(diff1(g.len, r.len), diff1(g.wid, r.wid)),
                        std::max(diff1(g.birth, r.birth), diff1(g.freeze, r.freeze_time())));
    if (d > rep.max_abs_diff) rep.max_abs_diff = d;
    if (d > tol) {
      rep.ok = false;
      if (rep.first_diff_label.empty()) rep.first_diff_label = r.label.str();
    }
    ++rep.compared;
  }
  if (rep.detail.empty() && !rep.ok)
    rep.detail = "first differing label: " + rep.first_diff_label;
  return rep;
}

}  // namespace rectnet
