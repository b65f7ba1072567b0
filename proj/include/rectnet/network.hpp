#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rectnet/genealogy.hpp"
#include "rectnet/geometry.hpp"
#include "rectnet/rng.hpp"
#include "rectnet/until.hpp"

namespace rectnet {

enum class BranchPolicy { RightOnly, BothSidesAnnihilate, BothSidesCross, BothSidesPriority };

const char* policy_name(BranchPolicy p);
std::optional<BranchPolicy> parse_policy(const std::string& s);

// One branch of the network. birth = T_{u-}, branch_time = T_u,
// inact_time = T_u^inf (+inf if the filament never fuses).
struct BranchRecord {
  Label label;
  double birth = 0.0;
  double branch_time = 0.0;
  double inact_time = kInf;
  Point origin;
  Dir dir = Dir::PlusX;
  double width = kInf;  // l_u, fixed at creation
  uint32_t filament = 0;
  uint32_t parent = kNoParent;
  static constexpr uint32_t kNoParent = 0xffffffffu;

  double length() const { return inact_time - birth; }
  bool branches() const { return branch_time < inact_time; }
};

// Maximal straight run of branches. All labels of one filament share a line
// and an inactivation time; the trace grows from `origin` at unit speed from
// `start` until `stop`.
struct Filament {
  Point origin;
  Dir dir = Dir::PlusX;
  double start = 0.0;
  double stop = kInf;
  uint32_t lateral = 0;  // lateral offspring count (Appendix-B priority rule)
};

struct RectAtom {
  uint32_t rec = 0;
  double len = 0.0;
  double wid = 0.0;
  double age = 0.0;
  bool frozen = false;
};

struct PointLocationReport {
  size_t samples = 0;
  size_t interior_once = 0;   // covered by exactly one rectangle interior
  size_t on_edge = 0;         // within tolerance of some rectangle edge
  size_t bad = 0;             // interior coverage count != 1
  size_t worst_count = 0;
};

class NetworkState {
 public:
  NetworkState(uint64_t seed, BranchPolicy policy = BranchPolicy::RightOnly,
               double both_sides_left_prob = 0.5);

  // Processes scheduled branching events. Stops when the budget is exhausted;
  // the queue stays resumable.
  void advance(Until until);

  double horizon() const { return horizon_; }
  uint64_t events_processed() const { return events_; }
  BranchPolicy policy() const { return policy_; }
  uint64_t seed() const { return seed_; }

  const std::vector<BranchRecord>& records() const { return recs_; }
  const std::vector<Filament>& filaments() const { return fils_; }
  const Imprint& imprint() const { return imprint_; }

  // Rectangle snapshot Z_t, one atom per branch in V(t) u W(t).
  // RightOnly policy only; throws if t is past the simulated horizon.
  std::vector<RectAtom> extract_rectangles(double t) const;

  // Every sampled interior point must lie in exactly one rectangle interior.
  PointLocationReport point_location_check(double t, size_t n_samples, uint64_t seed) const;

  // Sum of rectangle areas clipped to the swept triangle {x>=0,y<=0,x-y<=t};
  // equals t^2/2 by the partition property.
  double clipped_area_sum(double t) const;

  // Exact consistency check of the half-line construction with the physical
  // tip-meets-branch model: every realized fusion point lies on a segment
  // traced by the fusion time. Returns number of violations (tol 1e-9).
  size_t fusion_on_branch_violations() const;

  // Number of transversal interior-interior segment crossings at time t.
  size_t count_crossings(double t) const;

  void write_jsonl(const std::string& path) const;
  void render_svg(const std::string& path, double t) const;
  void render_svg(const std::string& path, double t, double xmin, double xmax,
                  double ymin, double ymax) const;

 private:
  struct Event {
    double t;
    uint32_t rec;
  };
  bool event_later(const Event& a, const Event& b) const;  // heap comparator
  struct BsCandidate {  // both-sides: earliest pending crossing of a filament
    double t_arrive = kInf;
    uint32_t other = 0;
    double d_self = 0.0;
    double d_other = 0.0;
    bool valid = false;
  };

  void spawn(const Label& label, double birth, Point origin, Dir dir, double width,
             double inact, uint32_t filament, uint32_t parent);
  void process_event_right_only(const Event& ev);

  // Both-sides machinery (Appendix-B variants).
  void process_event_both_sides(const Event& ev);
  BsCandidate bs_next_candidate(uint32_t fil, double after) const;
  std::optional<std::tuple<double, double, double>> bs_crossing(uint32_t self, uint32_t other) const;
  void bs_relax_new_filament(uint32_t fil);
  void bs_handle_arrival(uint32_t fil, double now);
  uint32_t bs_lateral_count(uint32_t fil, double t) const;

  uint64_t seed_ = 0;
  BranchPolicy policy_ = BranchPolicy::RightOnly;
  double left_prob_ = 0.5;
  std::vector<BranchRecord> recs_;
  std::vector<Filament> fils_;
  Imprint imprint_;
  std::vector<Event> queue_;  // min-heap on (t, record label)
  double horizon_ = 0.0;
  double clock_ = 0.0;
  uint64_t events_ = 0;

  // both-sides: pending arrival per filament, queued as (time, filament)
  std::vector<BsCandidate> bs_pending_;
  struct BsEvent {
    double t;
    uint32_t fil;
    uint64_t gen;
  };
  std::vector<BsEvent> bs_queue_;
  std::vector<uint64_t> bs_gen_;
  std::vector<std::vector<double>> bs_branch_times_;
};

}  // namespace rectnet
