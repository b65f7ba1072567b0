#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rectnet {

// Growth direction, one per genealogical depth mod 4.
enum class Dir : uint8_t { PlusX = 0, MinusY = 1, MinusX = 2, PlusY = 3 };

// The orthogonal-offspring turn.
Dir rotate_cw(Dir d);
const char* dir_name(Dir d);

// Genealogy word. The empty word is the root, standing for the quadrant
// boundary; it is a valid value but rejected by operators that need a real
// branch.
class Label {
 public:
  Label() = default;
  explicit Label(std::vector<uint32_t> word);

  static Label root() { return Label{}; }
  static Label first();  // (1)

  bool is_root() const { return w_.empty(); }
  size_t depth() const { return w_.size(); }
  const std::vector<uint32_t>& word() const { return w_; }

  // Straight offspring: last coordinate incremented. Same depth.
  Label straight_child() const;
  // Orthogonal offspring: append 1. Depth + 1.
  Label orth_child() const;
  // Direct ancestor: drop a trailing 1, otherwise decrement the last entry.
  Label parent() const;
  // Ancestor at the last orthogonal branching: drop the last coordinate.
  Label orth_ancestor() const;
  // Direction from depth mod 4.
  Dir direction() const;

  // Generation in the genealogical tree: number of branching events from the
  // first branch, plus one. (1) -> 1, (2) and (1,1) -> 2, ...
  uint64_t generation() const;

  // Dot-separated entries, root as "-".
  std::string str() const;
  static Label parse(const std::string& s);

  bool operator==(const Label&) const = default;
  bool operator<(const Label& o) const { return w_ < o.w_; }

 private:
  std::vector<uint32_t> w_;
};

}  // namespace rectnet
