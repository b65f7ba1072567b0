#include "rectnet/genealogy.hpp"

#include <stdexcept>

namespace rectnet {

Dir rotate_cw(Dir d) { return static_cast<Dir>((static_cast<uint8_t>(d) + 1) % 4); }

const char* dir_name(Dir d) {
  switch (d) {
    case Dir::PlusX: return "+x";
    case Dir::MinusY: return "-y";
    case Dir::MinusX: return "-x";
    case Dir::PlusY: return "+y";
  }
  return "?";
}

Label::Label(std::vector<uint32_t> word) : w_(std::move(word)) {
  for (uint32_t x : w_) {
    if (x < 1) throw std::invalid_argument("label entries must be >= 1");
  }
}

Label Label::first() { return Label{{1}}; }

Label Label::straight_child() const {
  if (is_root()) throw std::invalid_argument("root has no straight child");
  Label c = *this;
  c.w_.back() += 1;
  return c;
}

Label Label::orth_child() const {
  if (is_root()) throw std::invalid_argument("root has no orthogonal child");
  Label c = *this;
  c.w_.push_back(1);
  return c;
}

Label Label::parent() const {
  if (is_root()) throw std::invalid_argument("root has no parent");
  Label p = *this;
  if (p.w_.back() == 1) {
    p.w_.pop_back();
  } else {
    p.w_.back() -= 1;
  }
  return p;
}

Label Label::orth_ancestor() const {
  if (is_root()) throw std::invalid_argument("root has no orthogonal ancestor");
  Label p = *this;
  p.w_.pop_back();
  return p;
}

Dir Label::direction() const {
  if (is_root()) throw std::invalid_argument("root has no direction");
  // depth = 4k+1 -> +x, 4k+2 -> -y, 4k+3 -> -x, 4k -> +y
  return static_cast<Dir>((depth() + 3) % 4);
}

uint64_t Label::generation() const {
  uint64_t s = 0;
  for (uint32_t x : w_) s += x;
  return s;  // sum of entries; (1) -> 1
}

std::string Label::str() const {
  if (is_root()) return "-";
  std::string out;
  for (size_t i = 0; i < w_.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(w_[i]);
  }
  return out;
}

Label Label::parse(const std::string& s) {
  if (s == "-") return root();
  std::vector<uint32_t> w;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t dot = s.find('.', pos);
    if (dot == std::string::npos) dot = s.size();
    if (dot == pos) throw std::invalid_argument("bad label string: " + s);
    unsigned long v = std::stoul(s.substr(pos, dot - pos));
    if (v < 1) throw std::invalid_argument("bad label entry in: " + s);
    w.push_back(static_cast<uint32_t>(v));
    pos = dot + 1;
  }
  if (w.empty()) throw std::invalid_argument("empty label string");
  return Label{std::move(w)};
}

}  // namespace rectnet
