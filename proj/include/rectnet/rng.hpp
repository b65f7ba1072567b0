#pragma once

#include <cstdint>

#include "rectnet/genealogy.hpp"

namespace rectnet {

// SplitMix64 finalizer.
uint64_t mix64(uint64_t z);

struct StreamKey {
  uint64_t hi = 0;
  uint64_t lo = 0;
  bool operator==(const StreamKey&) const = default;
};

// Stable 128-bit key of (run seed, genealogy word). The same (seed, label)
// yields the same stream in every simulator, which is what couples the
// geometric and rectangle constructions pathwise.
StreamKey label_key(uint64_t seed, const Label& u);

// Key for replicate-indexed streams (Monte Carlo sweeps).
StreamKey replicate_key(uint64_t seed, uint64_t replicate, uint64_t salt = 0);

// Derived top-level seed for an independent replicate-indexed simulator.
uint64_t derive_seed(uint64_t seed, uint64_t replicate, uint64_t salt = 0);

// Counter-based stream: the state is (key, counter), so it can be serialized,
// replayed and split freely. One uniform is consumed per variate.
class Stream {
 public:
  Stream() = default;
  explicit Stream(StreamKey k) : k_(k) {}
  Stream(uint64_t seed, const Label& u) : k_(label_key(seed, u)) {}

  uint64_t next_u64();
  double uniform();      // [0, 1)
  double exponential();  // rate 1, inverse CDF: -log(1-U)

  uint64_t counter() const { return ctr_; }
  void seek(uint64_t ctr) { ctr_ = ctr; }
  StreamKey key() const { return k_; }

 private:
  StreamKey k_{};
  uint64_t ctr_ = 0;
};

}  // namespace rectnet
