#include "rectnet/rng.hpp"

#include <cmath>

namespace rectnet {

namespace {
constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kSeedSaltHi = 0x8BADF00D5EEDC0DEULL;
constexpr uint64_t kSeedSaltLo = 0x1234A5A5DEADBEEFULL;
}  // namespace

uint64_t mix64(uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

StreamKey label_key(uint64_t seed, const Label& u) {
  StreamKey k;
  k.hi = mix64(seed ^ kSeedSaltHi);
  k.lo = mix64(seed + kSeedSaltLo);
  for (uint32_t x : u.word()) {
    k.hi = mix64(k.hi ^ (x * kGolden));
    k.lo = mix64(k.lo + x + kGolden);
  }
  return k;
}

StreamKey replicate_key(uint64_t seed, uint64_t replicate, uint64_t salt) {
  StreamKey k;
  k.hi = mix64(mix64(seed ^ kSeedSaltHi) ^ (replicate * kGolden) ^ salt);
  k.lo = mix64(mix64(seed + kSeedSaltLo) + replicate + mix64(salt));
  return k;
}

uint64_t derive_seed(uint64_t seed, uint64_t replicate, uint64_t salt) {
  return mix64(mix64(seed ^ mix64(salt + kGolden)) + replicate * kGolden);
}

uint64_t Stream::next_u64() {
  uint64_t z = k_.hi + ctr_ * kGolden;
  z = mix64(z) ^ k_.lo;
  z = mix64(z);
  ++ctr_;
  return z;
}

double Stream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Stream::exponential() {
  // -log1p(-u) = -log(1-u), accurate for small u.
  return -std::log1p(-uniform());
}

}  // namespace rectnet
