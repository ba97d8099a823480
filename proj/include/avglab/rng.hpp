#pragma once

#include <cstdint>

namespace avglab {

// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Counter-based generator: word j of substream (seed, stream) is
//
//   key  = mix(seed + gamma * (stream + 1))
//   word = mix(key  + gamma * (j + 1))
//
// with mix = splitmix64_mix and gamma = 0x9e3779b97f4a7c15. Any word can be
// computed directly, so per-sample substreams are independent of thread
// scheduling and of how many words other substreams consume.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64_mix(seed + kGoldenGamma * (stream + 1))) {}

  std::uint64_t word(std::uint64_t j) const { return splitmix64_mix(key_ + kGoldenGamma * (j + 1)); }
  std::uint64_t next_u64() { return word(counter_++); }
  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace avglab
