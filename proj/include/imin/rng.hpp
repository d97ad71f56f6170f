#pragma once

#include <cstdint>
#include <limits>

namespace imin {

/// SplitMix64: a counter-based generator whose state is a single 64-bit
/// counter, so streams can be derived cheaply from (seed, index) pairs.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return finalize(state_);
  }

  static constexpr std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

using Rng = SplitMix64;

/// Independent stream `index` within `lane` of a run seeded by `seed`.
/// Lanes separate unrelated consumers (edge attempts, thresholds, recovery, ...).
inline Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t lane = 0) {
  std::uint64_t s = SplitMix64::finalize(seed + 0x632be59bd9b4e019ULL);
  s = SplitMix64::finalize(s ^ (lane * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
  return Rng(SplitMix64::finalize(s + index * 0x9e3779b97f4a7c15ULL));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform integer in [0, n) by rejection; n must be positive.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  constexpr std::uint64_t top = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = top - (top % n);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Uniform double in [0, 1) that depends only on (key, a, b). Lets a
/// simulation draw the same number for the same edge or node no matter in
/// which order, or whether, other draws happen.
inline double keyed_uniform(std::uint64_t key, std::uint64_t a, std::uint64_t b) {
  const std::uint64_t inner = SplitMix64::finalize(a * 0x9e3779b97f4a7c15ULL + b * 0xc2b2ae3d27d4eb4fULL + 1);
  return static_cast<double>(SplitMix64::finalize(key ^ inner) >> 11) * 0x1.0p-53;
}

}  // namespace imin
