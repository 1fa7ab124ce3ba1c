#pragma once

#include <cstdint>
#include <random>

namespace vvlab {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// A reproducible source of uniform variates on the open interval (0, 1).
///
/// Backed by std::mt19937_64, whose output sequence is fixed by the
/// standard, so a given (seed, position) yields the same variate on every
/// conforming platform. The 53 high bits are mapped to the centre of
/// their dyadic cell, which keeps 0 and 1 out of the range.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream number `index` derived from a master seed.
  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
    return RandomStream(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 1)));
  }

  double uniform() {
    constexpr double kScale = 0x1.0p-53;
    return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
  }

  void discard(unsigned long long n) { engine_.discard(n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace vvlab
