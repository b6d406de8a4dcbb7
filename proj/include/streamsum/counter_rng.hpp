#pragma once

#include <cstdint>

namespace streamsum {

// Counter-based 64-bit generator: a Weyl sequence pushed through the
// splitmix64 finalizer. Everything downstream (stream generation, hash
// parameter draws) is fully determined by one seed, so runs are reproducible
// bit for bit.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGamma;
    return mix(state_);
  }

  // Uniform double in [0, 1) using the top 53 bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by rejection-free scaling (128-bit product).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

// Derives an independent sub-seed, e.g. one per repetition or per level.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t lane) {
  return CounterRng::mix(seed + 0x9e3779b97f4a7c15ULL * (lane + 1));
}

}  // namespace streamsum
