#pragma once

#include <cstdint>

namespace fekete {

/// Counter-based generator: the value for (stream, index) is a pure function
/// of the seed, so sample i can be produced without generating 0..i-1 and
/// any partition of the index range reproduces the same stream.
///
/// Each word is splitmix64 applied to seed + golden * (stream * 2^32 + index).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits(std::uint64_t stream, std::uint64_t index) const {
    return mix(seed_ + kGolden * ((stream << 32) ^ index) + kGolden);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double unit(std::uint64_t stream, std::uint64_t index) const {
    return static_cast<double>(bits(stream, index) >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi, std::uint64_t stream, std::uint64_t index) const {
    return lo + (hi - lo) * unit(stream, index);
  }

  /// Uniform integer in [lo, hi].
  std::int64_t integer(std::int64_t lo, std::int64_t hi, std::uint64_t stream,
                       std::uint64_t index) const {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(bits(stream, index) % span);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
};

}  // namespace fekete
