#pragma once

#include <cstdint>

#include "cutplane/stats.hpp"

namespace cutplane {

/// SplitMix64 pseudo-random generator (Steele, Lea & Flood 2014).
/// Chosen over std::mt19937 because the full draw path (generator plus
/// the conversions below) is fixed here, so logs replay bit-identically
/// on any platform.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  /// Independent stream derived from (seed, stream_id); used to give each
  /// worker or purpose its own deterministic sequence.
  static SplitMix64 stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 mixer(seed);
    std::uint64_t base = mixer.next_u64();
    return SplitMix64(base ^ (0xA3EC647659359ACDULL * (stream_id + 1)));
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in the open interval (0, 1); safe for quantile maps.
  double next_open_double() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via the inverse-CDF map.
  double next_normal() { return normal_quantile(next_open_double()); }

  /// Uniform integer in [0, n).
  int next_below(int n) {
    return static_cast<int>(next_double() * static_cast<double>(n));
  }

 private:
  std::uint64_t state_;
};

}  // namespace cutplane
