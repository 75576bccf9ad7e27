#pragma once

#include <cstdint>

namespace billiard {

/// Counter-based generator: every draw is a pure function of
/// (seed, chain, step, draw). Chains and steps can be visited in any order on
/// any number of workers and still produce identical streams.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t chain)
      : key_(mix(seed ^ mix(chain * 0x9E3779B97F4A7C15ULL + 0x6A09E667F3BCC909ULL))) {}

  void set_step(std::uint64_t step) {
    step_ = step;
    draw_ = 0;
  }

  /// Uniform double in [0, 1).
  double uniform01() {
    const std::uint64_t ctr =
        mix(key_ ^ mix(step_ * 0xBF58476D1CE4E5B9ULL + (std::uint64_t(draw_) << 1 | 1)));
    ++draw_;
    return static_cast<double>(ctr >> 11) * 0x1.0p-53;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t step_ = 0;
  std::uint32_t draw_ = 0;
};

}  // namespace billiard
