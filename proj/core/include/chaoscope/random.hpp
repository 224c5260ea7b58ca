#pragma once

#include <cstdint>
#include <random>

namespace chaoscope {

/// Seedable generator with a stream that is identical across standard
/// library implementations.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The distributions below are implemented here rather than taken
/// from <random>, whose distribution algorithms are implementation-defined:
///
///   uniform01()      top 53 bits of one engine output, scaled to [0, 1)
///   normal()         Marsaglia polar method; the spare deviate is cached
///   below(bound)     rejection of the short tail, then modulo
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform01() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() noexcept;

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace chaoscope
