#pragma once

// Counter-based random generator. Every draw is a pure function of
// (seed, stream, counter), so generation parallelizes over streams and
// reruns are bit-identical across platforms.
//
// Algorithm: three chained applications of the SplitMix64 finalizer,
//   value = mix(mix(mix(seed) ^ stream) + counter)
// with mix(z) = ((z + 0x9E3779B97F4A7C15) xor-shift-multiply chain).

#include <cmath>
#include <cstdint>

namespace hsseg {

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(splitmix64_mix(splitmix64_mix(seed) ^ stream)) {}

  std::uint64_t next_u64() { return splitmix64_mix(base_ + counter_++); }

  // Uniform on (0,1); never returns 0 so log() is always finite.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_uniform();
    double u2 = next_uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hsseg
