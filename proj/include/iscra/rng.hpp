#pragma once

#include <cmath>
#include <cstdint>

namespace iscra {

// Stateless 64-bit mixer (the splitmix64 finalizer).  Feeding it
// key + k*kGoldenGamma for k = 0,1,2,... reproduces the reference splitmix64
// stream seeded with `key`.
inline constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator: output k is a pure function of (seed, stream, k),
// so independent substreams (one per matrix row, one for noise, ...) can be
// drawn in any order and still reproduce byte-identical data.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix64(seed + kGoldenGamma) ^ mix64(stream * kGoldenGamma + 0x1234567899abcdefULL)) {
    if (stream == 0) key_ = seed;  // stream 0 is the raw reference stream
  }

  CounterRng substream(std::uint64_t stream) const { return CounterRng(origin_seed_or_key(), stream); }

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGoldenGamma); }

  // uniform on [0, 1) with 53 random bits
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform on [lo, hi)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // standard normal via Box-Muller; second deviate of each pair is cached
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1]: keeps the log finite
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 6.283185307179586476925286766559 * u2;
    cached_ = rad * std::sin(ang);
    have_cached_ = true;
    return rad * std::cos(ang);
  }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t origin_seed_or_key() const { return key_; }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace iscra
