#pragma once

#include <cstdint>

namespace vr3c {

// SplitMix64 output function evaluated as a pure function of (seed, counter).
// The k-th draw of a stream is splitmix64_at(seed, k), so any platform or
// language can reproduce a stream from the two integers alone.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) noexcept {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator. Substream s of root seed r draws its values from
// the derived seed splitmix64_at(r, s); substream 0 uses the root seed as is.
// Restarts, streams and workers index substreams by counter, which keeps
// results independent of scheduling and thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t substream = 0) noexcept
      : seed_(substream == 0 ? seed : splitmix64_at(seed, substream)) {}

  std::uint64_t next_u64() noexcept { return splitmix64_at(seed_, counter_++); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * next_double(); }

  // Uniform in [0, n). Multiply-shift reduction; bias is O(n / 2^64).
  std::uint64_t uniform_int(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace vr3c
