#pragma once

#include <cstdint>
#include <optional>

namespace terank {

/// SplitMix64 (Steele, Lea & Flood). See https://prng.di.unimi.it.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Uniform and Gaussian draws on top of a single SplitMix64 stream.
///
/// uniform() uses the top 53 bits: [0, 1). gaussian() is Box-Muller over two
/// consecutive uniforms; the sine branch is cached for the next call and is
/// lost when the stream object is destroyed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) noexcept : engine_(seed) {}

  std::uint64_t next_u64() noexcept { return engine_(); }
  double uniform() noexcept;
  double gaussian() noexcept;
  double gaussian(double mean, double stddev) noexcept { return mean + stddev * gaussian(); }
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  SplitMix64 engine_;
  std::optional<double> cached_;
};

}  // namespace terank
