#pragma once

#include <cstdint>
#include <random>

namespace camfis {

/// SplitMix64 finalizer. Used to whiten seeds and to derive child streams.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seedable random stream.
///
/// Algorithm: std::mt19937_64 seeded with splitmix64(seed). Normal variates
/// come from std::normal_distribution (libstdc++ Marsaglia polar method), so
/// a stream is reproducible for a given standard library.
///
/// derive(i) returns an independent child stream whose seed depends only on
/// the parent seed and i, never on how many draws the parent has made. Trial
/// i of a campaign therefore sees the same numbers regardless of scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  RandomStream derive(std::uint64_t index) const {
    return RandomStream(splitmix64(seed_ ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  RandomStream derive(std::uint64_t stage, std::uint64_t index) const {
    return derive(stage).derive(index);
  }

  double normal() { return normal_(engine_); }

  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace camfis
