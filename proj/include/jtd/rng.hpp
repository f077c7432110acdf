#pragma once

#include <cstdint>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

namespace jtd {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of sub-stream `index` under `master_seed`.
///
/// A pure function of the pair: trajectory k draws the same noise no matter
/// which worker runs it or in which order. For a fixed master seed distinct
/// indices map to distinct seeds.
constexpr std::uint64_t derive_seed(std::uint64_t master_seed,
                                    std::uint64_t index) noexcept {
  return mix64(master_seed ^ mix64(index + 0x9e3779b97f4a7c15ULL));
}

/// Tags that split one master seed into the signal-absent and
/// signal-present ensembles of a detection experiment.
enum class SeedRole : std::uint64_t {
  signal_absent = 0x5030'0000'0000'0000ULL,
  signal_present = 0x5031'0000'0000'0000ULL,
};

constexpr std::uint64_t role_seed(std::uint64_t master_seed,
                                  SeedRole role) noexcept {
  return mix64(master_seed ^ static_cast<std::uint64_t>(role));
}

/// Standard-normal source for one trajectory.
class NoiseStream {
 public:
  NoiseStream() = default;
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }

  double operator()() { return normal_(engine_); }

 private:
  boost::random::mt19937_64 engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace jtd
