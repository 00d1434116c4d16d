#pragma once
// Seeded random streams. Every stochastic component draws from its own named
// sub-stream so that adding a new consumer never perturbs existing draws.

#include <cmath>
#include <cstdint>
#include <random>

namespace potsim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for the sub-stream identified by `tag`, derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  return splitmix64(splitmix64(base) ^ splitmix64(tag ^ 0xa0761d6478bd642fULL));
}

namespace stream {
inline constexpr std::uint64_t graph = 1;
inline constexpr std::uint64_t origin = 2;
inline constexpr std::uint64_t peer = 3;
inline constexpr std::uint64_t tie = 4;
inline constexpr std::uint64_t arrival = 5;
inline constexpr std::uint64_t service = 6;
inline constexpr std::uint64_t baseline = 7;  // paired comparison runs
}  // namespace stream

// mt19937_64 wrapper with explicit conversions, so identical seeds give
// identical draws across platforms and standard-library versions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  std::uint64_t raw() { return eng_(); }

  // uniform on [0, 1), 53-bit resolution
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n); multiply-shift, bias < n/2^64
  std::uint64_t index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(eng_()) * n) >> 64);
  }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

  bool coin() { return (eng_() >> 63) != 0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace potsim
