#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>

namespace mbac {

/// SplitMix64 finalizer; also used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for sub-stream `path` of `base`, e.g. derive_seed(seed, {load, run}).
std::uint64_t derive_seed(std::uint64_t base,
                          std::initializer_list<std::uint64_t> path);

/// xoshiro256** (Blackman & Vigna), state filled from SplitMix64(seed).
/// All variates below are built from raw 64-bit outputs with fixed
/// algorithms, so a seed reproduces the same stream on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_pos() { return 1.0 - uniform(); }
  /// Uniform integer in [0, n), n > 0 (Lemire's multiply-shift rejection).
  std::uint64_t below(std::uint64_t n);
  /// Exponential with the given rate, by inversion.
  double exponential(double rate);
  /// Bernoulli(p) as 0/1.
  double bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }
  /// Poisson(mean): sequential inversion below 30, PTRS (Hörmann 1993)
  /// transformed rejection at and above.
  std::uint64_t poisson(double mean);
  /// Standard normal via Marsaglia's polar method.
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace mbac
