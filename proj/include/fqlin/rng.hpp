#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace fqlin::rng {

// std::mt19937_64 output is fixed by the standard; the std distributions are
// not, so every draw below is built from raw 64-bit words to keep streams
// bit-identical across standard libraries.
using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Hash of (seed, a, b) used for substream and per-trial seeds.
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xd1342543de82ef95ULL + 1));
}

inline Engine substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Engine(derive(seed, a, b));
}

/// Uniform integer in [0, bound), bound >= 1 (Lemire's nearly-divisionless method).
inline std::uint64_t uniform_below(Engine& g, std::uint64_t bound) {
  std::uint64_t x = g();
  __uint128_t m = static_cast<__uint128_t>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = g();
      m = static_cast<__uint128_t>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

namespace detail {

// Inversion by sequential search; exact up to floating point for mean < 30.
inline std::uint64_t poisson_inversion(Engine& g, double mean) {
  const double u = uniform01(g);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t x = 0;
  while (u >= cdf && p > 0.0) {
    ++x;
    p *= mean / static_cast<double>(x);
    cdf += p;
  }
  return x;
}

}  // namespace detail

constexpr double kPoissonInversionLimit = 30.0;

/// Exact Poisson draw. Means >= 30 are split into equal chunks below the
/// inversion limit and summed (Poisson additivity), so no normal approximation
/// is involved.
inline std::uint64_t poisson(Engine& g, double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < kPoissonInversionLimit) return detail::poisson_inversion(g, mean);
  const auto chunks = static_cast<std::uint64_t>(std::ceil(mean / 25.0));
  const double part = mean / static_cast<double>(chunks);
  std::uint64_t total = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) total += detail::poisson_inversion(g, part);
  return total;
}

template <class T>
void shuffle(Engine& g, std::span<T> values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(g, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace fqlin::rng
