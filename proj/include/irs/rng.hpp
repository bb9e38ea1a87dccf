#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "irs/types.hpp"

namespace irs {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent seed for sub-stream `index` of purpose `tag` under `base`.
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index = 0) {
  return splitmix64(splitmix64(splitmix64(base) ^ tag) + index);
}

namespace stream_tag {
inline constexpr std::uint64_t noise = 0x6e6f697365ULL;
inline constexpr std::uint64_t calibration = 0x63616c6962ULL;
inline constexpr std::uint64_t random_baseline = 0x72616e64ULL;
}  // namespace stream_tag

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline Complex complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

inline IrsConfiguration random_configuration(Rng& rng, std::size_t n) {
  std::vector<std::int8_t> states(n);
  for (auto& s : states) s = (rng() >> 63) ? std::int8_t{-1} : std::int8_t{1};
  return IrsConfiguration(std::move(states));
}

}  // namespace irs
