#pragma once

// Slow, literal reference computations. Nothing here calls into the library
// except for plain data types.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

#include "irs/types.hpp"

namespace oracle {

using irs::CMatrix;
using irs::Complex;
using irs::CVector;

inline int hadamard(std::size_t r, std::size_t c) {
  // Recursive Sylvester construction, H_{2n} = [[H, H], [H, -H]].
  int sign = 1;
  std::size_t n = 1;
  while (n <= std::max(r, c)) n <<= 1;
  for (std::size_t half = n >> 1; half >= 1; half >>= 1) {
    if (r >= half && c >= half) sign = -sign;
    r %= half;
    c %= half;
  }
  return sign;
}

inline CVector hadamard_multiply(const CVector& v) {
  const auto n = static_cast<std::size_t>(v.size());
  CVector out = CVector::Zero(v.size());
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) out[r] += static_cast<double>(hadamard(r, c)) * v[c];
  return out;
}

inline Complex expj(double angle) { return {std::cos(angle), std::sin(angle)}; }

// H[nu] = sum_l h[l] e^{-j 2 pi l nu / K}
inline CVector channel_dft(const CVector& taps, std::size_t K) {
  CVector out = CVector::Zero(static_cast<Eigen::Index>(K));
  for (std::size_t nu = 0; nu < K; ++nu)
    for (Eigen::Index l = 0; l < taps.size(); ++l)
      out[nu] += taps[l] * expj(-2.0 * std::numbers::pi * static_cast<double>(l) * static_cast<double>(nu) /
                                static_cast<double>(K));
  return out;
}

inline CVector unitary_dft(const CVector& x) {
  const auto K = static_cast<double>(x.size());
  CVector out = CVector::Zero(x.size());
  for (Eigen::Index nu = 0; nu < x.size(); ++nu)
    for (Eigen::Index k = 0; k < x.size(); ++k)
      out[nu] += x[k] * expj(-2.0 * std::numbers::pi * static_cast<double>(k * nu) / K);
  return out / std::sqrt(K);
}

inline CVector unitary_idft(const CVector& X) {
  const auto K = static_cast<double>(X.size());
  CVector out = CVector::Zero(X.size());
  for (Eigen::Index k = 0; k < X.size(); ++k)
    for (Eigen::Index nu = 0; nu < X.size(); ++nu)
      out[k] += X[nu] * expj(2.0 * std::numbers::pi * static_cast<double>(k * nu) / K);
  return out / std::sqrt(K);
}

// Linear convolution of a prefixed block, keeping the K samples after the prefix.
inline CVector received_body(const CVector& taps, const CVector& body) {
  const auto K = body.size(), M = taps.size();
  CVector x(K + M - 1);
  for (Eigen::Index i = 0; i < M - 1; ++i) x[i] = body[K - (M - 1) + i];
  for (Eigen::Index k = 0; k < K; ++k) x[M - 1 + k] = body[k];
  CVector y = CVector::Zero(K + 2 * (M - 1));
  for (Eigen::Index i = 0; i < x.size(); ++i)
    for (Eigen::Index l = 0; l < M; ++l) y[i + l] += taps[l] * x[i];
  return y.segment(M - 1, K);
}

inline double rate(const CVector& hbar, std::size_t M, double snr_scale, double bandwidth) {
  const auto K = static_cast<double>(hbar.size());
  double sum = 0.0;
  for (Eigen::Index nu = 0; nu < hbar.size(); ++nu) sum += std::log2(1.0 + snr_scale * std::norm(hbar[nu]));
  return bandwidth / (K + static_cast<double>(M) - 1.0) * sum;
}

inline CVector compose(const CVector& d, const CMatrix& g, const std::vector<std::int8_t>& theta) {
  CVector h = d;
  for (std::size_t n = 0; n < theta.size(); ++n) h += static_cast<double>(theta[n]) * g.row(static_cast<Eigen::Index>(n)).transpose();
  return h;
}

inline std::vector<std::int8_t> unpack(std::uint64_t bits, std::size_t n) {
  std::vector<std::int8_t> theta(n);
  for (std::size_t i = 0; i < n; ++i) theta[i] = ((bits >> (n - 1 - i)) & 1U) ? -1 : 1;
  return theta;
}

// Exhaustive narrowband search in lexicographic order (+1 before -1).
inline double best_narrowband(const std::vector<Complex>& g, Complex d) {
  double best = -1.0;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << g.size()); ++bits) {
    Complex s = d;
    for (std::size_t i = 0; i < g.size(); ++i) s += ((bits >> i) & 1U) ? -g[i] : g[i];
    best = std::max(best, std::abs(s));
  }
  return best;
}

// Exhaustive wideband search over taps. Returns the best rate and its configuration
// (first in lexicographic order among exact ties).
struct Best {
  double rate = -1.0;
  std::vector<std::int8_t> theta;
};

inline Best best_wideband(const CVector& d_taps, const CMatrix& g_taps, std::size_t K, double snr_scale, double bandwidth,
                          bool pin_first = false) {
  const auto n = static_cast<std::size_t>(g_taps.rows());
  const auto M = static_cast<std::size_t>(g_taps.cols());
  Best best;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    const auto theta = unpack(bits, n);
    if (pin_first && theta[0] < 0) continue;
    const double r = rate(channel_dft(compose(d_taps, g_taps, theta), K), M, snr_scale, bandwidth);
    if (r > best.rate) best = {r, theta};
  }
  return best;
}

// FNV-1a 64.
inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace oracle
