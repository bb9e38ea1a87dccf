#pragma once

#include <filesystem>
#include <string>

#include "irs/rng.hpp"
#include "irs/types.hpp"

namespace testing {

inline irs::CVector random_vector(irs::Rng& rng, std::size_t n, double variance = 1.0) {
  irs::CVector v(static_cast<Eigen::Index>(n));
  for (auto& x : v) x = irs::complex_gaussian(rng, variance);
  return v;
}

inline irs::CMatrix random_matrix(irs::Rng& rng, std::size_t rows, std::size_t cols, double variance = 1.0) {
  irs::CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = irs::complex_gaussian(rng, variance);
  return m;
}

inline irs::AffineChannelModel random_model(irs::Rng& rng, const irs::SystemDims& dims, double direct_variance = 1.0) {
  return {random_vector(rng, dims.M, direct_variance), random_matrix(rng, dims.N, dims.M, 1.0 / static_cast<double>(dims.N))};
}

inline double rel_err(const irs::CMatrix& a, const irs::CMatrix& b) { return (a - b).norm() / b.norm(); }

inline std::filesystem::path scratch(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(IRS_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
