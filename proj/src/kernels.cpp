#include "irs/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "irs/transforms.hpp"

namespace irs::kernels {

namespace {

void check_flip_args(const CMatrix& element_bins, const CVector& h, std::span<const std::int8_t> theta,
                     std::span<const std::uint8_t> skip, std::span<double> gains) {
  const auto n = static_cast<std::size_t>(element_bins.cols());
  if (theta.size() != n || skip.size() != n || gains.size() != n || element_bins.rows() != h.size())
    throw DimensionError("flip_rate_gains: inconsistent argument sizes");
}

std::vector<double> base_terms(const CVector& h, double snr_scale) {
  std::vector<double> inv(static_cast<std::size_t>(h.size()));
  for (Eigen::Index nu = 0; nu < h.size(); ++nu) inv[static_cast<std::size_t>(nu)] = 1.0 / (1.0 + snr_scale * std::norm(h[nu]));
  return inv;
}

double one_flip(const CMatrix& element_bins, const CVector& h, const std::vector<double>& inv_base, Eigen::Index n,
                std::int8_t state, double snr_scale) {
  const double factor = state > 0 ? -2.0 : 2.0;
  double sum = 0.0;
  const Complex* g = element_bins.col(n).data();
  for (Eigen::Index nu = 0; nu < h.size(); ++nu) {
    const Complex moved = h[nu] + factor * g[nu];
    sum += std::log2((1.0 + snr_scale * std::norm(moved)) * inv_base[static_cast<std::size_t>(nu)]);
  }
  return sum;
}

}  // namespace

namespace serial {

void fwht_columns(CMatrix& a) {
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    fwht_inplace(std::span<Complex>(a.col(c).data(), static_cast<std::size_t>(a.rows())));
}

void flip_rate_gains(const CMatrix& element_bins, const CVector& h, std::span<const std::int8_t> theta,
                     std::span<const std::uint8_t> skip, double snr_scale, std::span<double> gains) {
  check_flip_args(element_bins, h, theta, skip, gains);
  const auto inv_base = base_terms(h, snr_scale);
  for (Eigen::Index n = 0; n < element_bins.cols(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    gains[i] = skip[i] ? -std::numeric_limits<double>::infinity()
                       : one_flip(element_bins, h, inv_base, n, theta[i], snr_scale);
  }
}

}  // namespace serial

namespace omp {

void fwht_columns(CMatrix& a) {
  if (!is_power_of_two(static_cast<std::size_t>(a.rows())))
    throw DimensionError("fwht length " + std::to_string(a.rows()) + " is not a power of two");
  const Eigen::Index cols = a.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cols; ++c)
    fwht_inplace(std::span<Complex>(a.col(c).data(), static_cast<std::size_t>(a.rows())));
}

void flip_rate_gains(const CMatrix& element_bins, const CVector& h, std::span<const std::int8_t> theta,
                     std::span<const std::uint8_t> skip, double snr_scale, std::span<double> gains) {
  check_flip_args(element_bins, h, theta, skip, gains);
  const auto inv_base = base_terms(h, snr_scale);
  const Eigen::Index count = element_bins.cols();
#pragma omp parallel for schedule(static)
  for (Eigen::Index n = 0; n < count; ++n) {
    const auto i = static_cast<std::size_t>(n);
    gains[i] = skip[i] ? -std::numeric_limits<double>::infinity()
                       : one_flip(element_bins, h, inv_base, n, theta[i], snr_scale);
  }
}

}  // namespace omp

}  // namespace irs::kernels
