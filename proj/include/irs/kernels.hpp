#pragma once

// Hot loops shared by the simulator, estimator and optimizer. Each kernel has a
// serial reference and an OpenMP version with identical results; the library
// calls the OpenMP version, tests and the bench compare the two.

#include <cstdint>
#include <span>

#include "irs/types.hpp"

namespace irs::kernels {

namespace serial {

/// Unnormalized Walsh-Hadamard transform of every column of `a`.
void fwht_columns(CMatrix& a);

/// gains[n] = sum_nu log2((1 + s|h - 2 theta_n g_n|^2) / (1 + s|h|^2)), where g_n
/// is column n of `element_bins` (K x N). Entries with skip[n] != 0 get -inf.
void flip_rate_gains(const CMatrix& element_bins, const CVector& h, std::span<const std::int8_t> theta,
                     std::span<const std::uint8_t> skip, double snr_scale, std::span<double> gains);

}  // namespace serial

namespace omp {

void fwht_columns(CMatrix& a);

void flip_rate_gains(const CMatrix& element_bins, const CVector& h, std::span<const std::int8_t> theta,
                     std::span<const std::uint8_t> skip, double snr_scale, std::span<double> gains);

}  // namespace omp

}  // namespace irs::kernels
