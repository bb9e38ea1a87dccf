#pragma once

#include <cstddef>
#include <span>

#include "irs/types.hpp"

namespace irs {

/// Entry (row, col) of the Sylvester-ordered Hadamard matrix: (-1)^popcount(row & col).
std::int8_t sylvester_entry(std::size_t row, std::size_t col);

/// In-place unnormalized Walsh-Hadamard transform (Sylvester order).
/// Throws DimensionError when the length is not a power of two.
void fwht_inplace(std::span<Complex> v);

/// Returns H_N * v, unnormalized, O(N log N).
CVector fwht(const CVector& v);

/// Unitary K-point DFT, X[nu] = 1/sqrt(K) sum_k x[k] exp(-j 2 pi k nu / K).
FrequencySignal dft_signal(const TimeSignal& s, const SystemDims& dims);

/// Inverse of dft_signal.
TimeSignal idft_signal(const FrequencySignal& s, const SystemDims& dims);

/// Channel frequency response without the 1/sqrt(K) factor:
/// H[nu] = sum_{l<M} h[l] exp(-j 2 pi l nu / K).
ChannelFrequencyResponse dft_channel(const ChannelImpulseResponse& h, const SystemDims& dims);

/// K x M matrix F with F(nu, l) = exp(-j 2 pi l nu / K). F^H F = K I.
CMatrix delay_dft_matrix(std::size_t K, std::size_t M);

/// exp(-j 2 pi m / K) with the index reduced modulo K before the angle is formed.
Complex twiddle(std::size_t m, std::size_t K);

}  // namespace irs
