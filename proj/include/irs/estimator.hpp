#pragma once

#include <cstddef>
#include <vector>

#include "irs/simulator.hpp"
#include "irs/types.hpp"

namespace irs {

/// Estimated affine channel in the frequency domain, optionally projected onto
/// the M-tap delay subspace.
///
/// With only the N Hadamard pilots the direct path cannot be separated from
/// element 0: row 0 of element_freq then carries g_0 + d and direct_freq is
/// zero (aliasing_resolved == false). With the 4N paired layout both are
/// recovered separately.
struct ChannelEstimate {
  SystemDims dims;
  ChannelFrequencyResponse direct_freq;  // K
  CMatrix element_freq;                  // N x K
  ChannelImpulseResponse direct_taps;    // M, set by projection
  CMatrix element_taps;                  // N x M, set by projection
  bool aliasing_resolved = false;
  bool projected = false;
  double noise_variance_estimate = 0.0;  // W, per-bin N0*B
  std::size_t pilot_blocks = 1;          // Hadamard blocks averaged per element estimate
  double pilot_power = 1.0;              // |xbar|^2
};

/// Per-subcarrier Hadamard inversion of one user's K x T received block.
/// Accepts T = N (H_N) or T = 4N in the paired layout of build_hadamard_pilots.
ChannelEstimate invert_hadamard_pilots(const CMatrix& received, const SignMatrix& pilots, const FrequencySignal& xbar,
                                       const SystemDims& dims);

ChannelEstimate invert_hadamard_pilots(const PilotDataset& dataset, std::size_t user);

/// Same as above with the pilot layout already classified (pilot_layout).
ChannelEstimate invert_hadamard_pilots(const CMatrix& received, const SignMatrix& pilots,
                                       const std::vector<PilotBlock>& layout, const FrequencySignal& xbar,
                                       const SystemDims& dims);

/// Least-squares fit onto span(F), F the K x M delay DFT matrix; since
/// F^H F = K I the fit is taps = F^H bins / K.
ChannelEstimate project_to_delay_subspace(const ChannelEstimate& estimate);

/// Per-bin N0*B from the projection residual of the element estimates.
/// Throws DimensionError when K == M (no residual degrees of freedom).
double estimate_noise_variance(const ChannelEstimate& raw, const ChannelEstimate& projected);

/// invert -> project -> noise estimate.
ChannelEstimate estimate_channel(const CMatrix& received, const SignMatrix& pilots, const FrequencySignal& xbar,
                                 const SystemDims& dims);

ChannelEstimate estimate_channel(const PilotDataset& dataset, std::size_t user);

ChannelEstimate estimate_channel(const CMatrix& received, const SignMatrix& pilots, const std::vector<PilotBlock>& layout,
                                 const FrequencySignal& xbar, const SystemDims& dims);

/// taps (R x M) -> bins (R x K) under the no-1/sqrt(K) convention.
CMatrix taps_to_bins(const CMatrix& taps, std::size_t K);

}  // namespace irs
