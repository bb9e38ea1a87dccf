#pragma once

#include "irs/types.hpp"

namespace irs {

/// Prepends the last M-1 samples of a K-sample body.
TimeSignal add_cyclic_prefix(const TimeSignal& body, const SystemDims& dims);

/// IDFT of the frequency-domain body followed by the cyclic prefix; length K+M-1.
TimeSignal make_ofdm_block(const FrequencySignal& body, const SystemDims& dims);

/// Noiseless FIR channel applied to one prefixed block. Returns the K samples
/// following the prefix, z[k] = sum_l h[l] x[M-1+k-l].
TimeSignal convolve_block(const ChannelImpulseResponse& h, const TimeSignal& x, const SystemDims& dims);

/// taps[l] = direct[l] + sum_n theta_n * elements(n, l).
ChannelImpulseResponse compose_channel(const AffineChannelModel& model, const IrsConfiguration& theta);

/// Per-subcarrier model z = hbar .* xbar + noise.
FrequencySignal apply_frequency_model(const ChannelFrequencyResponse& hbar, const FrequencySignal& xbar,
                                      const FrequencySignal& noise);

/// N x K matrix whose row n is the frequency response of element n.
CMatrix element_frequency_responses(const AffineChannelModel& model, const SystemDims& dims);

/// B/(K+M-1) * sum_nu log2(1 + snr_scale |hbar[nu]|^2), with snr_scale = P/(B N0).
double achievable_rate(const CVector& hbar, const SystemDims& dims, double snr_scale, double bandwidth);

}  // namespace irs
