#include "irs/channel.hpp"

#include <cmath>
#include <string>

#include "irs/transforms.hpp"

namespace irs {

TimeSignal add_cyclic_prefix(const TimeSignal& body, const SystemDims& dims) {
  if (static_cast<std::size_t>(body.samples.size()) != dims.K)
    throw DimensionError("cyclic prefix needs a body of " + std::to_string(dims.K) + " samples");
  const auto K = static_cast<Eigen::Index>(dims.K);
  const auto cp = static_cast<Eigen::Index>(dims.M - 1);
  TimeSignal out;
  out.samples.resize(K + cp);
  out.samples.head(cp) = body.samples.tail(cp);
  out.samples.tail(K) = body.samples;
  return out;
}

TimeSignal make_ofdm_block(const FrequencySignal& body, const SystemDims& dims) {
  return add_cyclic_prefix(idft_signal(body, dims), dims);
}

TimeSignal convolve_block(const ChannelImpulseResponse& h, const TimeSignal& x, const SystemDims& dims) {
  if (static_cast<std::size_t>(h.taps.size()) != dims.M)
    throw DimensionError("impulse response must have " + std::to_string(dims.M) + " taps");
  if (static_cast<std::size_t>(x.samples.size()) < dims.block_length())
    throw DimensionError("block has " + std::to_string(x.samples.size()) + " samples, need at least " +
                         std::to_string(dims.block_length()));
  const auto K = static_cast<Eigen::Index>(dims.K);
  const auto M = static_cast<Eigen::Index>(dims.M);
  TimeSignal z;
  z.samples = CVector::Zero(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    Complex acc{0.0, 0.0};
    for (Eigen::Index l = 0; l < M; ++l) acc += h.taps[l] * x.samples[M - 1 + k - l];
    z.samples[k] = acc;
  }
  return z;
}

ChannelImpulseResponse compose_channel(const AffineChannelModel& model, const IrsConfiguration& theta) {
  if (theta.size() != model.num_elements())
    throw DimensionError("configuration has " + std::to_string(theta.size()) + " entries, model has " +
                         std::to_string(model.num_elements()) + " elements");
  if (static_cast<std::size_t>(model.elements.cols()) != model.num_taps())
    throw DimensionError("element responses and direct path disagree on tap count");
  ChannelImpulseResponse h{model.direct};
  for (std::size_t n = 0; n < theta.size(); ++n) {
    const auto row = model.elements.row(static_cast<Eigen::Index>(n));
    if (theta[n] > 0)
      h.taps += row.transpose();
    else
      h.taps -= row.transpose();
  }
  return h;
}

FrequencySignal apply_frequency_model(const ChannelFrequencyResponse& hbar, const FrequencySignal& xbar,
                                      const FrequencySignal& noise) {
  if (hbar.bins.size() != xbar.bins.size() || hbar.bins.size() != noise.bins.size())
    throw DimensionError("frequency model inputs differ in length");
  return {hbar.bins.cwiseProduct(xbar.bins) + noise.bins};
}

CMatrix element_frequency_responses(const AffineChannelModel& model, const SystemDims& dims) {
  if (model.num_taps() != dims.M || static_cast<std::size_t>(model.elements.cols()) != dims.M)
    throw DimensionError("model tap count does not match dims");
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  return model.elements * F.transpose();
}

double achievable_rate(const CVector& hbar, const SystemDims& dims, double snr_scale, double bandwidth) {
  if (static_cast<std::size_t>(hbar.size()) != dims.K)
    throw DimensionError("frequency response has " + std::to_string(hbar.size()) + " bins, expected " +
                         std::to_string(dims.K));
  double sum = 0.0;
  for (Eigen::Index nu = 0; nu < hbar.size(); ++nu) sum += std::log2(1.0 + snr_scale * std::norm(hbar[nu]));
  return bandwidth / static_cast<double>(dims.block_length()) * sum;
}

}  // namespace irs
