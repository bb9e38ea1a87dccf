#include "irs/estimator.hpp"

#include <string>

#include "irs/kernels.hpp"
#include "irs/transforms.hpp"

namespace irs {

namespace {

// Rows t of the returned N x K matrix: received(:, first + t) ./ xbar.
CMatrix equalized_block(const CMatrix& received, const CVector& inv_x, Eigen::Index first, Eigen::Index N) {
  CMatrix y = received.middleCols(first, N).transpose();
  for (Eigen::Index nu = 0; nu < y.cols(); ++nu) y.col(nu) *= inv_x[nu];
  return y;
}

}  // namespace

CMatrix taps_to_bins(const CMatrix& taps, std::size_t K) {
  const CMatrix F = delay_dft_matrix(K, static_cast<std::size_t>(taps.cols()));
  return taps * F.transpose();
}

ChannelEstimate invert_hadamard_pilots(const CMatrix& received, const SignMatrix& pilots, const FrequencySignal& xbar,
                                       const SystemDims& dims) {
  return invert_hadamard_pilots(received, pilots, pilot_layout(pilots), xbar, dims);
}

ChannelEstimate invert_hadamard_pilots(const CMatrix& received, const SignMatrix& pilots,
                                       const std::vector<PilotBlock>& layout, const FrequencySignal& xbar,
                                       const SystemDims& dims) {
  dims.validate();
  const auto K = static_cast<Eigen::Index>(dims.K);
  const auto N = static_cast<Eigen::Index>(dims.N);
  if (pilots.rows != dims.N) throw DimensionError("pilot matrix rows must equal N");
  if (received.rows() != K || static_cast<std::size_t>(received.cols()) != pilots.cols)
    throw DimensionError("received block is " + std::to_string(received.rows()) + "x" +
                         std::to_string(received.cols()) + ", expected " + std::to_string(K) + "x" +
                         std::to_string(pilots.cols));
  if (xbar.bins.size() != K) throw DimensionError("transmit signal must have K bins");
  for (std::size_t i = 0; i < pilots.values.size(); ++i) {
    if (pilots.values[i] != 1 && pilots.values[i] != -1)
      throw FormatError("pilot entry (" + std::to_string(i % pilots.rows) + ", " + std::to_string(i / pilots.rows) +
                        ") is not +1/-1");
  }
  CVector inv_x(K);
  for (Eigen::Index nu = 0; nu < K; ++nu) {
    if (xbar.bins[nu] == Complex(0.0, 0.0))
      throw ValidationError("transmit signal is zero at subcarrier " + std::to_string(nu));
    inv_x[nu] = 1.0 / xbar.bins[nu];
  }

  if (layout.empty() || layout[0] != PilotBlock::hadamard)
    throw FormatError("first N pilot columns are not the Sylvester Hadamard matrix");

  ChannelEstimate est;
  est.dims = dims;
  est.pilot_power = std::norm(xbar.bins[0]);
  const double inv_n = 1.0 / static_cast<double>(N);

  if (layout.size() == 1) {
    CMatrix c = equalized_block(received, inv_x, 0, N);
    kernels::omp::fwht_columns(c);
    est.element_freq = c * inv_n;
    est.direct_freq.bins = CVector::Zero(K);
    est.aliasing_resolved = false;
    est.pilot_blocks = 1;
    return est;
  }

  const bool paired = layout.size() == 4 && layout[1] == PilotBlock::negated && layout[2] == PilotBlock::shifted &&
                      layout[3] == PilotBlock::negated_shifted;
  if (!paired) throw FormatError("unsupported pilot layout: expected N columns or the 4N paired Hadamard set");

  const auto R0 = received.middleCols(0, N), R1 = received.middleCols(N, N);
  const auto R2 = received.middleCols(2 * N, N), R3 = received.middleCols(3 * N, N);

  // Paired sums cancel every element and leave 2d; paired differences cancel d.
  const CVector total = (R0 + R1 + R2 + R3).rowwise().sum();
  est.direct_freq.bins = total.cwiseProduct(inv_x) * (0.25 * inv_n);

  CMatrix plain = equalized_block(0.5 * (R0 - R1), inv_x, 0, N);
  CMatrix shifted = equalized_block(0.5 * (R2 - R3), inv_x, 0, N);
  kernels::omp::fwht_columns(plain);
  kernels::omp::fwht_columns(shifted);
  // The shifted block resolves element m+1 at index m.
  est.element_freq.resize(N, K);
  est.element_freq.bottomRows(N - 1) = (plain.bottomRows(N - 1) + shifted.topRows(N - 1)) * (0.5 * inv_n);
  est.element_freq.row(0) = (plain.row(0) + shifted.row(N - 1)) * (0.5 * inv_n);
  est.aliasing_resolved = true;
  est.pilot_blocks = 4;
  return est;
}

ChannelEstimate invert_hadamard_pilots(const PilotDataset& dataset, std::size_t user) {
  if (user >= dataset.received.size())
    throw DimensionError("user " + std::to_string(user) + " not in dataset of " +
                         std::to_string(dataset.received.size()));
  return invert_hadamard_pilots(dataset.received[user], dataset.pilot_matrix, dataset.transmit_signal, dataset.dims);
}

ChannelEstimate project_to_delay_subspace(const ChannelEstimate& estimate) {
  const SystemDims& dims = estimate.dims;
  dims.validate();
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  const double inv_k = 1.0 / static_cast<double>(dims.K);
  ChannelEstimate out = estimate;
  out.element_taps = (estimate.element_freq * F.conjugate()) * inv_k;
  out.element_freq = out.element_taps * F.transpose();
  out.direct_taps.taps = (F.adjoint() * estimate.direct_freq.bins) * inv_k;
  out.direct_freq.bins = F * out.direct_taps.taps;
  out.projected = true;
  return out;
}

double estimate_noise_variance(const ChannelEstimate& raw, const ChannelEstimate& projected) {
  const SystemDims& dims = raw.dims;
  if (dims.K <= dims.M) throw DimensionError("noise estimate needs K > M");
  if (!projected.projected) throw ValidationError("noise estimate needs a projected estimate");
  if (raw.element_freq.rows() != projected.element_freq.rows() || raw.element_freq.cols() != projected.element_freq.cols())
    throw DimensionError("raw and projected estimates differ in shape");
  const double residual = (raw.element_freq - projected.element_freq).squaredNorm();
  const double N = static_cast<double>(dims.N);
  const double per_element_bin = residual / (N * static_cast<double>(dims.K - dims.M));
  return per_element_bin * N * static_cast<double>(raw.pilot_blocks) * raw.pilot_power;
}

ChannelEstimate estimate_channel(const CMatrix& received, const SignMatrix& pilots, const FrequencySignal& xbar,
                                 const SystemDims& dims) {
  return estimate_channel(received, pilots, pilot_layout(pilots), xbar, dims);
}

ChannelEstimate estimate_channel(const CMatrix& received, const SignMatrix& pilots, const std::vector<PilotBlock>& layout,
                                 const FrequencySignal& xbar, const SystemDims& dims) {
  const ChannelEstimate raw = invert_hadamard_pilots(received, pilots, layout, xbar, dims);
  ChannelEstimate out = project_to_delay_subspace(raw);
  out.noise_variance_estimate = estimate_noise_variance(raw, out);
  return out;
}

ChannelEstimate estimate_channel(const PilotDataset& dataset, std::size_t user) {
  if (user >= dataset.received.size())
    throw DimensionError("user " + std::to_string(user) + " not in dataset of " +
                         std::to_string(dataset.received.size()));
  return estimate_channel(dataset.received[user], dataset.pilot_matrix, dataset.transmit_signal, dataset.dims);
}

}  // namespace irs
