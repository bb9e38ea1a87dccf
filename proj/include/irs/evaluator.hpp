#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "irs/optimizer.hpp"
#include "irs/simulator.hpp"

#include <json.hpp>

namespace irs {

struct UserRate {
  std::size_t user = 0;
  double true_rate = 0.0;       // bits/s on the ground-truth channel
  double predicted_rate = 0.0;  // bits/s under the estimate
  bool los = false;
};

/// Weighted mean with w = 2 for NLoS users and w = 1 for LoS users,
/// normalized by the sum of weights.
inline constexpr const char* kWeightingRule = "weighted mean: w=2 NLoS, w=1 LoS, normalized by sum of weights";

struct RateReport {
  std::vector<UserRate> per_user;
  double weighted_average = 0.0;
  std::map<std::string, double> baselines;  // label -> weighted average
  double mean_relative_gap = 0.0;           // mean |predicted - true| / true
  double max_relative_gap = 0.0;
  // Optimized over random-configuration power at each user's strongest subcarrier.
  double mean_snr_gain = 0.0;
  double snr_gain_over_array_gain = 0.0;    // mean_snr_gain / (N/pi)
  std::string weighting = kWeightingRule;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

/// Rate of `theta` on the ground-truth channel of `user`.
double true_rate(const GroundTruthScenario& scenario, std::size_t user, const IrsConfiguration& theta, double power,
                 double bandwidth, double noise_psd);

/// Throws ValidationError on empty input.
double weighted_average_rate(std::span<const UserRate> entries);

/// The ground-truth channel of one user packaged as a projected estimate with
/// the direct path resolved.
ChannelEstimate exact_estimate(const AffineChannelModel& model, const SystemDims& dims);

/// |hbar_theta[nu*]|^2 / E_random|hbar[nu*]|^2 at the subcarrier nu* where the
/// configured response is strongest; the denominator is |d[nu*]|^2 + sum_n |g_n[nu*]|^2.
double dominant_subcarrier_gain(const AffineChannelModel& model, const SystemDims& dims, const IrsConfiguration& theta);

struct BaselineOptions {
  std::uint64_t seed = 0;        // random-configuration baseline stream
  bool include_oracle = false;   // honoured only when N <= kMaxExhaustiveElements
};

/// Scores submitted configurations against ground truth plus the random,
/// all-ones and (small N) exhaustive-oracle baselines.
RateReport compare_report(const GroundTruthScenario& scenario, std::span<const ConfigurationResult> results,
                          const BaselineOptions& options);

}  // namespace irs
