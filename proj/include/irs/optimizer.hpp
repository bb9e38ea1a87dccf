#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "irs/estimator.hpp"
#include "irs/types.hpp"

namespace irs {

struct OptimizationSettings {
  // 0 selects the exact breakpoint sweep; G > 0 scans G uniformly spaced phases instead.
  std::size_t phase_grid_size = 0;
  // Each pass evaluates every candidate flip and applies the best one.
  std::size_t max_flip_passes = 20;
  // A flip is accepted only if it raises the rate by more than this fraction.
  double improvement_tolerance = 1e-6;
  double snr_scale = 1.0;    // P / (B N0)
  double bandwidth = 1e7;    // Hz

  void validate() const;
};

struct ConfigurationResult {
  IrsConfiguration theta;
  double predicted_rate = 0.0;  // bits/s under the estimate used
  std::string method;
  std::size_t flips_performed = 0;
};

/// hbar_theta from an estimate. Throws AliasingError when theta_0 = -1 and the
/// direct path is still folded into element 0.
CVector compose_estimated_response(const ChannelEstimate& estimate, const IrsConfiguration& theta);

/// Achievable rate of `theta` under the estimated channel.
double objective_rate(const ChannelEstimate& estimate, const IrsConfiguration& theta,
                      const OptimizationSettings& settings);

struct NarrowbandSolution {
  IrsConfiguration theta;
  double magnitude = 0.0;  // |d + sum_n theta_n g_n|
};

/// Maximizes |d + sum_n theta_n g_n| over theta in {-1,+1}^N.
///
/// The maximizer is theta_n = sign(Re(g_n e^{-j phi})) for the phase phi of the
/// optimal sum, and the sign pattern only changes where phi crosses
/// arg(g_n) +/- pi/2. Sweeping phi once around the circle through those 2N
/// breakpoints visits every candidate pattern, so the search is exact in
/// O(N log N). sign(0) is taken as +1.
NarrowbandSolution optimize_narrowband_exact(std::span<const Complex> g, Complex d,
                                             const OptimizationSettings& settings = {});

/// Dominant-tap narrowband initialization followed by greedy best-flip search
/// on the wideband rate. Requires a projected estimate.
ConfigurationResult optimize_wideband(const ChannelEstimate& estimate, const OptimizationSettings& settings);

/// Brute force over all 2^N configurations (N <= 20); ties go to the
/// lexicographically smallest theta with +1 < -1.
ConfigurationResult exhaustive_oracle(const ChannelEstimate& estimate, const OptimizationSettings& settings);

inline constexpr std::size_t kMaxExhaustiveElements = 20;

struct SubmissionShape {
  std::size_t elements = 4096;
  std::size_t users = 50;
};

struct SubmissionViolation {
  // -1 when the violation concerns the shape rather than one entry.
  long row = -1;
  long col = -1;
  std::string message;
};

std::vector<SubmissionViolation> validate_submission_matrix(const SignMatrix& theta, const SubmissionShape& shape);

/// Column l is user l's configuration. Throws ValidationError listing the
/// first violation with its coordinates.
SignMatrix export_submission(std::span<const ConfigurationResult> results, const SubmissionShape& shape = {});

}  // namespace irs
