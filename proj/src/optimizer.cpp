#include "irs/optimizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "irs/channel.hpp"
#include "irs/kernels.hpp"

namespace irs {

void OptimizationSettings::validate() const {
  if (max_flip_passes < 1) throw ValidationError("max_flip_passes must be positive");
  if (!(improvement_tolerance > 0.0)) throw ValidationError("improvement_tolerance must be positive");
  if (!(snr_scale > 0.0)) throw ValidationError("snr_scale must be positive");
  if (!(bandwidth > 0.0)) throw ValidationError("bandwidth must be positive");
}

namespace {

void check_theta(const ChannelEstimate& estimate, const IrsConfiguration& theta) {
  if (theta.size() != static_cast<std::size_t>(estimate.element_freq.rows()))
    throw DimensionError("configuration has " + std::to_string(theta.size()) + " entries, estimate has " +
                         std::to_string(estimate.element_freq.rows()) + " elements");
  if (!estimate.aliasing_resolved && theta.size() > 0 && theta[0] < 0)
    throw AliasingError("element 0 is confounded with the direct path; theta_0 must stay +1");
}

double rate_of(const CVector& h, const SystemDims& dims, const OptimizationSettings& s) {
  return achievable_rate(h, dims, s.snr_scale, s.bandwidth);
}

Eigen::VectorXd as_real(const IrsConfiguration& theta) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t n = 0; n < theta.size(); ++n) v[static_cast<Eigen::Index>(n)] = theta[n];
  return v;
}

Complex combine(std::span<const Complex> g, Complex d, std::span<const std::int8_t> s) {
  Complex sum = d;
  for (std::size_t n = 0; n < g.size(); ++n) sum += s[n] > 0 ? g[n] : -g[n];
  return sum;
}

std::int8_t sign_of(double x) { return x >= 0.0 ? std::int8_t{1} : std::int8_t{-1}; }

std::vector<std::int8_t> signs_at(std::span<const Complex> g, double phi) {
  const Complex rot = std::polar(1.0, -phi);
  std::vector<std::int8_t> s(g.size());
  for (std::size_t n = 0; n < g.size(); ++n) s[n] = sign_of((g[n] * rot).real());
  return s;
}

std::vector<std::int8_t> breakpoint_sweep(std::span<const Complex> g, Complex d) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  struct Event {
    double angle;
    std::size_t n;
  };
  std::vector<Event> events;
  events.reserve(2 * g.size());
  auto wrap = [](double a) {
    a = std::fmod(a, two_pi);
    return a < 0.0 ? a + two_pi : a;
  };
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (g[n] == Complex(0.0, 0.0)) continue;
    const double a = wrap(std::arg(g[n]) + std::numbers::pi / 2);
    events.push_back({a, n});
    events.push_back({wrap(a + std::numbers::pi), n});
  }
  if (events.empty()) return std::vector<std::int8_t>(g.size(), 1);
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.angle < b.angle || (a.angle == b.angle && a.n < b.n); });

  // Group coincident angles; each group is one breakpoint.
  std::vector<std::size_t> group_start;
  for (std::size_t i = 0; i < events.size(); ++i)
    if (i == 0 || events[i].angle != events[i - 1].angle) group_start.push_back(i);
  const std::size_t groups = group_start.size();
  auto group_angle = [&](std::size_t k) { return events[group_start[k % groups]].angle; };

  // Start in the widest arc so the initial signs are evaluated far from any breakpoint.
  std::size_t widest = 0;
  double widest_gap = -1.0;
  for (std::size_t k = 0; k < groups; ++k) {
    double gap = group_angle(k + 1) - group_angle(k);
    if (k + 1 == groups) gap += two_pi;
    if (gap > widest_gap) {
      widest_gap = gap;
      widest = k;
    }
  }
  const double phi0 = group_angle(widest) + widest_gap / 2.0;

  auto flip_group = [&](std::size_t k, std::vector<std::int8_t>& s, Complex& sum) {
    const std::size_t idx = k % groups;
    const std::size_t end = idx + 1 < groups ? group_start[idx + 1] : events.size();
    for (std::size_t i = group_start[idx]; i < end; ++i) {
      const std::size_t n = events[i].n;
      sum -= s[n] > 0 ? 2.0 * g[n] : -2.0 * g[n];
      s[n] = static_cast<std::int8_t>(-s[n]);
    }
  };

  std::vector<std::int8_t> s = signs_at(g, phi0);
  Complex sum = combine(g, d, s);
  double best = std::abs(sum);
  std::size_t best_steps = 0;
  for (std::size_t step = 1; step < groups; ++step) {
    flip_group(widest + step, s, sum);
    const double value = std::abs(sum);
    if (value > best) {
      best = value;
      best_steps = step;
    }
  }

  std::vector<std::int8_t> out = signs_at(g, phi0);
  Complex replay = d;
  for (std::size_t step = 1; step <= best_steps; ++step) flip_group(widest + step, out, replay);
  return out;
}

std::vector<std::int8_t> phase_grid_scan(std::span<const Complex> g, Complex d, std::size_t grid) {
  std::vector<std::int8_t> best_s(g.size(), 1);
  double best = std::abs(combine(g, d, best_s));
  for (std::size_t i = 0; i < grid; ++i) {
    const auto s = signs_at(g, 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid));
    const double value = std::abs(combine(g, d, s));
    if (value > best) {
      best = value;
      best_s = s;
    }
  }
  return best_s;
}

// +1 sorts before -1.
bool lexicographically_less(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  for (std::size_t n = 0; n < a.size(); ++n)
    if (a[n] != b[n]) return a[n] > b[n];
  return false;
}

}  // namespace

CVector compose_estimated_response(const ChannelEstimate& estimate, const IrsConfiguration& theta) {
  check_theta(estimate, theta);
  CVector h = estimate.direct_freq.bins;
  h.noalias() += estimate.element_freq.transpose() * as_real(theta).cast<Complex>();
  return h;
}

double objective_rate(const ChannelEstimate& estimate, const IrsConfiguration& theta,
                      const OptimizationSettings& settings) {
  return rate_of(compose_estimated_response(estimate, theta), estimate.dims, settings);
}

NarrowbandSolution optimize_narrowband_exact(std::span<const Complex> g, Complex d,
                                             const OptimizationSettings& settings) {
  auto states = settings.phase_grid_size > 0 ? phase_grid_scan(g, d, settings.phase_grid_size) : breakpoint_sweep(g, d);
  const double magnitude = std::abs(combine(g, d, states));
  return {IrsConfiguration(std::move(states)), magnitude};
}

ConfigurationResult optimize_wideband(const ChannelEstimate& estimate, const OptimizationSettings& settings) {
  settings.validate();
  if (!estimate.projected) throw ValidationError("optimize_wideband needs an estimate projected to the delay subspace");
  const SystemDims& dims = estimate.dims;
  const auto N = static_cast<Eigen::Index>(dims.N);
  const auto M = static_cast<Eigen::Index>(dims.M);
  const bool pinned = !estimate.aliasing_resolved;

  // (i) strongest delay tap, solved exactly as a narrowband problem.
  Eigen::Index dominant = 0;
  double dominant_energy = -1.0;
  for (Eigen::Index l = 0; l < M; ++l) {
    const double energy = estimate.element_taps.col(l).squaredNorm() + std::norm(estimate.direct_taps.taps[l]);
    if (energy > dominant_energy) {
      dominant_energy = energy;
      dominant = l;
    }
  }
  std::vector<Complex> gains(static_cast<std::size_t>(N));
  for (Eigen::Index n = 0; n < N; ++n) gains[static_cast<std::size_t>(n)] = estimate.element_taps(n, dominant);
  Complex direct = estimate.direct_taps.taps[dominant];
  std::span<const Complex> free_gains(gains);
  if (pinned && N > 0) {
    direct += gains[0];
    free_gains = free_gains.subspan(1);
  }
  const auto narrow = optimize_narrowband_exact(free_gains, direct, settings);
  std::vector<std::int8_t> init_states;
  if (pinned && N > 0) init_states.push_back(1);
  init_states.insert(init_states.end(), narrow.theta.states().begin(), narrow.theta.states().end());
  const IrsConfiguration initial(std::move(init_states));

  // (ii) greedy best single flip, O(K) incremental update per candidate.
  const CMatrix by_element = estimate.element_freq.transpose();  // K x N
  IrsConfiguration theta = initial;
  CVector h = compose_estimated_response(estimate, theta);
  double rate = rate_of(h, dims, settings);
  std::vector<std::uint8_t> skip(static_cast<std::size_t>(N), 0);
  if (pinned && N > 0) skip[0] = 1;
  std::vector<double> gain_bits(static_cast<std::size_t>(N));
  const double per_bit = settings.bandwidth / static_cast<double>(dims.block_length());
  std::size_t flips = 0;
  for (std::size_t pass = 0; pass < settings.max_flip_passes; ++pass) {
    kernels::omp::flip_rate_gains(by_element, h, theta.states(), skip, settings.snr_scale, gain_bits);
    const auto best = std::max_element(gain_bits.begin(), gain_bits.end());
    if (best == gain_bits.end()) break;
    const double improvement = *best * per_bit;
    if (!(improvement > settings.improvement_tolerance * std::max(rate, 0.0)) || !(improvement > 0.0)) break;
    const auto n = static_cast<Eigen::Index>(best - gain_bits.begin());
    const double step = theta[static_cast<std::size_t>(n)] > 0 ? -2.0 : 2.0;
    const CVector candidate = h + step * by_element.col(n);
    const double candidate_rate = rate_of(candidate, dims, settings);
    if (!(candidate_rate > rate)) break;
    h = candidate;
    rate = candidate_rate;
    theta.flip(static_cast<std::size_t>(n));
    ++flips;
  }

  // (iii) best of refined, initial, all-ones.
  ConfigurationResult result{theta, objective_rate(estimate, theta, settings), flips > 0 ? "greedy-refined" : "narrowband-init",
                             flips};
  const double initial_rate = objective_rate(estimate, initial, settings);
  if (initial_rate > result.predicted_rate) result = {initial, initial_rate, "narrowband-init", 0};
  const auto ones = IrsConfiguration::all_ones(dims.N);
  const double ones_rate = objective_rate(estimate, ones, settings);
  if (ones_rate > result.predicted_rate) result = {ones, ones_rate, "all-ones", 0};
  return result;
}

ConfigurationResult exhaustive_oracle(const ChannelEstimate& estimate, const OptimizationSettings& settings) {
  settings.validate();
  const SystemDims& dims = estimate.dims;
  if (dims.N > kMaxExhaustiveElements)
    throw ValidationError("exhaustive search refused for N=" + std::to_string(dims.N) + " (limit " +
                          std::to_string(kMaxExhaustiveElements) + ")");
  const bool pinned = !estimate.aliasing_resolved;
  std::vector<std::size_t> free;
  for (std::size_t n = pinned ? 1 : 0; n < dims.N; ++n) free.push_back(n);
  const std::size_t count = free.size();

  const CMatrix by_element = estimate.element_freq.transpose();
  IrsConfiguration theta = IrsConfiguration::all_ones(dims.N);
  CVector h = compose_estimated_response(estimate, theta);
  IrsConfiguration best_theta = theta;
  double best = rate_of(h, dims, settings);
  constexpr double tie = 1e-12;

  const std::uint64_t total = std::uint64_t{1} << count;
  for (std::uint64_t i = 1; i < total; ++i) {
    // Gray code: exactly one element changes per step.
    const auto bit = static_cast<std::size_t>(std::countr_zero(i));
    const std::size_t n = free[count - 1 - bit];
    h += (theta[n] > 0 ? -2.0 : 2.0) * by_element.col(static_cast<Eigen::Index>(n));
    theta.flip(n);
    if ((i & 1023) == 0) h = compose_estimated_response(estimate, theta);
    const double r = rate_of(h, dims, settings);
    const double scale = std::max(std::abs(best), std::abs(r));
    if (r > best + tie * scale) {
      best = r;
      best_theta = theta;
    } else if (std::abs(r - best) <= tie * scale && lexicographically_less(theta.states(), best_theta.states())) {
      best = std::max(best, r);
      best_theta = theta;
    }
  }
  return {best_theta, objective_rate(estimate, best_theta, settings), "exhaustive", 0};
}

std::vector<SubmissionViolation> validate_submission_matrix(const SignMatrix& theta, const SubmissionShape& shape) {
  std::vector<SubmissionViolation> out;
  if (theta.rows != shape.elements || theta.cols != shape.users) {
    out.push_back({-1, -1,
                   "shape is " + std::to_string(theta.rows) + "x" + std::to_string(theta.cols) + ", expected " +
                       std::to_string(shape.elements) + "x" + std::to_string(shape.users)});
  }
  if (theta.values.size() != theta.rows * theta.cols) {
    out.push_back({-1, -1, "value count does not match the declared shape"});
    return out;
  }
  for (std::size_t c = 0; c < theta.cols; ++c) {
    for (std::size_t r = 0; r < theta.rows; ++r) {
      const int v = theta(r, c);
      if (v != 1 && v != -1)
        out.push_back({static_cast<long>(r), static_cast<long>(c),
                       "entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is " + std::to_string(v) +
                           ", expected +1 or -1"});
    }
  }
  return out;
}

SignMatrix export_submission(std::span<const ConfigurationResult> results, const SubmissionShape& shape) {
  if (results.size() != shape.users)
    throw ValidationError("expected " + std::to_string(shape.users) + " results, got " + std::to_string(results.size()));
  SignMatrix theta(shape.elements, shape.users, 0);
  for (std::size_t c = 0; c < results.size(); ++c) {
    const auto states = results[c].theta.states();
    if (states.size() != shape.elements)
      throw ValidationError("result " + std::to_string(c) + " has " + std::to_string(states.size()) +
                            " elements, expected " + std::to_string(shape.elements));
    std::copy(states.begin(), states.end(), theta.values.begin() + static_cast<std::ptrdiff_t>(c * shape.elements));
  }
  const auto violations = validate_submission_matrix(theta, shape);
  if (!violations.empty()) throw ValidationError(violations.front().message);
  return theta;
}

}  // namespace irs
