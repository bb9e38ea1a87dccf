#include "irs/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "irs/channel.hpp"
#include "irs/rng.hpp"
#include "irs/transforms.hpp"

namespace irs {

double true_rate(const GroundTruthScenario& scenario, std::size_t user, const IrsConfiguration& theta, double power,
                 double bandwidth, double noise_psd) {
  if (user >= scenario.users.size())
    throw DimensionError("user " + std::to_string(user) + " not in scenario of " + std::to_string(scenario.users.size()));
  const SystemDims& dims = scenario.config.dims;
  const auto hbar = dft_channel(compose_channel(scenario.users[user].model, theta), dims);
  return achievable_rate(hbar.bins, dims, power / (bandwidth * noise_psd), bandwidth);
}

double weighted_average_rate(std::span<const UserRate> entries) {
  if (entries.empty()) throw ValidationError("weighted average of an empty user set");
  double num = 0.0, den = 0.0;
  for (const auto& e : entries) {
    const double w = e.los ? 1.0 : 2.0;
    num += w * e.true_rate;
    den += w;
  }
  return num / den;
}

ChannelEstimate exact_estimate(const AffineChannelModel& model, const SystemDims& dims) {
  ChannelEstimate est;
  est.dims = dims;
  est.element_taps = model.elements;
  est.direct_taps.taps = model.direct;
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  est.element_freq = model.elements * F.transpose();
  est.direct_freq.bins = F * model.direct;
  est.aliasing_resolved = true;
  est.projected = true;
  return est;
}

double dominant_subcarrier_gain(const AffineChannelModel& model, const SystemDims& dims, const IrsConfiguration& theta) {
  const auto hbar = dft_channel(compose_channel(model, theta), dims);
  Eigen::Index strongest = 0;
  hbar.bins.cwiseAbs2().maxCoeff(&strongest);
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  const CVector row = F.row(strongest).transpose();
  const Complex d = F.row(strongest) * model.direct;
  const double mean_power = std::norm(d) + (model.elements * row).squaredNorm();
  return mean_power > 0.0 ? std::norm(hbar.bins[strongest]) / mean_power : 0.0;
}

namespace {

std::vector<UserRate> score(const GroundTruthScenario& scenario, const std::vector<IrsConfiguration>& thetas) {
  const auto& cfg = scenario.config;
  std::vector<UserRate> rates(thetas.size());
  for (std::size_t u = 0; u < thetas.size(); ++u) {
    rates[u].user = u;
    rates[u].los = scenario.users[u].los;
    rates[u].true_rate = true_rate(scenario, u, thetas[u], cfg.power, cfg.bandwidth, cfg.noise_psd);
  }
  return rates;
}

}  // namespace

RateReport compare_report(const GroundTruthScenario& scenario, std::span<const ConfigurationResult> results,
                          const BaselineOptions& options) {
  const auto& cfg = scenario.config;
  const SystemDims& dims = cfg.dims;
  if (results.size() != scenario.users.size())
    throw ValidationError("results cover " + std::to_string(results.size()) + " users, scenario has " +
                          std::to_string(scenario.users.size()));
  const std::size_t users = scenario.users.size();

  std::vector<IrsConfiguration> submitted(users);
  for (std::size_t u = 0; u < users; ++u) {
    if (results[u].theta.size() != dims.N)
      throw DimensionError("result for user " + std::to_string(u) + " has wrong length");
    submitted[u] = results[u].theta;
  }

  RateReport report;
  report.per_user = score(scenario, submitted);
  double gap_sum = 0.0;
  double gain_sum = 0.0;
  for (std::size_t u = 0; u < users; ++u) {
    auto& e = report.per_user[u];
    e.predicted_rate = results[u].predicted_rate;
    const double gap = e.true_rate > 0.0 ? std::abs(e.predicted_rate - e.true_rate) / e.true_rate : 0.0;
    gap_sum += gap;
    report.max_relative_gap = std::max(report.max_relative_gap, gap);
    gain_sum += dominant_subcarrier_gain(scenario.users[u].model, dims, submitted[u]);
  }
  report.weighted_average = weighted_average_rate(report.per_user);
  report.mean_relative_gap = gap_sum / static_cast<double>(users);
  report.mean_snr_gain = gain_sum / static_cast<double>(users);
  report.snr_gain_over_array_gain = report.mean_snr_gain / (static_cast<double>(dims.N) / std::numbers::pi);

  std::vector<IrsConfiguration> random(users);
  for (std::size_t u = 0; u < users; ++u) {
    Rng rng(stream_seed(options.seed, stream_tag::random_baseline, u));
    random[u] = random_configuration(rng, dims.N);
  }
  report.baselines["random"] = weighted_average_rate(score(scenario, random));
  report.baselines["all-ones"] =
      weighted_average_rate(score(scenario, std::vector<IrsConfiguration>(users, IrsConfiguration::all_ones(dims.N))));

  if (options.include_oracle && dims.N <= kMaxExhaustiveElements) {
    OptimizationSettings s;
    s.snr_scale = cfg.power / (cfg.bandwidth * cfg.noise_psd);
    s.bandwidth = cfg.bandwidth;
    std::vector<IrsConfiguration> oracle(users);
    for (std::size_t u = 0; u < users; ++u)
      oracle[u] = exhaustive_oracle(exact_estimate(scenario.users[u].model, dims), s).theta;
    report.baselines["oracle"] = weighted_average_rate(score(scenario, oracle));
  }
  return report;
}

nlohmann::json RateReport::to_json() const {
  nlohmann::json j;
  j["weightedAverage"] = weighted_average;
  j["weighting"] = weighting;
  j["baselines"] = baselines;
  j["meanRelativeGap"] = mean_relative_gap;
  j["maxRelativeGap"] = max_relative_gap;
  j["meanSnrGain"] = mean_snr_gain;
  j["snrGainOverArrayGain"] = snr_gain_over_array_gain;
  nlohmann::json users = nlohmann::json::array();
  for (const auto& e : per_user)
    users.push_back({{"user", e.user}, {"trueRate", e.true_rate}, {"predictedRate", e.predicted_rate}, {"los", e.los}});
  j["users"] = users;
  return j;
}

std::string RateReport::to_table() const {
  std::ostringstream os;
  os << std::setw(6) << "user" << std::setw(6) << "los" << std::setw(16) << "true [Mb/s]" << std::setw(16)
     << "pred [Mb/s]" << '\n';
  os << std::fixed << std::setprecision(4);
  for (const auto& e : per_user) {
    os << std::setw(6) << e.user << std::setw(6) << (e.los ? "yes" : "no") << std::setw(16) << e.true_rate / 1e6
       << std::setw(16) << e.predicted_rate / 1e6 << '\n';
  }
  os << "weighted average: " << weighted_average / 1e6 << " Mb/s (" << weighting << ")\n";
  for (const auto& [label, value] : baselines)
    os << "  baseline " << std::left << std::setw(10) << label << std::right << value / 1e6 << " Mb/s\n";
  os << std::setprecision(3) << "prediction gap: mean " << mean_relative_gap * 100 << " %, max "
     << max_relative_gap * 100 << " %\n";
  os << "strongest-subcarrier gain over random: " << mean_snr_gain << " (" << snr_gain_over_array_gain
     << " x N/pi)\n";
  return os.str();
}

}  // namespace irs
