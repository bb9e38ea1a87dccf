#include "irs/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "irs/channel.hpp"
#include "irs/kernels.hpp"
#include "irs/rng.hpp"
#include "irs/transforms.hpp"

namespace irs {

namespace {

constexpr double kSpeedOfLight = 299792458.0;

struct Path {
  Complex gain;
  double u = 0.0;  // direction cosines across the surface
  double v = 0.0;
  double delay_samples = 0.0;
};

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

std::pair<double, double> random_direction(Rng& rng) {
  std::uniform_real_distribution<double> az(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::uniform_real_distribution<double> el(-std::numbers::pi / 4, std::numbers::pi / 4);
  const double a = az(rng);
  const double e = el(rng);
  return {std::sin(a) * std::cos(e), std::sin(e)};
}

// cluster_count scattered paths with an exponential power-delay profile whose
// expected powers sum to total_power.
std::vector<Path> scattered_paths(Rng& rng, const ScenarioConfig& cfg, double total_power) {
  const double max_delay = std::max(0.0, static_cast<double>(cfg.dims.M) - 4.0);
  const double decay = std::max(1.0, max_delay / 3.0);
  std::uniform_real_distribution<double> delay(0.0, max_delay);
  std::vector<Path> paths(cfg.cluster_count);
  std::vector<double> weight(cfg.cluster_count);
  double weight_sum = 0.0;
  for (std::size_t c = 0; c < cfg.cluster_count; ++c) {
    paths[c].delay_samples = delay(rng);
    auto [u, v] = random_direction(rng);
    paths[c].u = u;
    paths[c].v = v;
    weight[c] = std::exp(-paths[c].delay_samples / decay);
    weight_sum += weight[c];
  }
  for (std::size_t c = 0; c < cfg.cluster_count; ++c)
    paths[c].gain = complex_gaussian(rng, total_power * weight[c] / weight_sum);
  return paths;
}

CVector sinc_taps(double delay_samples, std::size_t M) {
  CVector taps(static_cast<Eigen::Index>(M));
  for (std::size_t l = 0; l < M; ++l) taps[static_cast<Eigen::Index>(l)] = sinc(static_cast<double>(l) - delay_samples);
  return taps;
}

}  // namespace

void ScenarioConfig::validate() const {
  dims.validate();
  if (!(carrier_frequency > 0.0)) throw ValidationError("carrier frequency must be positive");
  if (!(bandwidth > 0.0)) throw ValidationError("bandwidth must be positive");
  if (!(power > 0.0)) throw ValidationError("power must be positive");
  if (num_users < 1) throw ValidationError("need at least one user");
  if (!(los_probability >= 0.0 && los_probability <= 1.0)) throw ValidationError("los_probability outside [0, 1]");
  if (cluster_count < 1) throw ValidationError("cluster_count must be at least 1");
  if (!(rician_factor >= 0.0)) throw ValidationError("rician_factor must be non-negative");
  if (!(direct_power_ratio >= 0.0)) throw ValidationError("direct_power_ratio must be non-negative");
  if (std::isnan(noise_psd)) throw ValidationError("noise_psd is NaN");
}

std::pair<std::size_t, std::size_t> element_grid(std::size_t n) {
  if (!is_power_of_two(n)) throw DimensionError("element count must be a power of two");
  const auto log2n = static_cast<std::size_t>(std::countr_zero(n));
  const std::size_t rows = std::size_t{1} << (log2n / 2);
  return {rows, n / rows};
}

GroundTruthScenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  const SystemDims& dims = config.dims;
  const auto N = static_cast<Eigen::Index>(dims.N);
  const auto M = static_cast<Eigen::Index>(dims.M);

  Rng rng(config.seed);
  const double wavelength = kSpeedOfLight / config.carrier_frequency;
  const double spacing = wavelength / 2.0;
  const double wavenumber = 2.0 * std::numbers::pi / wavelength;
  const auto [grid_rows, grid_cols] = element_grid(dims.N);
  (void)grid_rows;

  std::vector<double> xs(dims.N), ys(dims.N);
  for (std::size_t n = 0; n < dims.N; ++n) {
    xs[n] = static_cast<double>(n % grid_cols) * spacing;
    ys[n] = static_cast<double>(n / grid_cols) * spacing;
  }

  // Base station -> surface: a fixed line-of-sight plane wave.
  const auto [bs_u, bs_v] = random_direction(rng);
  CVector incident(N);
  for (Eigen::Index n = 0; n < N; ++n)
    incident[n] = std::polar(1.0, wavenumber * (xs[static_cast<std::size_t>(n)] * bs_u + ys[static_cast<std::size_t>(n)] * bs_v));

  const double max_delay = std::max(0.0, static_cast<double>(dims.M) - 4.0);
  std::uniform_real_distribution<double> uniform01(0.0, 1.0);
  const double element_scale = 1.0 / std::sqrt(static_cast<double>(dims.N));

  GroundTruthScenario scenario;
  scenario.config = config;
  scenario.users.resize(config.num_users);
  for (auto& user : scenario.users) {
    user.los = uniform01(rng) < config.los_probability;

    // Base station -> user is always non-line-of-sight.
    const auto direct_paths = scattered_paths(rng, config, config.direct_power_ratio);
    user.model.direct = CVector::Zero(M);
    for (const auto& p : direct_paths) user.model.direct += p.gain * sinc_taps(p.delay_samples, dims.M);

    std::vector<Path> cascade;
    double scattered_power = 1.0;
    if (user.los) {
      const double k = config.rician_factor;
      Path los;
      const auto [u, v] = random_direction(rng);
      los.u = u;
      los.v = v;
      los.delay_samples = uniform01(rng) * max_delay;
      los.gain = std::polar(std::sqrt(k / (k + 1.0)), 2.0 * std::numbers::pi * uniform01(rng));
      cascade.push_back(los);
      scattered_power = 1.0 / (k + 1.0);
    }
    const auto clusters = scattered_paths(rng, config, scattered_power);
    cascade.insert(cascade.end(), clusters.begin(), clusters.end());

    user.model.elements = CMatrix::Zero(N, M);
    for (const auto& p : cascade) {
      const CVector taps = sinc_taps(p.delay_samples, dims.M);
      for (Eigen::Index n = 0; n < N; ++n) {
        const auto i = static_cast<std::size_t>(n);
        const Complex phase = std::polar(1.0, wavenumber * (xs[i] * p.u + ys[i] * p.v));
        user.model.elements.row(n) += (element_scale * incident[n] * p.gain * phase) * taps.transpose();
      }
    }

    const Complex gamma = config.minus_state_gain;
    if (gamma != Complex(-1.0, 0.0)) {
      // theta=+1 -> g, theta=-1 -> gamma*g, rewritten as d' + theta*g'.
      user.model.direct += (1.0 + gamma) / 2.0 * user.model.elements.colwise().sum().transpose();
      user.model.elements *= (1.0 - gamma) / 2.0;
    }
  }

  if (!(scenario.config.noise_psd > 0.0)) scenario.config.noise_psd = calibrate_noise_psd(scenario.users, config);
  return scenario;
}

double calibrate_noise_psd(const std::vector<UserChannel>& users, const ScenarioConfig& config) {
  Rng rng(stream_seed(config.seed, stream_tag::calibration));
  std::vector<double> received_power;
  received_power.reserve(users.size() * config.dims.K);
  for (const auto& user : users) {
    const auto theta = random_configuration(rng, config.dims.N);
    const auto hbar = dft_channel(compose_channel(user.model, theta), config.dims);
    for (Eigen::Index nu = 0; nu < hbar.bins.size(); ++nu)
      received_power.push_back(config.power * std::norm(hbar.bins[nu]) / config.bandwidth);
  }
  if (received_power.empty()) return 1.0;
  auto mid = received_power.begin() + static_cast<std::ptrdiff_t>(received_power.size() / 2);
  std::nth_element(received_power.begin(), mid, received_power.end());
  return *mid > 0.0 ? *mid : 1.0;
}

SignMatrix build_hadamard_pilots(const SystemDims& dims, std::size_t repetitions) {
  if (repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (!is_power_of_two(dims.N)) throw DimensionError("Hadamard pilots need a power-of-two N");
  const std::size_t N = dims.N;
  SignMatrix pilots(N, repetitions * N);
  for (std::size_t b = 0; b < repetitions; ++b) {
    const bool negate = (b % 2) == 1;
    const bool shift = (b % 4) >= 2;
    for (std::size_t t = 0; t < N; ++t) {
      for (std::size_t n = 0; n < N; ++n) {
        const std::size_t row = shift ? (n + N - 1) % N : n;
        const std::int8_t e = sylvester_entry(row, t);
        pilots(n, b * N + t) = negate ? static_cast<std::int8_t>(-e) : e;
      }
    }
  }
  return pilots;
}

PilotBlock classify_pilot_block(const SignMatrix& pilots, std::size_t block) {
  const std::size_t N = pilots.rows;
  if (!is_power_of_two(N) || (block + 1) * N > pilots.cols) return PilotBlock::other;
  bool plain = true, neg = true, sh = true, negsh = true;
  for (std::size_t t = 0; t < N && (plain || neg || sh || negsh); ++t) {
    const auto col = pilots.column(block * N + t);
    for (std::size_t n = 0; n < N; ++n) {
      const std::int8_t e = sylvester_entry(n, t);
      const std::int8_t s = sylvester_entry((n + N - 1) % N, t);
      plain = plain && col[n] == e;
      neg = neg && col[n] == -e;
      sh = sh && col[n] == s;
      negsh = negsh && col[n] == -s;
    }
  }
  if (plain) return PilotBlock::hadamard;
  if (neg) return PilotBlock::negated;
  if (sh) return PilotBlock::shifted;
  if (negsh) return PilotBlock::negated_shifted;
  return PilotBlock::other;
}

std::vector<PilotBlock> pilot_layout(const SignMatrix& pilots) {
  std::vector<PilotBlock> layout;
  if (pilots.rows == 0 || pilots.cols % pilots.rows != 0) return layout;
  for (std::size_t b = 0; b < pilots.cols / pilots.rows; ++b) layout.push_back(classify_pilot_block(pilots, b));
  return layout;
}

FrequencySignal constant_pilot(const SystemDims& dims, double power) {
  return {CVector::Constant(static_cast<Eigen::Index>(dims.K), Complex(std::sqrt(power), 0.0))};
}

namespace {

CMatrix simulate_user_pilots_impl(const AffineChannelModel& model, const SystemDims& dims, const SignMatrix& pilots,
                                  const std::vector<PilotBlock>& layout, const FrequencySignal& xbar,
                                  double noise_variance, std::uint64_t noise_seed) {
  const auto K = static_cast<Eigen::Index>(dims.K);
  const auto N = static_cast<Eigen::Index>(dims.N);
  const auto T = static_cast<Eigen::Index>(pilots.cols);
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  const CMatrix element_bins = model.elements * F.transpose();  // N x K
  const CVector direct_bins = F * model.direct;

  // Column t of `combined` is sum_n P(n, t) * element_bins.row(n), as K bins.
  CMatrix combined(K, T);
  if (!layout.empty()) {
    for (std::size_t b = 0; b < layout.size(); ++b) {
      const Eigen::Index first = static_cast<Eigen::Index>(b) * N;
      if (layout[b] == PilotBlock::other) {
        Eigen::MatrixXd block(N, N);
        for (Eigen::Index t = 0; t < N; ++t)
          for (Eigen::Index n = 0; n < N; ++n)
            block(n, t) = pilots(static_cast<std::size_t>(n), static_cast<std::size_t>(first + t));
        combined.middleCols(first, N).noalias() = element_bins.transpose() * block.cast<Complex>();
        continue;
      }
      CMatrix work(N, K);
      const bool shifted = layout[b] == PilotBlock::shifted || layout[b] == PilotBlock::negated_shifted;
      if (shifted) {
        work.topRows(N - 1) = element_bins.bottomRows(N - 1);
        work.row(N - 1) = element_bins.row(0);
      } else {
        work = element_bins;
      }
      kernels::omp::fwht_columns(work);
      if (layout[b] == PilotBlock::negated || layout[b] == PilotBlock::negated_shifted)
        combined.middleCols(first, N) = -work.transpose();
      else
        combined.middleCols(first, N) = work.transpose();
    }
  } else {
    Eigen::MatrixXd dense(pilots.rows, pilots.cols);
    for (std::size_t t = 0; t < pilots.cols; ++t)
      for (std::size_t n = 0; n < pilots.rows; ++n)
        dense(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t)) = pilots(n, t);
    combined.noalias() = element_bins.transpose() * dense.cast<Complex>();
  }

  Rng rng(noise_seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(noise_variance / 2.0));
  for (Eigen::Index t = 0; t < T; ++t) {
    auto out = combined.col(t);
    out = (out + direct_bins).cwiseProduct(xbar.bins);
    if (noise_variance > 0.0) {
      for (Eigen::Index nu = 0; nu < K; ++nu) {
        const double re = normal(rng);
        const double im = normal(rng);
        out[nu] += Complex(re, im);
      }
    }
  }
  return combined;
}

}  // namespace

CMatrix simulate_user_pilots(const AffineChannelModel& model, const SystemDims& dims, const SignMatrix& pilots,
                             const FrequencySignal& xbar, double noise_variance, std::uint64_t noise_seed) {
  if (pilots.rows != dims.N || model.num_elements() != dims.N)
    throw DimensionError("pilot matrix rows and model elements must both equal N=" + std::to_string(dims.N));
  if (model.num_taps() != dims.M || static_cast<std::size_t>(xbar.bins.size()) != dims.K)
    throw DimensionError("model taps or pilot signal length do not match dims");
  return simulate_user_pilots(model, dims, pilots, pilot_layout(pilots), xbar, noise_variance, noise_seed);
}

CMatrix simulate_user_pilots(const AffineChannelModel& model, const SystemDims& dims, const SignMatrix& pilots,
                             const std::vector<PilotBlock>& layout, const FrequencySignal& xbar, double noise_variance,
                             std::uint64_t noise_seed) {
  if (pilots.rows != dims.N || model.num_elements() != dims.N)
    throw DimensionError("pilot matrix rows and model elements must both equal N=" + std::to_string(dims.N));
  if (model.num_taps() != dims.M || static_cast<std::size_t>(xbar.bins.size()) != dims.K)
    throw DimensionError("model taps or pilot signal length do not match dims");
  if (!layout.empty() && layout.size() * dims.N != pilots.cols) throw DimensionError("pilot layout does not cover the matrix");
  return simulate_user_pilots_impl(model, dims, pilots, layout, xbar, noise_variance, noise_seed);
}

std::uint64_t noise_seed_for_user(std::uint64_t seed, std::size_t user) {
  return stream_seed(seed, stream_tag::noise, user);
}

PilotDataset simulate_pilot_phase(const GroundTruthScenario& scenario, const SignMatrix& pilots, double power,
                                  bool noiseless) {
  const SystemDims& dims = scenario.config.dims;
  if (pilots.rows != dims.N)
    throw DimensionError("pilot matrix has " + std::to_string(pilots.rows) + " rows, expected N=" +
                         std::to_string(dims.N));
  for (std::size_t i = 0; i < pilots.values.size(); ++i) {
    if (pilots.values[i] != 1 && pilots.values[i] != -1)
      throw ValidationError("pilot entry (" + std::to_string(i % pilots.rows) + ", " +
                            std::to_string(i / pilots.rows) + ") is not +1/-1");
  }
  for (const auto& user : scenario.users) {
    if (user.model.num_elements() != dims.N || user.model.num_taps() != dims.M)
      throw DimensionError("user model does not match scenario dims");
  }

  PilotDataset out;
  out.dims = dims;
  out.pilot_matrix = pilots;
  out.transmit_signal = constant_pilot(dims, power);
  out.noise_psd = scenario.config.noise_psd;
  out.bandwidth = scenario.config.bandwidth;
  out.noiseless = noiseless;
  out.seed = scenario.config.seed;
  out.received.resize(scenario.users.size());

  const double noise_variance = noiseless ? 0.0 : scenario.config.noise_psd * scenario.config.bandwidth;
  const auto layout = pilot_layout(pilots);
  const auto users = static_cast<std::ptrdiff_t>(scenario.users.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t u = 0; u < users; ++u) {
    const auto i = static_cast<std::size_t>(u);
    out.received[i] = simulate_user_pilots_impl(scenario.users[i].model, dims, pilots, layout, out.transmit_signal,
                                                noise_variance,
                                                noise_seed_for_user(scenario.config.seed, i));
  }
  return out;
}

}  // namespace irs
