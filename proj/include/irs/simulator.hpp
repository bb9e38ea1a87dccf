#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "irs/types.hpp"

namespace irs {

/// Parameters of the synthetic propagation environment.
struct ScenarioConfig {
  SystemDims dims{500, 20, 4096};
  double carrier_frequency = 4e9;  // Hz
  double bandwidth = 1e7;          // Hz, also the symbol rate
  double power = 1.0;              // W, pilot and data power per subcarrier
  double noise_psd = 0.0;          // W/Hz; <= 0 means calibrate to ~0 dB median random-config SNR
  std::size_t num_users = 50;
  double los_probability = 0.5;    // surface -> user line of sight
  std::size_t cluster_count = 3;
  double rician_factor = 10.0;     // LoS to scattered power on LoS surface links
  double direct_power_ratio = 0.1; // direct-path power relative to the summed cascaded power
  // Reflection of the -1 state relative to the +1 state. Exactly -1 is the
  // pure pi phase difference; anything else is folded into the affine model.
  Complex minus_state_gain{-1.0, 0.0};
  std::uint64_t seed = 0;

  void validate() const;
};

struct UserChannel {
  AffineChannelModel model;
  bool los = false;
};

/// config.noise_psd is always resolved (> 0) in a generated scenario.
struct GroundTruthScenario {
  ScenarioConfig config;
  std::vector<UserChannel> users;
};

/// Layout of the surface: rows x cols with rows = 2^floor(log2(N)/2).
std::pair<std::size_t, std::size_t> element_grid(std::size_t n);

GroundTruthScenario generate_scenario(const ScenarioConfig& config);

/// Noise PSD that puts the median per-subcarrier SNR of a random
/// configuration at 0 dB.
double calibrate_noise_psd(const std::vector<UserChannel>& users, const ScenarioConfig& config);

enum class PilotBlock { hadamard, negated, shifted, negated_shifted, other };

/// Pilot configurations as columns. Block 0 is H_N; further blocks cycle
/// through -H_N, H_N with rows shifted down by one, and its negation.
SignMatrix build_hadamard_pilots(const SystemDims& dims, std::size_t repetitions);

/// Identifies block `block` (columns [block*N, (block+1)*N)) of a pilot matrix.
PilotBlock classify_pilot_block(const SignMatrix& pilots, std::size_t block);

/// Per-block layout when the column count is a multiple of N, otherwise empty.
std::vector<PilotBlock> pilot_layout(const SignMatrix& pilots);

struct PilotDataset {
  SystemDims dims;
  SignMatrix pilot_matrix;         // N x T
  FrequencySignal transmit_signal; // K
  std::vector<CMatrix> received;   // per user, K x T
  double noise_psd = 0.0;          // nominal, W/Hz
  double bandwidth = 0.0;
  bool noiseless = false;
  std::uint64_t seed = 0;
};

/// Constant pilot with |xbar[nu]|^2 = power, i.e. average block power `power`.
FrequencySignal constant_pilot(const SystemDims& dims, double power);

/// Received K x T block for one user. Blocks recognised by pilot_layout are
/// synthesised with a fast Walsh-Hadamard transform; anything else falls back
/// to a dense product.
CMatrix simulate_user_pilots(const AffineChannelModel& model, const SystemDims& dims, const SignMatrix& pilots,
                             const FrequencySignal& xbar, double noise_variance, std::uint64_t noise_seed);

CMatrix simulate_user_pilots(const AffineChannelModel& model, const SystemDims& dims, const SignMatrix& pilots,
                             const std::vector<PilotBlock>& layout, const FrequencySignal& xbar, double noise_variance,
                             std::uint64_t noise_seed);

/// Noise sub-stream seed of user `user` under scenario seed `seed`.
std::uint64_t noise_seed_for_user(std::uint64_t seed, std::size_t user);

PilotDataset simulate_pilot_phase(const GroundTruthScenario& scenario, const SignMatrix& pilots, double power,
                                  bool noiseless);

}  // namespace irs
