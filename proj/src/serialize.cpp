#include "irs/serialize.hpp"

#include <string>

#include "irs/transforms.hpp"

namespace irs {

namespace {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

void expect_shape(const DatasetFile& file, std::string_view name, const Shape& shape) {
  const auto& a = file.array(name);
  if (a.shape != shape)
    throw ValidationError(file.role + " array '" + a.name + "' has shape " + shape_string(a.shape) + ", expected " +
                          shape_string(shape));
}

std::size_t trailing(const DatasetFile& file, std::string_view name, std::size_t axis) {
  const auto& a = file.array(name);
  if (a.shape.size() <= axis) throw ValidationError("array '" + a.name + "' has too few axes");
  return a.shape[axis];
}

std::vector<Complex> flatten(const CMatrix& m) {
  return {m.data(), m.data() + m.size()};
}

CMatrix block(const std::vector<Complex>& flat, std::size_t offset, std::size_t rows, std::size_t cols) {
  return Eigen::Map<const CMatrix>(flat.data() + offset, static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

}  // namespace

nlohmann::json config_to_json(const ScenarioConfig& c) {
  return {{"K", c.dims.K},
          {"M", c.dims.M},
          {"N", c.dims.N},
          {"users", c.num_users},
          {"seed", c.seed},
          {"carrier_frequency", c.carrier_frequency},
          {"bandwidth", c.bandwidth},
          {"power", c.power},
          {"noise_psd", c.noise_psd},
          {"los_probability", c.los_probability},
          {"cluster_count", c.cluster_count},
          {"rician_factor", c.rician_factor},
          {"direct_power_ratio", c.direct_power_ratio},
          {"minus_state_gain_re", c.minus_state_gain.real()},
          {"minus_state_gain_im", c.minus_state_gain.imag()}};
}

ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig c) {
  if (!j.is_object()) throw ValidationError("configuration must be a JSON object");
  auto take = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  try {
    take("K", c.dims.K);
    take("M", c.dims.M);
    take("N", c.dims.N);
    take("users", c.num_users);
    take("seed", c.seed);
    take("carrier_frequency", c.carrier_frequency);
    take("bandwidth", c.bandwidth);
    take("power", c.power);
    take("noise_psd", c.noise_psd);
    take("los_probability", c.los_probability);
    take("cluster_count", c.cluster_count);
    take("rician_factor", c.rician_factor);
    take("direct_power_ratio", c.direct_power_ratio);
    double re = c.minus_state_gain.real(), im = c.minus_state_gain.imag();
    take("minus_state_gain_re", re);
    take("minus_state_gain_im", im);
    c.minus_state_gain = {re, im};
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("configuration: ") + e.what());
  }
  return c;
}

DatasetFile scenario_to_file(const GroundTruthScenario& scenario) {
  const auto& dims = scenario.config.dims;
  const std::size_t U = scenario.users.size();
  DatasetFile f;
  f.role = "scenario";
  f.dims = dims;
  f.meta["config"] = config_to_json(scenario.config);
  std::vector<Complex> direct, elements;
  std::vector<double> los;
  direct.reserve(dims.M * U);
  elements.reserve(dims.N * dims.M * U);
  for (const auto& user : scenario.users) {
    const auto d = flatten(user.model.direct);
    const auto e = flatten(user.model.elements);
    direct.insert(direct.end(), d.begin(), d.end());
    elements.insert(elements.end(), e.begin(), e.end());
    los.push_back(user.los ? 1.0 : 0.0);
  }
  f.add("directTaps", {dims.M, U}, std::move(direct));
  f.add("elementTaps", {dims.N, dims.M, U}, std::move(elements));
  f.add("losFlag", {U}, std::move(los));
  return f;
}

GroundTruthScenario scenario_from_file(const DatasetFile& file) {
  validate_schema(file);
  if (file.role != "scenario") throw ValidationError("expected a scenario file, got role " + file.role);
  GroundTruthScenario s;
  if (!file.meta.contains("config")) throw ValidationError("scenario file lacks meta.config");
  s.config = config_from_json(file.meta.at("config"));
  if (!(s.config.dims == file.dims)) throw ValidationError("scenario config dims contradict the header dims");
  const auto& dims = file.dims;
  const auto& direct = file.complex_data("directTaps");
  const auto& elements = file.complex_data("elementTaps");
  const auto& los = file.real_data("losFlag");
  const std::size_t U = los.size();
  if (U != s.config.num_users) throw ValidationError("scenario user count contradicts meta.config.users");
  s.users.resize(U);
  for (std::size_t u = 0; u < U; ++u) {
    s.users[u].model.direct = block(direct, u * dims.M, dims.M, 1);
    s.users[u].model.elements = block(elements, u * dims.N * dims.M, dims.N, dims.M);
    s.users[u].los = los[u] != 0.0;
  }
  return s;
}

DatasetFile pilots_to_file(const PilotDataset& d) {
  const std::size_t T = d.pilot_matrix.cols;
  const std::size_t U = d.received.size();
  DatasetFile f;
  f.role = "pilots";
  f.dims = d.dims;
  f.meta = {{"noisePsd", d.noise_psd}, {"bandwidth", d.bandwidth}, {"noiseless", d.noiseless}, {"seed", d.seed}};
  f.add("pilotMatrix", {d.dims.N, T}, d.pilot_matrix.values);
  f.add("transmitSignal", {d.dims.K, 1}, flatten(d.transmit_signal.bins));
  std::vector<Complex> received;
  received.reserve(d.dims.K * T * U);
  for (const auto& r : d.received) received.insert(received.end(), r.data(), r.data() + r.size());
  f.add("receivedSignal", {d.dims.K, T, U}, std::move(received));
  return f;
}

PilotDataset pilots_from_file(const DatasetFile& file) {
  validate_schema(file);
  if (file.role != "pilots") throw ValidationError("expected a pilots file, got role " + file.role);
  PilotDataset d;
  d.dims = file.dims;
  const std::size_t T = trailing(file, "pilotMatrix", 1);
  d.pilot_matrix = SignMatrix(file.dims.N, T);
  d.pilot_matrix.values = file.int8_data("pilotMatrix");
  d.transmit_signal.bins = block(file.complex_data("transmitSignal"), 0, file.dims.K, 1);
  const auto& received = file.complex_data("receivedSignal");
  const std::size_t U = trailing(file, "receivedSignal", 2);
  d.received.resize(U);
  for (std::size_t u = 0; u < U; ++u) d.received[u] = block(received, u * file.dims.K * T, file.dims.K, T);
  d.noise_psd = file.meta.value("noisePsd", 0.0);
  d.bandwidth = file.meta.value("bandwidth", 0.0);
  d.noiseless = file.meta.value("noiseless", false);
  d.seed = file.meta.value("seed", std::uint64_t{0});
  return d;
}

DatasetFile estimates_to_file(const std::vector<ChannelEstimate>& estimates, const nlohmann::json& meta) {
  if (estimates.empty()) throw ValidationError("no estimates to write");
  const SystemDims dims = estimates.front().dims;
  const std::size_t U = estimates.size();
  DatasetFile f;
  f.role = "estimate";
  f.dims = dims;
  f.meta = meta.is_object() ? meta : nlohmann::json::object();
  std::vector<Complex> direct_freq, direct_taps, element_taps;
  std::vector<double> noise;
  nlohmann::json resolved = nlohmann::json::array(), blocks = nlohmann::json::array(),
                 power = nlohmann::json::array();
  for (const auto& e : estimates) {
    if (!(e.dims == dims)) throw ValidationError("estimates disagree on dims");
    if (!e.projected) throw ValidationError("only projected estimates can be stored");
    const auto df = flatten(e.direct_freq.bins), dt = flatten(e.direct_taps.taps), et = flatten(e.element_taps);
    direct_freq.insert(direct_freq.end(), df.begin(), df.end());
    direct_taps.insert(direct_taps.end(), dt.begin(), dt.end());
    element_taps.insert(element_taps.end(), et.begin(), et.end());
    noise.push_back(e.noise_variance_estimate);
    resolved.push_back(e.aliasing_resolved);
    blocks.push_back(e.pilot_blocks);
    power.push_back(e.pilot_power);
  }
  f.meta["aliasingResolved"] = resolved;
  f.meta["pilotBlocks"] = blocks;
  f.meta["pilotPower"] = power;
  f.add("directFreq", {dims.K, U}, std::move(direct_freq));
  f.add("directTaps", {dims.M, U}, std::move(direct_taps));
  f.add("elementTaps", {dims.N, dims.M, U}, std::move(element_taps));
  f.add("noiseVariance", {U}, std::move(noise));
  return f;
}

std::vector<ChannelEstimate> estimates_from_file(const DatasetFile& file) {
  validate_schema(file);
  if (file.role != "estimate") throw ValidationError("expected an estimate file, got role " + file.role);
  const auto& dims = file.dims;
  const auto& direct_freq = file.complex_data("directFreq");
  const auto& direct_taps = file.complex_data("directTaps");
  const auto& element_taps = file.complex_data("elementTaps");
  const auto& noise = file.real_data("noiseVariance");
  const std::size_t U = noise.size();
  const auto list = [&](const char* key) {
    if (!file.meta.contains(key) || !file.meta.at(key).is_array() || file.meta.at(key).size() != U)
      throw ValidationError(std::string("estimate meta.") + key + " must list one value per user");
    return file.meta.at(key);
  };
  const auto resolved = list("aliasingResolved");
  const auto blocks = list("pilotBlocks");
  const auto power = list("pilotPower");
  const CMatrix F = delay_dft_matrix(dims.K, dims.M);
  std::vector<ChannelEstimate> out(U);
  for (std::size_t u = 0; u < U; ++u) {
    auto& e = out[u];
    e.dims = dims;
    e.direct_freq.bins = block(direct_freq, u * dims.K, dims.K, 1);
    e.direct_taps.taps = block(direct_taps, u * dims.M, dims.M, 1);
    e.element_taps = block(element_taps, u * dims.N * dims.M, dims.N, dims.M);
    e.element_freq = e.element_taps * F.transpose();
    e.noise_variance_estimate = noise[u];
    e.aliasing_resolved = resolved[u].get<bool>();
    e.pilot_blocks = blocks[u].get<std::size_t>();
    e.pilot_power = power[u].get<double>();
    e.projected = true;
  }
  return out;
}

DatasetFile results_to_file(const SystemDims& dims, std::span<const ConfigurationResult> results,
                            const nlohmann::json& meta) {
  const std::size_t U = results.size();
  DatasetFile f;
  f.role = "submission";
  f.dims = dims;
  f.meta = meta.is_object() ? meta : nlohmann::json::object();
  std::vector<std::int8_t> theta;
  theta.reserve(dims.N * U);
  std::vector<double> rate, flips;
  nlohmann::json methods = nlohmann::json::array();
  for (const auto& r : results) {
    if (r.theta.size() != dims.N) throw ValidationError("result configuration length differs from N");
    theta.insert(theta.end(), r.theta.states().begin(), r.theta.states().end());
    rate.push_back(r.predicted_rate);
    flips.push_back(static_cast<double>(r.flips_performed));
    methods.push_back(r.method);
  }
  f.meta["methods"] = methods;
  f.add("theta", {dims.N, U}, std::move(theta));
  f.add("predictedRate", {U}, std::move(rate));
  f.add("flipsPerformed", {U}, std::move(flips));
  return f;
}

std::vector<ConfigurationResult> results_from_file(const DatasetFile& file) {
  validate_schema(file);
  if (file.role != "submission") throw ValidationError("expected a submission file, got role " + file.role);
  if (!file.has("predictedRate")) throw ValidationError("submission file carries no optimizer results");
  const auto& theta = file.int8_data("theta");
  const auto& rate = file.real_data("predictedRate");
  const std::size_t U = trailing(file, "theta", 1);
  const std::size_t N = file.dims.N;
  std::vector<ConfigurationResult> out(U);
  for (std::size_t u = 0; u < U; ++u) {
    out[u].theta = IrsConfiguration(std::vector<std::int8_t>(theta.begin() + static_cast<std::ptrdiff_t>(u * N),
                                                             theta.begin() + static_cast<std::ptrdiff_t>((u + 1) * N)));
    out[u].predicted_rate = rate[u];
    if (file.has("flipsPerformed")) out[u].flips_performed = static_cast<std::size_t>(file.real_data("flipsPerformed")[u]);
    if (file.meta.contains("methods") && file.meta["methods"].size() == U) out[u].method = file.meta["methods"][u];
  }
  return out;
}

DatasetFile submission_to_file(const SystemDims& dims, const SignMatrix& theta) {
  DatasetFile f;
  f.role = "submission";
  f.dims = dims;
  f.add("theta", {theta.rows, theta.cols}, theta.values);
  return f;
}

std::vector<SubmissionViolation> validate_submission(const DatasetFile& file, std::size_t users) {
  std::vector<SubmissionViolation> out;
  if (file.role != "submission") out.push_back({-1, -1, "role is '" + file.role + "', expected 'submission'"});
  if (!file.has("theta")) {
    out.push_back({-1, -1, "missing array 'theta'"});
    return out;
  }
  const auto& a = file.array("theta");
  if (a.dtype() != Dtype::i8) {
    out.push_back({-1, -1, "array 'theta' is " + std::string(to_string(a.dtype())) + ", expected i8"});
    return out;
  }
  if (a.shape.size() != 2) {
    out.push_back({-1, -1, "array 'theta' has shape " + shape_string(a.shape) + ", expected 2 axes"});
    return out;
  }
  SignMatrix m(a.shape[0], a.shape[1]);
  m.values = std::get<std::vector<std::int8_t>>(a.data);
  auto v = validate_submission_matrix(m, {file.dims.N, users});
  out.insert(out.end(), v.begin(), v.end());
  return out;
}

DatasetFile report_to_file(const SystemDims& dims, const RateReport& report) {
  DatasetFile f;
  f.role = "report";
  f.dims = dims;
  f.meta["report"] = report.to_json();
  std::vector<double> true_rate, predicted, los;
  for (const auto& e : report.per_user) {
    true_rate.push_back(e.true_rate);
    predicted.push_back(e.predicted_rate);
    los.push_back(e.los ? 1.0 : 0.0);
  }
  const std::size_t U = report.per_user.size();
  f.add("trueRate", {U}, std::move(true_rate));
  f.add("predictedRate", {U}, std::move(predicted));
  f.add("losFlag", {U}, std::move(los));
  return f;
}

void validate_schema(const DatasetFile& file) {
  const auto& d = file.dims;
  d.validate();
  try {
    if (file.role == "scenario") {
      const std::size_t U = trailing(file, "losFlag", 0);
      expect_shape(file, "directTaps", {d.M, U});
      expect_shape(file, "elementTaps", {d.N, d.M, U});
      expect_shape(file, "losFlag", {U});
      (void)file.complex_data("directTaps");
      (void)file.complex_data("elementTaps");
      (void)file.real_data("losFlag");
    } else if (file.role == "pilots") {
      const std::size_t T = trailing(file, "pilotMatrix", 1);
      const std::size_t U = trailing(file, "receivedSignal", 2);
      expect_shape(file, "pilotMatrix", {d.N, T});
      expect_shape(file, "transmitSignal", {d.K, 1});
      expect_shape(file, "receivedSignal", {d.K, T, U});
      (void)file.int8_data("pilotMatrix");
      (void)file.complex_data("transmitSignal");
      (void)file.complex_data("receivedSignal");
    } else if (file.role == "estimate") {
      const std::size_t U = trailing(file, "noiseVariance", 0);
      expect_shape(file, "directFreq", {d.K, U});
      expect_shape(file, "directTaps", {d.M, U});
      expect_shape(file, "elementTaps", {d.N, d.M, U});
      expect_shape(file, "noiseVariance", {U});
      (void)file.complex_data("directFreq");
      (void)file.complex_data("elementTaps");
    } else if (file.role == "submission") {
      const std::size_t U = trailing(file, "theta", 1);
      expect_shape(file, "theta", {d.N, U});
      (void)file.int8_data("theta");
      if (file.has("predictedRate")) expect_shape(file, "predictedRate", {U});
      if (file.has("flipsPerformed")) expect_shape(file, "flipsPerformed", {U});
    } else if (file.role == "report") {
      const std::size_t U = trailing(file, "trueRate", 0);
      expect_shape(file, "predictedRate", {U});
      expect_shape(file, "losFlag", {U});
      if (!file.meta.contains("report")) throw ValidationError("report file lacks meta.report");
    } else {
      throw ValidationError("unknown role '" + file.role + "'");
    }
  } catch (const FormatError& e) {
    throw ValidationError(e.what());
  }
}

}  // namespace irs
