#include "irs/cli.hpp"

#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "irs/dataset_file.hpp"
#include "irs/estimator.hpp"
#include "irs/evaluator.hpp"
#include "irs/optimizer.hpp"
#include "irs/serialize.hpp"
#include "irs/simulator.hpp"

namespace irs {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Values given on the command line; unset ones fall back to the config file,
// then to library defaults.
struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> dims;
  std::optional<std::size_t> users;
  std::optional<double> power;
  std::optional<double> bandwidth;
  std::optional<double> noise_psd;
};

struct PipelineOptions {
  std::size_t repetitions = 4;
  bool noiseless = false;
  bool oracle = false;
  bool keep_pilots = false;
};

SystemDims parse_dims(const std::string& text) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError("--dims expects K,M,N as integers, got '" + text + "'");
    }
  }
  if (v.size() != 3) throw ValidationError("--dims expects exactly three values K,M,N, got '" + text + "'");
  return SystemDims::make(v[0], v[1], v[2]);
}

json load_config_json(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("config file " + path + " at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

ScenarioConfig resolve_config(const Overrides& o, const json& file_cfg) {
  ScenarioConfig c = config_from_json(file_cfg);
  if (o.seed) c.seed = *o.seed;
  if (o.dims) c.dims = parse_dims(*o.dims);
  if (o.users) c.num_users = *o.users;
  if (o.power) c.power = *o.power;
  if (o.bandwidth) c.bandwidth = *o.bandwidth;
  if (o.noise_psd) c.noise_psd = *o.noise_psd;
  c.validate();
  return c;
}

OptimizationSettings settings_from_json(const json& j) {
  OptimizationSettings s;
  try {
    if (j.contains("phase_grid_size")) s.phase_grid_size = j.at("phase_grid_size").get<std::size_t>();
    if (j.contains("max_flip_passes")) s.max_flip_passes = j.at("max_flip_passes").get<std::size_t>();
    if (j.contains("improvement_tolerance")) s.improvement_tolerance = j.at("improvement_tolerance").get<double>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("configuration: ") + e.what());
  }
  return s;
}

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Flat JSON configuration file; flags take precedence");
  cmd->add_option("--seed", o.seed, "Base seed");
  cmd->add_option("--dims", o.dims, "K,M,N");
  cmd->add_option("--users", o.users, "Number of users");
  cmd->add_option("--power", o.power, "Transmit power per subcarrier [W]");
  cmd->add_option("--bandwidth", o.bandwidth, "Bandwidth [Hz]");
  cmd->add_option("--noise-psd", o.noise_psd, "Noise PSD [W/Hz]; <= 0 calibrates");
}

class Reporter {
 public:
  explicit Reporter(std::ostream& out) : out_(out) {}

  void header(const std::string& command, const SystemDims& dims, std::uint64_t seed) {
    out_ << command << ": dims K=" << dims.K << " M=" << dims.M << " N=" << dims.N << ", seed " << seed << '\n';
  }
  void input(const fs::path& p) { out_ << "  in  " << digest_file(p) << "  " << p.string() << '\n'; }
  void output(const fs::path& p) { out_ << "  out " << digest_file(p) << "  " << p.string() << '\n'; }

 private:
  std::ostream& out_;
};

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_filename(path.stem().string() + suffix + path.extension().string());
  return p;
}

double snr_scale_for(const ChannelEstimate& e, const std::optional<double>& noise_psd, double nominal_psd,
                     double bandwidth) {
  if (noise_psd && *noise_psd > 0.0) return e.pilot_power / (*noise_psd * bandwidth);
  if (nominal_psd > 0.0) return e.pilot_power / (nominal_psd * bandwidth);
  if (e.noise_variance_estimate > 0.0) return e.pilot_power / e.noise_variance_estimate;
  throw ValidationError("no noise level available: pass --noise-psd or use an estimate of noisy pilots");
}

json estimate_meta(const ScenarioConfig& cfg, std::size_t repetitions, bool noiseless) {
  return {{"noisePsd", cfg.noise_psd}, {"bandwidth", cfg.bandwidth}, {"power", cfg.power},
          {"seed", cfg.seed},          {"repetitions", repetitions}, {"noiseless", noiseless}};
}

// Runs body(i) for i < n across threads; the first exception is rethrown.
template <class Body>
void for_each_user(std::size_t n, Body&& body) {
  std::exception_ptr failure;
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t u = 0; u < count; ++u) {
    try {
      body(static_cast<std::size_t>(u));
    } catch (...) {
#pragma omp critical(irs_cli_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

DatasetFile with_seed(DatasetFile f, std::uint64_t seed) {
  f.meta["seed"] = seed;
  return f;
}

ChannelEstimate strip_bins(ChannelEstimate e) {
  e.element_freq.resize(0, 0);
  return e;
}

// ---------------------------------------------------------------------------

int cmd_generate(const Overrides& o, const fs::path& out_path, Reporter& rep) {
  const json file_cfg = load_config_json(o.config_path);
  const ScenarioConfig cfg = resolve_config(o, file_cfg);
  const auto scenario = generate_scenario(cfg);
  write_dataset(out_path, scenario_to_file(scenario));
  rep.header("generate", cfg.dims, cfg.seed);
  rep.output(out_path);
  return 0;
}

int cmd_simulate(const fs::path& in, std::size_t repetitions, bool noiseless, const std::optional<double>& power,
                 const fs::path& out_path, Reporter& rep) {
  const auto scenario = scenario_from_file(read_dataset(in));
  const auto& cfg = scenario.config;
  const auto pilots = build_hadamard_pilots(cfg.dims, repetitions);
  const auto data = simulate_pilot_phase(scenario, pilots, power.value_or(cfg.power), noiseless);
  write_dataset(out_path, pilots_to_file(data));
  rep.header("simulate", cfg.dims, cfg.seed);
  rep.input(in);
  rep.output(out_path);
  return 0;
}

int cmd_estimate(const fs::path& in, const fs::path& out_path, Reporter& rep) {
  const auto data = pilots_from_file(read_dataset(in));
  const std::size_t users = data.received.size();
  const auto layout = pilot_layout(data.pilot_matrix);
  std::vector<ChannelEstimate> estimates(users);
  for_each_user(users, [&](std::size_t i) {
    estimates[i] = strip_bins(
        estimate_channel(data.received[i], data.pilot_matrix, layout, data.transmit_signal, data.dims));
  });
  const json meta = {{"noisePsd", data.noise_psd},
                     {"bandwidth", data.bandwidth},
                     {"power", estimates.empty() ? 0.0 : estimates.front().pilot_power},
                     {"seed", data.seed},
                     {"repetitions", data.pilot_matrix.cols / data.dims.N},
                     {"noiseless", data.noiseless}};
  write_dataset(out_path, estimates_to_file(estimates, meta));
  rep.header("estimate", data.dims, data.seed);
  rep.input(in);
  rep.output(out_path);
  return 0;
}

std::vector<ConfigurationResult> optimize_all(const std::vector<ChannelEstimate>& estimates,
                                              const OptimizationSettings& base, const std::optional<double>& noise_psd,
                                              double nominal_psd, double bandwidth) {
  std::vector<ConfigurationResult> results(estimates.size());
  for_each_user(estimates.size(), [&](std::size_t u) {
    OptimizationSettings s = base;
    s.bandwidth = bandwidth;
    s.snr_scale = snr_scale_for(estimates[u], noise_psd, nominal_psd, bandwidth);
    results[u] = optimize_wideband(estimates[u], s);
  });
  return results;
}

int cmd_optimize(const Overrides& o, const fs::path& in, const fs::path& out_path, const fs::path& submission_path,
                 Reporter& rep) {
  const json file_cfg = load_config_json(o.config_path);
  const DatasetFile file = read_dataset(in);
  const auto estimates = estimates_from_file(file);
  const double bandwidth = o.bandwidth.value_or(file.meta.value("bandwidth", ScenarioConfig{}.bandwidth));
  const auto results = optimize_all(estimates, settings_from_json(file_cfg), o.noise_psd,
                                    file.meta.value("noisePsd", 0.0), bandwidth);
  const std::uint64_t seed = file.meta.value("seed", std::uint64_t{0});
  json meta = {{"seed", seed}, {"bandwidth", bandwidth}};
  write_dataset(out_path, results_to_file(file.dims, results, meta));
  const auto theta = export_submission(results, {file.dims.N, results.size()});
  write_dataset(submission_path, with_seed(submission_to_file(file.dims, theta), seed));
  rep.header("optimize", file.dims, seed);
  rep.input(in);
  rep.output(out_path);
  rep.output(submission_path);
  return 0;
}

int cmd_evaluate(const fs::path& scenario_path, const fs::path& results_path, bool oracle, const fs::path& out_path,
                 std::ostream& out, Reporter& rep) {
  const auto scenario = scenario_from_file(read_dataset(scenario_path));
  const DatasetFile results_file = read_dataset(results_path);
  if (!(results_file.dims == scenario.config.dims))
    throw ValidationError("results dims " + to_string(results_file.dims) + " contradict scenario dims " +
                          to_string(scenario.config.dims));
  const auto results = results_from_file(results_file);
  const auto report = compare_report(scenario, results, {scenario.config.seed, oracle});
  write_dataset(out_path, with_seed(report_to_file(scenario.config.dims, report), scenario.config.seed));
  rep.header("evaluate", scenario.config.dims, scenario.config.seed);
  rep.input(scenario_path);
  rep.input(results_path);
  rep.output(out_path);
  out << report.to_table();
  return 0;
}

int cmd_export(const fs::path& in, std::size_t users, const fs::path& out_path, Reporter& rep) {
  const DatasetFile file = read_dataset(in);
  const auto results = results_from_file(file);
  const auto theta = export_submission(results, {file.dims.N, users});
  const std::uint64_t seed = file.meta.value("seed", std::uint64_t{0});
  write_dataset(out_path, with_seed(submission_to_file(file.dims, theta), seed));
  rep.header("export", file.dims, seed);
  rep.input(in);
  rep.output(out_path);
  return 0;
}

int cmd_validate(const fs::path& in, std::size_t users, std::ostream& out, std::ostream& err) {
  const DatasetFile file = read_dataset(in, {.require_signs = false});
  out << "validate: role " << file.role << ", dims K=" << file.dims.K << " M=" << file.dims.M << " N=" << file.dims.N
      << ", seed " << file.meta.value("seed", std::uint64_t{0}) << '\n';
  out << "  in  " << digest_file(in) << "  " << in.string() << '\n';
  if (file.role == "submission") {
    const auto violations = validate_submission(file, users);
    for (const auto& v : violations) {
      err << "  violation";
      if (v.row >= 0) err << " at (" << v.row << ", " << v.col << ")";
      err << ": " << v.message << '\n';
    }
    if (!violations.empty()) {
      err << violations.size() << " violation(s)\n";
      return 3;
    }
  }
  // Submission entries were not checked on decode; re-decode strictly for the others.
  validate_schema(file.role == "submission" ? file : read_dataset(in));
  out << "  ok\n";
  return 0;
}

int cmd_pipeline(const Overrides& o, const PipelineOptions& p, const fs::path& out_dir, std::ostream& out,
                 Reporter& rep) {
  const json file_cfg = load_config_json(o.config_path);
  ScenarioConfig cfg = resolve_config(o, file_cfg);
  const OptimizationSettings base = settings_from_json(file_cfg);
  fs::create_directories(out_dir);

  const auto scenario = generate_scenario(cfg);
  cfg = scenario.config;
  const SystemDims& dims = cfg.dims;
  const auto pilots = build_hadamard_pilots(dims, p.repetitions);
  const auto layout = pilot_layout(pilots);
  const auto xbar = constant_pilot(dims, cfg.power);
  const double noise_variance = p.noiseless ? 0.0 : cfg.noise_psd * cfg.bandwidth;
  const std::size_t users = scenario.users.size();

  PilotDataset kept;
  if (p.keep_pilots) {
    kept = simulate_pilot_phase(scenario, pilots, cfg.power, p.noiseless);
  }

  std::vector<ChannelEstimate> estimates(users);
  std::vector<ConfigurationResult> results(users);
  for_each_user(users, [&](std::size_t u) {
    const CMatrix received = p.keep_pilots ? kept.received[u]
                                           : simulate_user_pilots(scenario.users[u].model, dims, pilots, layout, xbar,
                                                                  noise_variance, noise_seed_for_user(cfg.seed, u));
    const auto est = estimate_channel(received, pilots, layout, xbar, dims);
    OptimizationSettings s = base;
    s.bandwidth = cfg.bandwidth;
    s.snr_scale = snr_scale_for(est, std::nullopt, cfg.noise_psd, cfg.bandwidth);
    results[u] = optimize_wideband(est, s);
    estimates[u] = strip_bins(est);
  });

  const fs::path scenario_path = out_dir / "scenario.irsd";
  const fs::path pilots_path = out_dir / "pilots.irsd";
  const fs::path estimate_path = out_dir / "estimate.irsd";
  const fs::path results_path = out_dir / "results.irsd";
  const fs::path submission_path = out_dir / "submission.irsd";
  const fs::path report_path = out_dir / "report.irsd";

  write_dataset(scenario_path, scenario_to_file(scenario));
  if (p.keep_pilots) write_dataset(pilots_path, pilots_to_file(kept));
  write_dataset(estimate_path, estimates_to_file(estimates, estimate_meta(cfg, p.repetitions, p.noiseless)));
  write_dataset(results_path, results_to_file(dims, results, {{"seed", cfg.seed}, {"bandwidth", cfg.bandwidth}}));
  write_dataset(submission_path, with_seed(submission_to_file(dims, export_submission(results, {dims.N, users})), cfg.seed));
  const auto report = compare_report(scenario, results, {cfg.seed, p.oracle});
  write_dataset(report_path, with_seed(report_to_file(dims, report), cfg.seed));

  rep.header("pipeline", dims, cfg.seed);
  rep.output(scenario_path);
  if (p.keep_pilots) rep.output(pilots_path);
  rep.output(estimate_path);
  rep.output(results_path);
  rep.output(submission_path);
  rep.output(report_path);
  out << report.to_table();
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Channel estimation and configuration optimization for 1-bit reflecting surfaces", "irsctl"};
  app.require_subcommand(1);

  Overrides o;
  PipelineOptions p;
  std::string in, in2, out_path;
  std::string submission_path;
  std::size_t users_expected = 50;

  auto* gen = app.add_subcommand("generate", "Generate a ground-truth scenario file");
  add_common(gen, o);
  gen->add_option("--out", out_path, "Scenario file")->required();

  auto* sim = app.add_subcommand("simulate", "Simulate the pilot phase of a scenario");
  sim->add_option("scenario", in, "Scenario file")->required();
  sim->add_option("--repetitions", p.repetitions, "Hadamard blocks (1 or 4)")->check(CLI::IsMember({1, 4}));
  sim->add_flag("--noiseless", p.noiseless, "Disable receiver noise");
  std::optional<double> sim_power;
  sim->add_option("--power", sim_power, "Pilot power per subcarrier [W]");
  sim->add_option("--out", out_path, "Pilots file")->required();

  auto* est = app.add_subcommand("estimate", "Estimate channels from a pilots file");
  est->add_option("pilots", in, "Pilots file")->required();
  est->add_option("--out", out_path, "Estimate file")->required();

  auto* opt = app.add_subcommand("optimize", "Optimize configurations from an estimate file");
  opt->add_option("estimate", in, "Estimate file")->required();
  opt->add_option("--config", o.config_path, "JSON with optimization settings");
  opt->add_option("--noise-psd", o.noise_psd, "Noise PSD [W/Hz] used for the rate objective");
  opt->add_option("--bandwidth", o.bandwidth, "Bandwidth [Hz]");
  opt->add_option("--out", out_path, "Results file")->required();
  opt->add_option("--submission", submission_path, "Submission file (default: <out>_submission)");

  auto* ev = app.add_subcommand("evaluate", "Score results against ground truth");
  ev->add_option("scenario", in, "Scenario file")->required();
  ev->add_option("results", in2, "Results file")->required();
  ev->add_flag("--oracle", p.oracle, "Add the exhaustive oracle baseline (N <= 20)");
  ev->add_option("--out", out_path, "Report file")->required();

  auto* ex = app.add_subcommand("export", "Write the bare submission matrix");
  ex->add_option("results", in, "Results file")->required();
  ex->add_option("--users", users_expected, "Expected user count");
  ex->add_option("--out", out_path, "Submission file")->required();

  auto* val = app.add_subcommand("validate", "Check a dataset file against its role's schema");
  val->add_option("file", in, "Dataset file")->required();
  val->add_option("--users", users_expected, "Expected user count for submissions");

  auto* pipe = app.add_subcommand("pipeline", "Run every stage with a single seed");
  add_common(pipe, o);
  pipe->add_option("--repetitions", p.repetitions, "Hadamard blocks (1 or 4)")->check(CLI::IsMember({1, 4}));
  pipe->add_flag("--noiseless", p.noiseless, "Disable receiver noise");
  pipe->add_flag("--oracle", p.oracle, "Add the exhaustive oracle baseline (N <= 20)");
  pipe->add_flag("--keep-pilots", p.keep_pilots, "Also write the pilots file");
  pipe->add_option("--out", out_path, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Reporter rep(out);
  try {
    if (*gen) return cmd_generate(o, out_path, rep);
    if (*sim) return cmd_simulate(in, p.repetitions, p.noiseless, sim_power, out_path, rep);
    if (*est) return cmd_estimate(in, out_path, rep);
    if (*opt)
      return cmd_optimize(o, in, out_path, submission_path.empty() ? sibling(out_path, "_submission") : fs::path(submission_path),
                          rep);
    if (*ev) return cmd_evaluate(in, in2, p.oracle, out_path, out, rep);
    if (*ex) return cmd_export(in, users_expected, out_path, rep);
    if (*val) return cmd_validate(in, users_expected, out, err);
    if (*pipe) return cmd_pipeline(o, p, out_path, out, rep);
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return 2;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const DimensionError& e) {
    err << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const AliasingError& e) {
    err << "validation error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace irs
