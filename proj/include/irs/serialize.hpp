#pragma once

// Domain objects <-> IRSD1 containers. Manifest names follow the variable
// names of the original competition data (pilotMatrix, receivedSignal,
// transmitSignal) where a counterpart exists.

#include <span>
#include <vector>

#include <json.hpp>

#include "irs/dataset_file.hpp"
#include "irs/estimator.hpp"
#include "irs/evaluator.hpp"
#include "irs/optimizer.hpp"
#include "irs/simulator.hpp"

namespace irs {

nlohmann::json config_to_json(const ScenarioConfig& config);
/// Reads the flat key/value form; absent keys keep the values in `base`.
ScenarioConfig config_from_json(const nlohmann::json& j, ScenarioConfig base = {});

DatasetFile scenario_to_file(const GroundTruthScenario& scenario);
GroundTruthScenario scenario_from_file(const DatasetFile& file);

DatasetFile pilots_to_file(const PilotDataset& dataset);
PilotDataset pilots_from_file(const DatasetFile& file);

/// Stores projected estimates only (taps are authoritative; bins are rebuilt on read).
DatasetFile estimates_to_file(const std::vector<ChannelEstimate>& estimates, const nlohmann::json& meta = {});
std::vector<ChannelEstimate> estimates_from_file(const DatasetFile& file);

DatasetFile results_to_file(const SystemDims& dims, std::span<const ConfigurationResult> results,
                            const nlohmann::json& meta = {});
std::vector<ConfigurationResult> results_from_file(const DatasetFile& file);

/// Bare competition submission: a single N x U "theta" matrix.
DatasetFile submission_to_file(const SystemDims& dims, const SignMatrix& theta);

/// Every violation of the submission contract (role, N x users shape, +/-1
/// entries). Decode the file with require_signs = false to see bad entries.
std::vector<SubmissionViolation> validate_submission(const DatasetFile& file, std::size_t users = 50);

DatasetFile report_to_file(const SystemDims& dims, const RateReport& report);

/// Role-specific schema check (required arrays, shapes against dims).
/// Throws ValidationError.
void validate_schema(const DatasetFile& file);

}  // namespace irs
