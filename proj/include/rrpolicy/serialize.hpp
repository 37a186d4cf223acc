#pragma once

#include <string>

#include <json.hpp>

#include "rrpolicy/estimators.hpp"
#include "rrpolicy/simulation.hpp"
#include "rrpolicy/standardize.hpp"

namespace rrpolicy {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& m);   // row-major nested arrays
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const RRRModel& model);
RRRModel rrr_model_from_json(const Json& j);

Json to_json(const FullRankModel& model);
FullRankModel full_rank_model_from_json(const Json& j);

Json to_json(const StandardizationParams& params);
StandardizationParams standardization_from_json(const Json& j);

Json to_json(const PropensityModel& model);
PropensityModel propensity_from_json(const Json& j);

// Per-arm models plus the transform they were fitted under.
struct ModelBundle {
    StandardizationParams standardization;
    std::array<FullRankModel, 2> ols;
    std::array<RRRModel, 2> rrr;
    PropensityModel propensity;
    int rank = 0;
    GammaMode gamma_mode = GammaMode::residual_precision;
};

Json to_json(const ModelBundle& bundle);
ModelBundle model_bundle_from_json(const Json& j);

// Learned policy with enough context to evaluate it consistently later.
struct PolicyFile {
    PolicyParams policy;
    ObjectiveSense sense = ObjectiveSense::minimize;
    double in_sample_value = 0.0;
    std::string estimator;
    std::string standardization_digest;
};

Json to_json(const PolicyFile& policy);
PolicyFile policy_file_from_json(const Json& j);

// {estimator spec, value, n, seed, propensity mode}
struct EstimateReport {
    std::string estimator;
    double value = 0.0;
    int n = 0;
    std::uint64_t seed = 0;
    std::string propensity_mode;
};

Json to_json(const EstimateReport& report);

struct RunManifest {
    std::string command;
    std::string config_digest;
    std::uint64_t master_seed = 0;
    std::string tool_version;
    std::string started_at;
    double duration_seconds = 0.0;
    std::vector<std::string> outputs;
};

Json to_json(const RunManifest& manifest);

// FNV-1a 64 over raw bytes, hex-encoded.
std::string digest_bytes(const std::string& bytes);

// Experiment configuration from the simulate-command JSON document.
struct SimulateConfig {
    std::string experiment;  // variance | policy_eval | policy_opt
    ExperimentConfig config;
};

SimulateConfig parse_simulate_config(const std::string& json_text);

std::string current_timestamp_utc();

}  // namespace rrpolicy
