#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rrpolicy/rrr.hpp"

namespace rrpolicy {

// Exit codes shared by every subcommand: 0 ok, 2 config error, 3 runtime
// numerical failure, 4 data validation error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitData = 4;

struct SimulateOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct FitOptions {
    std::string data_csv;
    std::string schema_json;
    int rank = 0;  // 0 selects by cross-validation
    std::string out_model;
    GammaMode gamma_mode = GammaMode::residual_precision;
    double clip = 0.01;
};

struct EvaluateOptions {
    std::string data_csv;
    std::string schema_json;
    std::string model_path;
    std::string policy_path;
    std::vector<std::string> estimators;
    std::vector<double> rho;
    bool cross_fit = false;
    std::uint64_t seed = 0;
};

struct LearnOptions {
    std::string data_csv;
    std::string schema_json;
    std::string estimator;
    std::vector<double> rho;
    std::string out_dir = ".";
    int rank = 0;
    GammaMode gamma_mode = GammaMode::residual_precision;
    double clip = 0.01;
    double learning_rate = 0.05;
    int iterations = 20;
    std::string sense = "minimize";
    std::string init = "zeros";
    bool cross_fit = false;
    std::uint64_t seed = 0;
};

struct SynthOptions {
    int p = 8, k = 5, r = 2;
    int n = 100;
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
    std::string out_csv;
    std::string out_schema;
};

int cmd_simulate(const SimulateOptions& options);
int cmd_fit(const FitOptions& options);
int cmd_evaluate(const EvaluateOptions& options);
int cmd_learn(const LearnOptions& options);
int cmd_synth(const SynthOptions& options);

// Full argv-level entry point (CLI11 parsing + dispatch).
int run_cli(int argc, const char* const* argv);

}  // namespace rrpolicy
