#include "rrpolicy/cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "rrpolicy/csv_io.hpp"
#include "rrpolicy/errors.hpp"
#include "rrpolicy/policy_opt.hpp"
#include "rrpolicy/serialize.hpp"
#include "rrpolicy/simulation.hpp"
#include "rrpolicy/standardize.hpp"
#include "rrpolicy/version.hpp"

namespace fs = std::filesystem;

namespace rrpolicy {

namespace {

int classify_error(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
        dynamic_cast<const RankTooLarge*>(&e) != nullptr ||
        dynamic_cast<const InvalidRank*>(&e) != nullptr) {
        return kExitConfig;
    }
    if (dynamic_cast<const ValidationError*>(&e) != nullptr ||
        dynamic_cast<const ZeroVarianceColumn*>(&e) != nullptr ||
        dynamic_cast<const DimensionMismatch*>(&e) != nullptr ||
        dynamic_cast<const ModelMissingForArm*>(&e) != nullptr ||
        dynamic_cast<const Separation*>(&e) != nullptr) {
        return kExitData;
    }
    return kExitRuntime;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void write_manifest(const std::string& out_dir, const std::string& command,
                    const std::string& config_bytes, std::uint64_t seed, const Timer& timer,
                    std::vector<std::string> outputs) {
    RunManifest manifest;
    manifest.command = command;
    manifest.config_digest = digest_bytes(config_bytes);
    manifest.master_seed = seed;
    manifest.tool_version = kToolVersion;
    manifest.started_at = current_timestamp_utc();
    manifest.duration_seconds = timer.seconds();
    manifest.outputs = std::move(outputs);
    write_text_file(out_dir + "/manifest.json", to_json(manifest).dump(2) + "\n");
}

Vector to_vector(const std::vector<double>& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<int>(i)) = v[i];
    return out;
}

int resolve_rank(int requested, const Matrix& X, const Matrix& Y, GammaMode gamma_mode) {
    const int max_rank = static_cast<int>(std::min(X.cols(), Y.cols()));
    if (requested == 0) {
        std::vector<int> candidates;
        for (int r = 1; r <= max_rank; ++r) candidates.push_back(r);
        return select_rank(X, Y, candidates, gamma_mode);
    }
    if (requested < 0 || requested > max_rank) {
        throw RankTooLarge("requested rank " + std::to_string(requested) +
                           " outside [1, min(k, p)] = [1, " + std::to_string(max_rank) + "]");
    }
    return requested;
}

ModelBundle fit_bundle(const Dataset& raw, int rank_request, GammaMode gamma_mode, double clip) {
    auto [data, standardization] = standardize(raw);
    data.validate_for_fitting();

    ModelBundle bundle;
    bundle.standardization = standardization;
    bundle.gamma_mode = gamma_mode;
    bundle.propensity = fit_propensity(data, clip);

    for (int arm = 0; arm < 2; ++arm) {
        const int m = data.arm_count(arm);
        Matrix Xa(m, data.p()), Ya(m, data.k());
        int row = 0;
        for (int i = 0; i < data.n(); ++i) {
            if (data.treatments(i) == arm) {
                Xa.row(row) = data.covariates.row(i);
                Ya.row(row) = data.outcomes.row(i);
                ++row;
            }
        }
        const int rank = resolve_rank(rank_request, Xa, Ya, gamma_mode);
        bundle.rank = rank;
        bundle.ols[arm] = fit_ols(Xa, Ya);
        bundle.rrr[arm] = fit_rrr(Xa, Ya, rank, gamma_mode);
    }
    return bundle;
}

FittedComponents components_from_bundle(const ModelBundle& bundle) {
    FittedComponents components;
    components.propensity = bundle.propensity;
    for (int arm = 0; arm < 2; ++arm) {
        components.ols[arm] = bundle.ols[arm];
        components.rrr[arm] = bundle.rrr[arm];
    }
    return components;
}

// 2-fold cross-fitting: unit i's weights come from models fitted on the
// other fold (i % 2 split); the propensity model is shared.
EstimatorWeights build_weights_cross_fit(const EstimatorSpec& spec, const Dataset& data,
                                         int rank, GammaMode gamma_mode,
                                         const PropensityModel& propensity,
                                         const Scalarization& scalarization) {
    EstimatorWeights weights;
    weights.w.resize(data.n(), 2);
    for (int fold = 0; fold < 2; ++fold) {
        std::vector<int> train_rows, eval_rows;
        for (int i = 0; i < data.n(); ++i) {
            (i % 2 == fold ? eval_rows : train_rows).push_back(i);
        }
        Dataset train, eval;
        auto take = [&](const std::vector<int>& rows, Dataset& dst) {
            dst.covariates.resize(rows.size(), data.p());
            dst.outcomes.resize(rows.size(), data.k());
            dst.treatments.resize(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                dst.covariates.row(i) = data.covariates.row(rows[i]);
                dst.outcomes.row(i) = data.outcomes.row(rows[i]);
                dst.treatments(i) = data.treatments(rows[i]);
            }
        };
        take(train_rows, train);
        take(eval_rows, eval);
        const FittedComponents components =
            fit_components(train, rank, gamma_mode, propensity);
        const EstimatorWeights fold_weights =
            build_estimator_weights(spec, eval, components, scalarization);
        for (std::size_t i = 0; i < eval_rows.size(); ++i) {
            weights.w.row(eval_rows[i]) = fold_weights.w.row(i);
        }
    }
    return weights;
}

}  // namespace

int cmd_simulate(const SimulateOptions& options) {
    Timer timer;
    try {
        const std::string config_bytes = read_text_file(options.config_path);
        SimulateConfig sim = parse_simulate_config(config_bytes);
        if (options.seed) {
            sim.config.seed = *options.seed;
            sim.config.optimizer.seed = *options.seed;
        }
        if (options.threads) sim.config.threads = *options.threads;
        sim.config.validate();

        fs::create_directories(options.out_dir);
        std::string tidy, aggregate;
        try {
            if (sim.experiment == "variance") {
                const auto result = run_variance_experiment(sim.config);
                tidy = result.tidy_csv();
                aggregate = result.aggregate_csv();
            } else if (sim.experiment == "policy_eval") {
                const auto result = run_policy_eval_experiment(sim.config);
                tidy = result.tidy_csv();
                aggregate = result.aggregate_csv();
            } else {
                const auto result = run_policy_opt_experiment(sim.config);
                tidy = result.tidy_csv();
                aggregate = result.aggregate_csv();
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            std::cerr << "experiment failure: " << e.what() << "\n";
            return kExitRuntime;
        }
        const std::string tidy_path = options.out_dir + "/replications.csv";
        const std::string agg_path = options.out_dir + "/aggregate.csv";
        write_text_file(tidy_path, tidy);
        write_text_file(agg_path, aggregate);
        write_manifest(options.out_dir, "simulate", config_bytes, sim.config.seed, timer,
                       {tidy_path, agg_path});
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << "\n";
        const auto* err = dynamic_cast<const Error*>(&e);
        return err != nullptr ? classify_error(e) : kExitConfig;
    }
}

int cmd_fit(const FitOptions& options) {
    try {
        const CsvSchema schema = load_schema(options.schema_json);
        const Dataset raw = load_dataset_csv(options.data_csv, schema);
        raw.validate_for_fitting();
        const ModelBundle bundle = fit_bundle(raw, options.rank, options.gamma_mode, options.clip);
        write_text_file(options.out_model, to_json(bundle).dump(2) + "\n");
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "fit: " << e.what() << "\n";
        return classify_error(e);
    }
}

int cmd_evaluate(const EvaluateOptions& options) {
    try {
        if (options.estimators.empty()) {
            throw ConfigError("no estimator given");
        }
        const CsvSchema schema = load_schema(options.schema_json);
        const Dataset raw = load_dataset_csv(options.data_csv, schema);
        const ModelBundle bundle =
            model_bundle_from_json(Json::parse(read_text_file(options.model_path)));
        const PolicyFile policy = policy_file_from_json(Json::parse(read_text_file(options.policy_path)));

        Dataset data = raw;
        data.covariates = apply_standardization(raw.covariates, bundle.standardization.x_mean,
                                                bundle.standardization.x_sd);
        data.outcomes = apply_standardization(raw.outcomes, bundle.standardization.y_mean,
                                              bundle.standardization.y_sd);

        const std::string transform_digest =
            digest_bytes(to_json(bundle.standardization).dump());
        if (!policy.standardization_digest.empty() &&
            policy.standardization_digest != transform_digest) {
            throw ValidationError(
                "policy was trained under a different standardization than the model bundle");
        }

        Scalarization scalarization;
        scalarization.rho = to_vector(options.rho);
        scalarization.mode = ScalarizationMode::observed_outcomes;

        const FittedComponents components = components_from_bundle(bundle);
        const Vector pi_treated = policy_prob_treated(policy.policy, data.covariates);

        Json estimates = Json::array();
        for (const std::string& name : options.estimators) {
            const EstimatorSpec spec = EstimatorSpec::parse(name);
            Scalarization scal = scalarization;
            if (spec.source == OutcomeSource::rrr_latent) {
                scal.mode = ScalarizationMode::latent_factors;
            }
            double value = 0.0;
            if (options.cross_fit) {
                const EstimatorWeights weights = build_weights_cross_fit(
                    spec, data, bundle.rank, bundle.gamma_mode, bundle.propensity, scal);
                value = weighted_policy_value(weights, pi_treated);
            } else {
                value = estimate(spec, pi_treated, data, components, scal);
            }
            EstimateReport report;
            report.estimator = spec.name();
            report.value = value;
            report.n = data.n();
            report.seed = options.seed;
            report.propensity_mode = "estimated";
            estimates.push_back(to_json(report));
        }
        Json out;
        out["n"] = data.n();
        out["policy"] = options.policy_path;
        out["estimates"] = std::move(estimates);
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "evaluate: " << e.what() << "\n";
        return classify_error(e);
    }
}

int cmd_learn(const LearnOptions& options) {
    Timer timer;
    Vector last_good;
    try {
        const CsvSchema schema = load_schema(options.schema_json);
        const Dataset raw = load_dataset_csv(options.data_csv, schema);
        raw.validate_for_fitting();

        auto [data, standardization] = standardize(raw);
        const EstimatorSpec spec = EstimatorSpec::parse(options.estimator);

        Scalarization scalarization;
        scalarization.rho = to_vector(options.rho);
        scalarization.mode = spec.source == OutcomeSource::rrr_latent
                                 ? ScalarizationMode::latent_factors
                                 : ScalarizationMode::observed_outcomes;

        OptimizerConfig optimizer;
        optimizer.learning_rate = options.learning_rate;
        optimizer.iterations = options.iterations;
        optimizer.sense = options.sense == "maximize" || options.sense == "max"
                              ? ObjectiveSense::maximize
                              : ObjectiveSense::minimize;
        optimizer.init = options.init == "seeded_gaussian" ? InitMode::seeded_gaussian
                                                           : InitMode::zeros;
        optimizer.seed = options.seed;
        optimizer.validate();
        scalarization.sense = optimizer.sense;

        const int rank =
            resolve_rank(options.rank, data.covariates, data.outcomes, options.gamma_mode);
        const PropensityModel propensity = fit_propensity(data, options.clip);
        const FittedComponents components =
            fit_components(data, rank, options.gamma_mode, propensity);

        EstimatorWeights weights;
        if (options.cross_fit) {
            weights = build_weights_cross_fit(spec, data, rank, options.gamma_mode, propensity,
                                              scalarization);
        } else {
            weights = build_estimator_weights(spec, data, components, scalarization);
        }

        fs::create_directories(options.out_dir);
        PolicyParams theta;
        OptimizationTrace trace;
        try {
            std::tie(theta, trace) = optimize_policy(weights, data.covariates, optimizer);
        } catch (const NonFiniteValue& e) {
            // keep the last finite iterate on disk before reporting failure
            PolicyFile fallback;
            fallback.policy.theta = to_vector(e.last_good_theta);
            fallback.sense = optimizer.sense;
            fallback.estimator = spec.name();
            fallback.standardization_digest = digest_bytes(to_json(standardization).dump());
            write_text_file(options.out_dir + "/policy.json", to_json(fallback).dump(2) + "\n");
            std::cerr << "learn: " << e.what() << " (last finite theta written)\n";
            return kExitRuntime;
        }

        PolicyFile out;
        out.policy = theta;
        out.sense = optimizer.sense;
        out.in_sample_value = trace.value_path.back();
        out.estimator = spec.name();
        out.standardization_digest = digest_bytes(to_json(standardization).dump());

        std::ostringstream trace_csv;
        trace_csv << "iteration,value,grad_norm\n";
        for (std::size_t i = 0; i < trace.value_path.size(); ++i) {
            trace_csv << i << ',' << format_double(trace.value_path[i]) << ','
                      << format_double(trace.grad_norms[i]) << '\n';
        }

        const std::string policy_path = options.out_dir + "/policy.json";
        const std::string trace_path = options.out_dir + "/trace.csv";
        write_text_file(policy_path, to_json(out).dump(2) + "\n");
        write_text_file(trace_path, trace_csv.str());
        write_manifest(options.out_dir, "learn", options.estimator, options.seed, timer,
                       {policy_path, trace_path});
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "learn: " << e.what() << "\n";
        return classify_error(e);
    }
}

int cmd_synth(const SynthOptions& options) {
    try {
        const DGPParams params =
            generate_dgp(options.p, options.k, options.r, options.noise_sd, options.seed);
        const Dataset data = sample_dataset(params, options.n, options.seed);
        const CsvSchema schema = default_schema(options.p, options.k);
        write_dataset_csv(data, options.out_csv, schema);
        if (!options.out_schema.empty()) save_schema(schema, options.out_schema);
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return classify_error(e);
    }
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"reduced-rank multi-objective off-policy evaluation and learning"};
    app.require_subcommand(1);

    SimulateOptions simulate;
    auto* sim = app.add_subcommand("simulate", "run a synthetic experiment from a JSON config");
    sim->add_option("--config", simulate.config_path, "experiment config JSON")->required();
    sim->add_option("--out-dir", simulate.out_dir, "output directory");
    std::uint64_t sim_seed = 0;
    int sim_threads = 0;
    auto* sim_seed_opt = sim->add_option("--seed", sim_seed, "master seed override");
    auto* sim_threads_opt = sim->add_option("--threads", sim_threads, "worker threads");

    FitOptions fit;
    std::string fit_gamma = "residual_precision";
    auto* fit_cmd = app.add_subcommand("fit", "fit per-arm outcome models from a CSV");
    fit_cmd->add_option("--data", fit.data_csv, "data CSV")->required();
    fit_cmd->add_option("--schema", fit.schema_json, "column-role schema JSON")->required();
    fit_cmd->add_option("--rank", fit.rank, "reduced rank (0 = cross-validated)");
    fit_cmd->add_option("--out-model", fit.out_model, "output model bundle path")->required();
    fit_cmd->add_option("--gamma-mode", fit_gamma, "residual_precision | identity");
    fit_cmd->add_option("--clip", fit.clip, "propensity clipping bound");

    EvaluateOptions evaluate;
    auto* eval_cmd = app.add_subcommand("evaluate", "policy value estimates for a stored policy");
    eval_cmd->add_option("--data", evaluate.data_csv)->required();
    eval_cmd->add_option("--schema", evaluate.schema_json)->required();
    eval_cmd->add_option("--model", evaluate.model_path)->required();
    eval_cmd->add_option("--policy", evaluate.policy_path)->required();
    eval_cmd->add_option("--estimator", evaluate.estimators, "family:source[:cv_target], repeatable")
        ->required();
    eval_cmd->add_option("--rho", evaluate.rho, "scalarization weights (comma separated)")
        ->required()
        ->delimiter(',');
    eval_cmd->add_flag("--cross-fit", evaluate.cross_fit, "2-fold cross-fitting of outcome models");
    eval_cmd->add_option("--seed", evaluate.seed);

    LearnOptions learn;
    std::string learn_gamma = "residual_precision";
    auto* learn_cmd = app.add_subcommand("learn", "optimize a logistic policy on a CSV");
    learn_cmd->add_option("--data", learn.data_csv)->required();
    learn_cmd->add_option("--schema", learn.schema_json)->required();
    learn_cmd->add_option("--estimator", learn.estimator, "objective estimator spec")->required();
    learn_cmd->add_option("--rho", learn.rho)->required()->delimiter(',');
    learn_cmd->add_option("--out-dir", learn.out_dir);
    learn_cmd->add_option("--rank", learn.rank, "reduced rank (0 = cross-validated)");
    learn_cmd->add_option("--gamma-mode", learn_gamma);
    learn_cmd->add_option("--clip", learn.clip);
    learn_cmd->add_option("--learning-rate", learn.learning_rate);
    learn_cmd->add_option("--iterations", learn.iterations);
    learn_cmd->add_option("--sense", learn.sense, "min | max");
    learn_cmd->add_option("--init", learn.init, "zeros | seeded_gaussian");
    learn_cmd->add_flag("--cross-fit", learn.cross_fit);
    learn_cmd->add_option("--seed", learn.seed);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic dataset CSV + schema");
    synth_cmd->add_option("--p", synth.p);
    synth_cmd->add_option("--k", synth.k);
    synth_cmd->add_option("--r", synth.r);
    synth_cmd->add_option("--n", synth.n);
    synth_cmd->add_option("--noise-sd", synth.noise_sd);
    synth_cmd->add_option("--seed", synth.seed);
    synth_cmd->add_option("--out", synth.out_csv)->required();
    synth_cmd->add_option("--out-schema", synth.out_schema);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sim->parsed()) {
            if (sim_seed_opt->count() > 0) simulate.seed = sim_seed;
            if (sim_threads_opt->count() > 0) simulate.threads = sim_threads;
            return cmd_simulate(simulate);
        }
        if (fit_cmd->parsed()) {
            fit.gamma_mode = fit_gamma == "identity" ? GammaMode::identity
                                                     : GammaMode::residual_precision;
            return cmd_fit(fit);
        }
        if (eval_cmd->parsed()) return cmd_evaluate(evaluate);
        if (learn_cmd->parsed()) {
            learn.gamma_mode = learn_gamma == "identity" ? GammaMode::identity
                                                         : GammaMode::residual_precision;
            return cmd_learn(learn);
        }
        if (synth_cmd->parsed()) return cmd_synth(synth);
    } catch (const std::exception& e) {
        std::cerr << argv[0] << ": " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}

}  // namespace rrpolicy
