#include "rrpolicy/serialize.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

namespace {

GammaMode gamma_mode_from_string(const std::string& s) {
    if (s == "residual_precision") return GammaMode::residual_precision;
    if (s == "identity") return GammaMode::identity;
    throw ConfigError("unknown gamma mode '" + s + "'");
}

std::string gamma_mode_to_string(GammaMode mode) {
    return mode == GammaMode::residual_precision ? "residual_precision" : "identity";
}

ObjectiveSense sense_from_string(const std::string& s) {
    if (s == "minimize" || s == "min") return ObjectiveSense::minimize;
    if (s == "maximize" || s == "max") return ObjectiveSense::maximize;
    throw ConfigError("unknown objective sense '" + s + "'");
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw ValidationError("expected a non-empty matrix array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j.at(0).size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (static_cast<int>(j.at(i).size()) != cols) {
            throw ValidationError("ragged matrix rows in JSON");
        }
        for (int c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vector_from_json(const Json& j) {
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<int>(i)) = j.at(i).get<double>();
    return v;
}

Json to_json(const RRRModel& model) {
    Json j;
    j["a_hat"] = matrix_to_json(model.A_hat);
    j["b_hat"] = matrix_to_json(model.B_hat);
    j["rank"] = model.rank;
    j["gamma"] = matrix_to_json(model.gamma);
    j["gamma_mode"] = gamma_mode_to_string(model.gamma_mode);
    j["eigenvalues"] = vector_to_json(model.eigenvalues);
    return j;
}

RRRModel rrr_model_from_json(const Json& j) {
    RRRModel model;
    model.A_hat = matrix_from_json(j.at("a_hat"));
    model.B_hat = matrix_from_json(j.at("b_hat"));
    model.rank = j.at("rank").get<int>();
    model.gamma = matrix_from_json(j.at("gamma"));
    model.gamma_mode = gamma_mode_from_string(j.at("gamma_mode").get<std::string>());
    model.eigenvalues = vector_from_json(j.at("eigenvalues"));
    return model;
}

Json to_json(const FullRankModel& model) {
    Json j;
    j["coef"] = matrix_to_json(model.coef);
    j["intercept"] = vector_to_json(model.intercept);
    j["residual_cov"] = matrix_to_json(model.residual_cov);
    return j;
}

FullRankModel full_rank_model_from_json(const Json& j) {
    FullRankModel model;
    model.coef = matrix_from_json(j.at("coef"));
    model.intercept = vector_from_json(j.at("intercept"));
    model.residual_cov = matrix_from_json(j.at("residual_cov"));
    return model;
}

Json to_json(const StandardizationParams& params) {
    Json j;
    j["x_mean"] = vector_to_json(params.x_mean);
    j["x_sd"] = vector_to_json(params.x_sd);
    j["y_mean"] = vector_to_json(params.y_mean);
    j["y_sd"] = vector_to_json(params.y_sd);
    return j;
}

StandardizationParams standardization_from_json(const Json& j) {
    StandardizationParams params;
    params.x_mean = vector_from_json(j.at("x_mean"));
    params.x_sd = vector_from_json(j.at("x_sd"));
    params.y_mean = vector_from_json(j.at("y_mean"));
    params.y_sd = vector_from_json(j.at("y_sd"));
    return params;
}

Json to_json(const PropensityModel& model) {
    Json j;
    j["beta"] = vector_to_json(model.beta);
    j["intercept"] = model.intercept;
    j["clip"] = model.clip;
    return j;
}

PropensityModel propensity_from_json(const Json& j) {
    PropensityModel model;
    model.beta = vector_from_json(j.at("beta"));
    model.intercept = j.at("intercept").get<double>();
    model.clip = j.at("clip").get<double>();
    return model;
}

Json to_json(const ModelBundle& bundle) {
    Json j;
    j["standardization"] = to_json(bundle.standardization);
    j["rank"] = bundle.rank;
    j["gamma_mode"] = gamma_mode_to_string(bundle.gamma_mode);
    j["propensity"] = to_json(bundle.propensity);
    for (int arm = 0; arm < 2; ++arm) {
        Json arm_json;
        arm_json["ols"] = to_json(bundle.ols[arm]);
        arm_json["rrr"] = to_json(bundle.rrr[arm]);
        j["arm" + std::to_string(arm)] = std::move(arm_json);
    }
    return j;
}

ModelBundle model_bundle_from_json(const Json& j) {
    ModelBundle bundle;
    bundle.standardization = standardization_from_json(j.at("standardization"));
    bundle.rank = j.at("rank").get<int>();
    bundle.gamma_mode = gamma_mode_from_string(j.at("gamma_mode").get<std::string>());
    bundle.propensity = propensity_from_json(j.at("propensity"));
    for (int arm = 0; arm < 2; ++arm) {
        const Json& arm_json = j.at("arm" + std::to_string(arm));
        bundle.ols[arm] = full_rank_model_from_json(arm_json.at("ols"));
        bundle.rrr[arm] = rrr_model_from_json(arm_json.at("rrr"));
    }
    return bundle;
}

Json to_json(const PolicyFile& policy) {
    Json j;
    j["theta"] = vector_to_json(policy.policy.theta);
    j["sense"] = to_string(policy.sense);
    j["in_sample_value"] = policy.in_sample_value;
    j["estimator"] = policy.estimator;
    j["standardization_digest"] = policy.standardization_digest;
    return j;
}

PolicyFile policy_file_from_json(const Json& j) {
    PolicyFile out;
    out.policy.theta = vector_from_json(j.at("theta"));
    out.sense = sense_from_string(j.at("sense").get<std::string>());
    out.in_sample_value = j.at("in_sample_value").get<double>();
    out.estimator = j.at("estimator").get<std::string>();
    out.standardization_digest = j.at("standardization_digest").get<std::string>();
    return out;
}

Json to_json(const EstimateReport& report) {
    Json j;
    j["estimator"] = report.estimator;
    j["value"] = report.value;
    j["n"] = report.n;
    j["seed"] = report.seed;
    j["propensity_mode"] = report.propensity_mode;
    return j;
}

Json to_json(const RunManifest& manifest) {
    Json j;
    j["command"] = manifest.command;
    j["config_digest"] = manifest.config_digest;
    j["master_seed"] = manifest.master_seed;
    j["tool_version"] = manifest.tool_version;
    j["started_at"] = manifest.started_at;
    j["duration_seconds"] = manifest.duration_seconds;
    j["outputs"] = manifest.outputs;
    return j;
}

std::string digest_bytes(const std::string& bytes) {
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001B3ULL;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

SimulateConfig parse_simulate_config(const std::string& json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config parse failure: " + std::string(e.what()));
    }

    SimulateConfig out;
    try {
        out.experiment = j.at("experiment").get<std::string>();
        if (out.experiment != "variance" && out.experiment != "policy_eval" &&
            out.experiment != "policy_opt") {
            throw ConfigError("experiment must be variance, policy_eval, or policy_opt");
        }
        ExperimentConfig& cfg = out.config;
        if (j.contains("dgp")) {
            const Json& d = j.at("dgp");
            cfg.p = d.value("p", cfg.p);
            cfg.k = d.value("k", cfg.k);
            cfg.r = d.value("r", cfg.r);
            cfg.noise_sd = d.value("noise_sd", cfg.noise_sd);
            cfg.dgp_seed = d.value("seed", std::uint64_t{0});
        }
        cfg.n = j.value("n", cfg.n);
        cfg.replications = j.value("replications", cfg.replications);
        cfg.rank = j.value("rank", cfg.r);
        if (j.contains("gamma_mode")) {
            cfg.gamma_mode = gamma_mode_from_string(j.at("gamma_mode").get<std::string>());
        }
        if (j.contains("rho")) cfg.rho = vector_from_json(j.at("rho"));
        if (j.contains("estimators")) {
            for (const auto& e : j.at("estimators")) {
                cfg.estimators.push_back(EstimatorSpec::parse(e.get<std::string>()));
            }
        }
        if (j.contains("sweep")) {
            Sweep sweep;
            const std::string axis = j.at("sweep").at("axis").get<std::string>();
            if (axis == "n") sweep.axis = SweepAxis::n;
            else if (axis == "noise") sweep.axis = SweepAxis::noise;
            else if (axis == "dim_ratio") sweep.axis = SweepAxis::dim_ratio;
            else if (axis == "latent_dim") sweep.axis = SweepAxis::latent_dim;
            else throw ConfigError("unknown sweep axis '" + axis + "'");
            for (const auto& v : j.at("sweep").at("values")) {
                sweep.values.push_back(v.get<double>());
            }
            cfg.sweep = std::move(sweep);
        }
        if (j.contains("propensity")) {
            const std::string mode = j.at("propensity").get<std::string>();
            if (mode == "known") cfg.propensity = PropensityChoice::known;
            else if (mode == "estimated") cfg.propensity = PropensityChoice::estimated;
            else throw ConfigError("propensity must be 'known' or 'estimated'");
        }
        if (j.contains("reference_policies")) {
            cfg.reference_policies.clear();
            for (const auto& rp : j.at("reference_policies")) {
                const std::string name = rp.get<std::string>();
                if (name == "always_treat") {
                    cfg.reference_policies.push_back(ReferencePolicy::always_treat);
                } else if (name == "uniform") {
                    cfg.reference_policies.push_back(ReferencePolicy::uniform);
                } else {
                    throw ConfigError("unknown reference policy '" + name + "'");
                }
            }
        }
        if (j.contains("optimizer")) {
            const Json& o = j.at("optimizer");
            cfg.optimizer.learning_rate = o.value("learning_rate", cfg.optimizer.learning_rate);
            cfg.optimizer.iterations = o.value("iterations", cfg.optimizer.iterations);
            if (o.contains("sense")) {
                cfg.optimizer.sense = sense_from_string(o.at("sense").get<std::string>());
            }
            if (o.contains("init")) {
                const std::string init = o.at("init").get<std::string>();
                if (init == "zeros") cfg.optimizer.init = InitMode::zeros;
                else if (init == "seeded_gaussian") cfg.optimizer.init = InitMode::seeded_gaussian;
                else throw ConfigError("unknown init '" + init + "'");
            }
        }
        cfg.eval_n = j.value("eval_n", cfg.eval_n);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.optimizer.seed = cfg.seed;
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config field error: " + std::string(e.what()));
    }
    return out;
}

std::string current_timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm_utc{};
    gmtime_r(&tt, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace rrpolicy
