#include "rrpolicy/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "rrpolicy/errors.hpp"
#include "rrpolicy/rng.hpp"

namespace rrpolicy {

namespace {

constexpr std::uint64_t kSaltDataset = 0xD5ULL;
constexpr std::uint64_t kSaltOracle = 0x0AULL;
constexpr std::uint64_t kSaltTrain = 0x72ULL;
constexpr std::uint64_t kSaltRho = 0x50ULL;
constexpr std::uint64_t kSaltEval = 0xE7ULL;
constexpr std::uint64_t kSaltProbe = 0xD4A7ULL;
constexpr std::uint64_t kSaltBasis = 0xBA51ULL;

Matrix draw_covariates(const DGPParams& params, int n, RandomStream& rng) {
    Matrix X = rng.normal_matrix(n, params.p);
    X.rowwise() += params.M.transpose();
    return X;
}

// rho' (A_t B_t x) collapses to a fixed p-vector per arm
std::array<Vector, 2> outcome_mean_maps(const DGPParams& params, const Vector& rho) {
    return {(params.A[0] * params.B[0]).transpose() * rho,
            (params.A[1] * params.B[1]).transpose() * rho};
}

std::array<Vector, 2> latent_mean_maps(const DGPParams& params, const Vector& rho) {
    return {params.B[0].transpose() * rho, params.B[1].transpose() * rho};
}

double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return ss / static_cast<double>(v.size() - 1);
}

double sample_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    return mean / static_cast<double>(v.size());
}

std::string policy_label(ReferencePolicy policy) {
    switch (policy) {
        case ReferencePolicy::always_treat: return "always_treat";
        case ReferencePolicy::uniform: return "uniform";
        case ReferencePolicy::oracle_optimal: return "oracle_optimal";
    }
    return "?";
}

struct SweepPoint {
    double value = 1.0;  // 1-point pseudo-sweep when no sweep is configured
    int n = 0;
    DGPParams params;
    int rank = 0;
    Vector rho;
};

std::vector<SweepPoint> expand_sweep(const ExperimentConfig& config) {
    std::vector<SweepPoint> points;
    auto make_point = [&](double value, int n, int p, int k, int r, double noise_sd) {
        SweepPoint pt;
        pt.value = value;
        pt.n = n;
        pt.params = generate_dgp(p, k, r, noise_sd, config.dgp_seed);
        pt.rank = std::min(config.rank, std::min(k, p));
        if (config.rho.size() == k) {
            pt.rho = config.rho;
        } else {
            // dimension sweeps change k; draw a unit-scale rho per point
            RandomStream rng = derive_stream(config.dgp_seed, kSaltRho, static_cast<std::uint64_t>(k));
            pt.rho = rng.normal_vector(k) / std::sqrt(static_cast<double>(k));
        }
        return pt;
    };

    if (!config.sweep) {
        points.push_back(make_point(static_cast<double>(config.n), config.n, config.p, config.k,
                                    config.r, config.noise_sd));
        return points;
    }
    const Sweep& sweep = *config.sweep;
    if (sweep.values.empty()) throw ConfigError("sweep has no values");
    for (double v : sweep.values) {
        switch (sweep.axis) {
            case SweepAxis::n:
                points.push_back(make_point(v, static_cast<int>(v), config.p, config.k, config.r,
                                            config.noise_sd));
                break;
            case SweepAxis::noise:
                points.push_back(make_point(v, config.n, config.p, config.k, config.r, v));
                break;
            case SweepAxis::dim_ratio:
                // vary the observed-outcome dimension, latent dimension fixed
                points.push_back(make_point(v, config.n, config.p, static_cast<int>(v), config.r,
                                            config.noise_sd));
                break;
            case SweepAxis::latent_dim: {
                // vary the latent dimension at k = 50
                const int r = static_cast<int>(v);
                SweepPoint pt = make_point(v, config.n, config.p, 50, r, config.noise_sd);
                pt.rank = std::min(r, std::min(50, config.p));
                points.push_back(std::move(pt));
                break;
            }
        }
    }
    return points;
}

struct ReplicationOutput {
    bool skipped = false;
    std::vector<double> values;  // policy-major then estimator
};

}  // namespace

PropensityModel DGPParams::true_propensity(double clip) const {
    PropensityModel model;
    model.beta = beta;
    model.intercept = 0.0;
    model.clip = clip;
    return model;
}

DGPParams generate_dgp(int p, int k, int r, double noise_sd, std::uint64_t seed) {
    if (r < 1 || r > std::min(k, p)) {
        throw InvalidRank("latent dimension must lie in [1, min(k, p)]");
    }
    if (noise_sd < 0.0) throw ConfigError("noise_sd must be nonnegative");

    RandomStream rng = derive_stream(seed, 0xD6bULL);
    DGPParams params;
    params.p = p;
    params.k = k;
    params.r = r;
    params.noise_sd = noise_sd;
    params.seed = seed;
    params.M = rng.normal_vector(p);
    params.beta = rng.normal_vector(p) / std::sqrt(static_cast<double>(p));
    for (int arm = 0; arm < 2; ++arm) {
        params.A[arm] = rng.normal_matrix(k, r);
        params.B[arm] = rng.normal_matrix(r, p);
    }
    return params;
}

Dataset sample_dataset(const DGPParams& params, int n, std::uint64_t seed) {
    if (n < 1) throw ValidationError("need n >= 1");
    RandomStream rng = derive_stream(seed, kSaltDataset);

    Dataset data;
    data.covariates = draw_covariates(params, n, rng);

    data.treatments.resize(n);
    for (int i = 0; i < n; ++i) {
        const double e1 = logistic(params.beta.dot(data.covariates.row(i)));
        data.treatments(i) = rng.bernoulli(e1) ? 1 : 0;
    }

    std::array<Matrix, 2> latents, potentials;
    for (int arm = 0; arm < 2; ++arm) {
        const Matrix U = rng.normal_matrix(n, params.r) * params.noise_sd;
        const Matrix eps = rng.normal_matrix(n, params.k) * params.noise_sd;
        latents[arm] = data.covariates * params.B[arm].transpose() + U;
        potentials[arm] = latents[arm] * params.A[arm].transpose() + eps;
    }

    data.outcomes.resize(n, params.k);
    for (int i = 0; i < n; ++i) {
        data.outcomes.row(i) = potentials[data.treatments(i)].row(i);
    }
    data.latent_truth = latents;
    data.potential_outcomes_truth = potentials;
    return data;
}

OracleValue oracle_policy_value_linear(const DGPParams& params, const PolicyParams& policy,
                                       const std::array<Vector, 2>& arm_maps, int draws,
                                       std::uint64_t seed) {
    RandomStream rng = derive_stream(seed ^ params.seed, kSaltOracle);
    KahanSum acc, acc_sq;
    const int chunk = 65536;
    int remaining = draws;
    while (remaining > 0) {
        const int m = std::min(chunk, remaining);
        const Matrix X = draw_covariates(params, m, rng);
        const Vector z = X * policy.theta;
        const Vector v0 = X * arm_maps[0];
        const Vector v1 = X * arm_maps[1];
        for (int i = 0; i < m; ++i) {
            const double p1 = logistic(z(i));
            const double v = (1.0 - p1) * v0(i) + p1 * v1(i);
            acc.add(v);
            acc_sq.add(v * v);
        }
        remaining -= m;
    }
    OracleValue out;
    const double dn = static_cast<double>(draws);
    out.value = acc.value() / dn;
    const double var = std::max(acc_sq.value() / dn - out.value * out.value, 0.0);
    out.standard_error = std::sqrt(var / dn);
    return out;
}

OracleValue oracle_policy_value(const DGPParams& params, const PolicyParams& policy,
                                const Vector& rho, OracleMode mode, int draws,
                                std::uint64_t seed) {
    const auto maps =
        mode == OracleMode::Y ? outcome_mean_maps(params, rho) : latent_mean_maps(params, rho);
    return oracle_policy_value_linear(params, policy, maps, draws, seed);
}

PolicyParams oracle_optimal_policy(const DGPParams& params, const Vector& rho,
                                   const OptimizerConfig& config, int train_draws,
                                   std::uint64_t seed) {
    RandomStream rng = derive_stream(seed ^ params.seed, kSaltTrain);
    const Matrix X = draw_covariates(params, train_draws, rng);
    const auto maps = outcome_mean_maps(params, rho);
    EstimatorWeights weights;
    weights.w.resize(train_draws, 2);
    weights.w.col(0) = X * maps[0];
    weights.w.col(1) = X * maps[1];
    return optimize_policy(weights, X, config).first;
}

Matrix canonical_latent_basis(const DGPParams& params, int arm, GammaMode gamma_mode, int draws,
                              std::uint64_t seed) {
    RandomStream rng = derive_stream(seed ^ params.seed, kSaltBasis);
    Matrix sxx = Matrix::Zero(params.p, params.p);
    double wsum = 0.0;
    const int chunk = 65536;
    int remaining = draws;
    while (remaining > 0) {
        const int m = std::min(chunk, remaining);
        const Matrix X = draw_covariates(params, m, rng);
        Vector w(m);
        for (int i = 0; i < m; ++i) {
            const double e1 = logistic(params.beta.dot(X.row(i)));
            w(i) = arm == 1 ? e1 : 1.0 - e1;
        }
        sxx.noalias() += X.transpose() * w.asDiagonal() * X;
        wsum += w.sum();
        remaining -= m;
    }
    sxx /= wsum;

    const Matrix C = params.A[arm] * params.B[arm];
    Matrix gamma;
    if (gamma_mode == GammaMode::identity) {
        gamma = Matrix::Identity(params.k, params.k);
    } else {
        if (!(params.noise_sd > 0.0)) {
            throw ConfigError("residual-precision canonical basis needs noise_sd > 0");
        }
        const Matrix resid_cov =
            params.noise_sd * params.noise_sd *
            (Matrix::Identity(params.k, params.k) + params.A[arm] * params.A[arm].transpose());
        gamma = sym_inverse(resid_cov);
    }
    const Matrix gamma_half = sym_power(gamma, 0.5);
    Matrix target = gamma_half * C * sxx * C.transpose() * gamma_half;
    target = 0.5 * (target + target.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(target);
    Matrix V(params.k, params.r);
    for (int j = 0; j < params.r; ++j) {
        V.col(j) = es.eigenvectors().col(params.k - 1 - j);
    }
    orient_eigenvector_columns(V);
    return V.transpose() * gamma_half * C;
}

std::vector<DhatProbeRow> dhat_consistency_probe(const DGPParams& params,
                                                 const std::vector<int>& ns, const Vector& rho_z,
                                                 std::uint64_t seed, int reference_draws) {
    if (rho_z.size() != params.r) {
        throw DimensionMismatch("rho_z length must equal the latent dimension");
    }

    auto fit_pair = [&](int n, std::uint64_t draw_seed, std::array<Vector, 2>& d_hat,
                        std::array<Vector, 2>& d_star) {
        RandomStream rng = derive_stream(draw_seed, kSaltProbe);
        const Matrix X = draw_covariates(params, n, rng);
        Eigen::VectorXi T(n);
        for (int i = 0; i < n; ++i) {
            T(i) = rng.bernoulli(logistic(params.beta.dot(X.row(i)))) ? 1 : 0;
        }
        for (int arm = 0; arm < 2; ++arm) {
            const Matrix U = rng.normal_matrix(n, params.r) * params.noise_sd;
            const Matrix h = X * params.B[arm].transpose();
            const Vector noisy = (h + U) * rho_z;
            const Vector clean = h * rho_z;
            int m = 0;
            for (int i = 0; i < n; ++i) m += (T(i) == arm) ? 1 : 0;
            Matrix h_arm(m, params.r);
            Vector noisy_arm(m), clean_arm(m);
            int row = 0;
            for (int i = 0; i < n; ++i) {
                if (T(i) == arm) {
                    h_arm.row(row) = h.row(i);
                    noisy_arm(row) = noisy(i);
                    clean_arm(row) = clean(i);
                    ++row;
                }
            }
            d_hat[arm] = solve_least_squares(h_arm, noisy_arm);
            d_star[arm] = solve_least_squares(h_arm, clean_arm);
        }
    };

    std::array<Vector, 2> ref_hat, ref_star;
    fit_pair(reference_draws, seed ^ 0xFEEDULL, ref_hat, ref_star);

    std::vector<DhatProbeRow> rows;
    for (std::size_t idx = 0; idx < ns.size(); ++idx) {
        std::array<Vector, 2> d_hat, d_star;
        fit_pair(ns[idx], seed + idx, d_hat, d_star);
        DhatProbeRow row;
        row.n = ns[idx];
        double paired = 0.0, reference = 0.0;
        for (int arm = 0; arm < 2; ++arm) {
            paired += (d_hat[arm] - d_star[arm]).squaredNorm();
            reference += (d_hat[arm] - ref_star[arm]).squaredNorm();
        }
        row.gap_paired = std::sqrt(paired);
        row.gap_reference = std::sqrt(reference);
        rows.push_back(row);
    }
    return rows;
}

void ExperimentConfig::validate() const {
    if (replications < 2) throw ConfigError("need replications >= 2 for any variance report");
    if (estimators.empty()) throw ConfigError("estimator list is empty");
    if (n < 1) throw ConfigError("n must be >= 1");
    if (rank < 1) throw ConfigError("rank must be >= 1");
    if (eval_n < 2) throw ConfigError("eval_n must be >= 2");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::exception_ptr first_error = nullptr;
    std::mutex error_mutex;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t]() {
            try {
                for (int i = t; i < count; i += threads) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

using PolicyList = std::vector<std::pair<std::string, Vector>>;

VarianceExperimentResult run_fixed_policy_experiment(
    const ExperimentConfig& config,
    const std::function<PolicyList(std::size_t, const SweepPoint&, const Dataset&)>& policies_for) {
    config.validate();
    const Scalarization scalarization_template{Vector(), ScalarizationMode::observed_outcomes,
                                               config.optimizer.sense};
    const std::vector<SweepPoint> points = expand_sweep(config);

    VarianceExperimentResult result;
    for (std::size_t sp = 0; sp < points.size(); ++sp) {
        const SweepPoint& point = points[sp];
        Scalarization scalarization = scalarization_template;
        scalarization.rho = point.rho;

        // policy probabilities depend only on covariates; labels fixed per point
        std::vector<std::string> policy_names;
        {
            const Dataset probe = sample_dataset(point.params, 2, config.seed);
            for (const auto& [name, pi] : policies_for(sp, point, probe)) {
                policy_names.push_back(name);
            }
        }

        const int n_policies = static_cast<int>(policy_names.size());
        const int n_estimators = static_cast<int>(config.estimators.size());
        std::vector<ReplicationOutput> outputs(config.replications);

        parallel_for(config.replications, config.threads, [&](int rep) {
            const std::uint64_t rep_seed =
                splitmix64(config.seed ^ splitmix64((sp << 32) | static_cast<std::uint64_t>(rep)));
            ReplicationOutput& out = outputs[rep];
            try {
                const Dataset data = sample_dataset(point.params, point.n, rep_seed);
                PropensityModel prop = config.propensity == PropensityChoice::known
                                           ? point.params.true_propensity()
                                           : fit_propensity(data);
                const FittedComponents components =
                    fit_components(data, point.rank, config.gamma_mode, std::move(prop));
                const auto policies = policies_for(sp, point, data);
                out.values.reserve(static_cast<std::size_t>(n_policies) * n_estimators);
                for (const auto& [name, pi] : policies) {
                    for (const EstimatorSpec& spec : config.estimators) {
                        out.values.push_back(
                            estimate(spec, pi, data, components, scalarization));
                    }
                }
            } catch (const Error&) {
                out.skipped = true;
            }
        });

        int skipped = 0;
        for (const auto& out : outputs) skipped += out.skipped ? 1 : 0;
        if (skipped > config.max_skip_fraction * config.replications) {
            throw Error("experiment aborted: " + std::to_string(skipped) + " of " +
                        std::to_string(config.replications) + " replications failed a fit");
        }

        for (int pi_idx = 0; pi_idx < n_policies; ++pi_idx) {
            for (int es = 0; es < n_estimators; ++es) {
                VarianceCell cell;
                cell.sweep_value = point.value;
                cell.policy = policy_names[pi_idx];
                cell.estimator = config.estimators[es].name();
                cell.skipped = skipped;
                for (int rep = 0; rep < config.replications; ++rep) {
                    if (outputs[rep].skipped) continue;
                    cell.replication_ids.push_back(rep);
                    cell.values.push_back(outputs[rep].values[pi_idx * n_estimators + es]);
                }
                cell.mean = sample_mean(cell.values);
                cell.variance = sample_variance(cell.values);
                result.cells.push_back(std::move(cell));
            }
        }
    }
    return result;
}

}  // namespace

VarianceExperimentResult run_variance_experiment(const ExperimentConfig& config) {
    auto policies_for = [&](std::size_t, const SweepPoint&, const Dataset& data) {
        PolicyList out;
        for (ReferencePolicy ref : config.reference_policies) {
            Vector pi(data.n());
            switch (ref) {
                case ReferencePolicy::always_treat: pi.setOnes(); break;
                case ReferencePolicy::uniform: pi.setConstant(0.5); break;
                case ReferencePolicy::oracle_optimal:
                    throw ConfigError("oracle_optimal reference requires run_policy_eval_experiment");
            }
            out.emplace_back(policy_label(ref), std::move(pi));
        }
        return out;
    };
    return run_fixed_policy_experiment(config, policies_for);
}

VarianceExperimentResult run_policy_eval_experiment(const ExperimentConfig& config) {
    config.validate();
    // one oracle policy per sweep point, learned from the true means
    const std::vector<SweepPoint> points = expand_sweep(config);
    std::vector<PolicyParams> stars;
    stars.reserve(points.size());
    for (const SweepPoint& point : points) {
        stars.push_back(
            oracle_optimal_policy(point.params, point.rho, config.optimizer, 100'000, config.seed));
    }
    auto policies_for = [stars](std::size_t sp, const SweepPoint&,
                                const Dataset& data) -> PolicyList {
        return {{policy_label(ReferencePolicy::oracle_optimal),
                 policy_prob_treated(stars[sp], data.covariates)}};
    };
    return run_fixed_policy_experiment(config, policies_for);
}

PolicyOptExperimentResult run_policy_opt_experiment(const ExperimentConfig& config) {
    config.validate();
    if (config.sweep) {
        throw ConfigError("policy_opt experiment does not support sweeps");
    }
    const DGPParams params = generate_dgp(config.p, config.k, config.r, config.noise_sd,
                                          config.dgp_seed);
    const int rank = std::min(config.rank, std::min(config.k, config.p));
    Vector rho = config.rho;
    if (rho.size() != config.k) throw ConfigError("rho length must equal k");

    Scalarization scalarization{rho, ScalarizationMode::observed_outcomes, config.optimizer.sense};
    const PolicyParams theta_star =
        oracle_optimal_policy(params, rho, config.optimizer, 100'000, config.seed);
    const auto maps = outcome_mean_maps(params, rho);

    const int n_estimators = static_cast<int>(config.estimators.size());
    struct TrialOutput {
        bool skipped = false;
        std::vector<double> oos;
        std::vector<double> mse;
    };
    std::vector<TrialOutput> outputs(config.replications);

    parallel_for(config.replications, config.threads, [&](int trial) {
        const std::uint64_t trial_seed =
            splitmix64(config.seed ^ splitmix64(0xA11ULL + static_cast<std::uint64_t>(trial)));
        TrialOutput& out = outputs[trial];
        try {
            const Dataset data = sample_dataset(params, config.n, trial_seed);
            PropensityModel prop = config.propensity == PropensityChoice::known
                                       ? params.true_propensity()
                                       : fit_propensity(data);
            const FittedComponents components =
                fit_components(data, rank, config.gamma_mode, std::move(prop));

            RandomStream eval_rng = derive_stream(config.seed, kSaltEval,
                                                  static_cast<std::uint64_t>(trial));
            const Matrix X_eval = draw_covariates(params, config.eval_n, eval_rng);
            const Vector eval0 = X_eval * maps[0];
            const Vector eval1 = X_eval * maps[1];
            const Vector p_star = policy_prob_treated(theta_star, X_eval);

            for (const EstimatorSpec& spec : config.estimators) {
                const EstimatorWeights weights =
                    build_estimator_weights(spec, data, components, scalarization);
                const auto [theta_hat, trace] =
                    optimize_policy(weights, data.covariates, config.optimizer);
                const Vector p_hat = policy_prob_treated(theta_hat, X_eval);
                KahanSum acc;
                for (int i = 0; i < config.eval_n; ++i) {
                    acc.add((1.0 - p_hat(i)) * eval0(i) + p_hat(i) * eval1(i));
                }
                out.oos.push_back(acc.value() / static_cast<double>(config.eval_n));
                out.mse.push_back((p_hat - p_star).squaredNorm() /
                                  static_cast<double>(config.eval_n));
            }
        } catch (const Error&) {
            out.skipped = true;
        }
    });

    int skipped = 0;
    for (const auto& out : outputs) skipped += out.skipped ? 1 : 0;
    if (skipped > config.max_skip_fraction * config.replications) {
        throw Error("experiment aborted: " + std::to_string(skipped) + " of " +
                    std::to_string(config.replications) + " trials failed a fit");
    }

    PolicyOptExperimentResult result;
    result.theta_star = theta_star;
    for (int es = 0; es < n_estimators; ++es) {
        PolicyOptCell cell;
        cell.estimator = config.estimators[es].name();
        cell.skipped = skipped;
        for (int trial = 0; trial < config.replications; ++trial) {
            if (outputs[trial].skipped) continue;
            cell.trial_ids.push_back(trial);
            cell.oos_values.push_back(outputs[trial].oos[es]);
            cell.mse_vs_star.push_back(outputs[trial].mse[es]);
        }
        cell.mean_value = sample_mean(cell.oos_values);
        cell.var_value = sample_variance(cell.oos_values);
        cell.mean_mse = sample_mean(cell.mse_vs_star);
        cell.log_mean_mse = std::log(std::max(cell.mean_mse, 1e-300));
        result.cells.push_back(std::move(cell));
    }
    return result;
}

std::string VarianceExperimentResult::tidy_csv() const {
    std::ostringstream out;
    out << "sweep_value,policy,estimator,replication,value\n";
    for (const auto& cell : cells) {
        for (std::size_t i = 0; i < cell.values.size(); ++i) {
            out << format_double(cell.sweep_value) << ',' << cell.policy << ',' << cell.estimator
                << ',' << cell.replication_ids[i] << ',' << format_double(cell.values[i]) << '\n';
        }
    }
    return out.str();
}

std::string VarianceExperimentResult::aggregate_csv() const {
    std::ostringstream out;
    out << "sweep_value,policy,estimator,replications_used,skipped,mean,variance\n";
    for (const auto& cell : cells) {
        out << format_double(cell.sweep_value) << ',' << cell.policy << ',' << cell.estimator
            << ',' << cell.values.size() << ',' << cell.skipped << ','
            << format_double(cell.mean) << ',' << format_double(cell.variance) << '\n';
    }
    return out.str();
}

std::string PolicyOptExperimentResult::tidy_csv() const {
    std::ostringstream out;
    out << "trial,estimator,oos_value,mse_vs_star\n";
    for (const auto& cell : cells) {
        for (std::size_t i = 0; i < cell.oos_values.size(); ++i) {
            out << cell.trial_ids[i] << ',' << cell.estimator << ','
                << format_double(cell.oos_values[i]) << ',' << format_double(cell.mse_vs_star[i])
                << '\n';
        }
    }
    return out.str();
}

std::string PolicyOptExperimentResult::aggregate_csv() const {
    std::ostringstream out;
    out << "estimator,trials_used,skipped,mean_value,var_value,mean_mse,log_mean_mse\n";
    for (const auto& cell : cells) {
        out << cell.estimator << ',' << cell.oos_values.size() << ',' << cell.skipped << ','
            << format_double(cell.mean_value) << ',' << format_double(cell.var_value) << ','
            << format_double(cell.mean_mse) << ',' << format_double(cell.log_mean_mse) << '\n';
    }
    return out.str();
}

}  // namespace rrpolicy
