#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rrpolicy/estimators.hpp"
#include "rrpolicy/policy_opt.hpp"

namespace rrpolicy {

// Synthetic generating process: X ~ N(M, I_p), T ~ Bernoulli(sigmoid(beta.X)),
// Z(t) = B_t X + U_t, Y(t) = A_t Z(t) + eps_t with U, eps ~ N(0, noise_sd^2 I)
// drawn independently per arm.
struct DGPParams {
    int p = 8;
    int k = 5;
    int r = 2;
    Vector M;
    Vector beta;
    std::array<Matrix, 2> A;  // k x r
    std::array<Matrix, 2> B;  // r x p
    double noise_sd = 1.0;
    std::uint64_t seed = 0;

    PropensityModel true_propensity(double clip = 0.01) const;
};

// M, A_t, B_t standard normal entries; beta standard normal scaled by
// 1/sqrt(p) so propensities stay non-degenerate as p grows.
DGPParams generate_dgp(int p, int k, int r, double noise_sd, std::uint64_t seed);

Dataset sample_dataset(const DGPParams& params, int n, std::uint64_t seed);

enum class OracleMode { Y, Z };

struct OracleValue {
    double value = 0.0;
    double standard_error = 0.0;
};

// Monte Carlo policy value over fresh covariate draws using the true
// conditional means (A_t B_t x, or B_t x in latent mode).
OracleValue oracle_policy_value(const DGPParams& params, const PolicyParams& policy,
                                const Vector& rho, OracleMode mode, int draws = 1'000'000,
                                std::uint64_t seed = 31);

// As above but with explicit per-arm scalar mean maps a_t (value = a_t.x).
OracleValue oracle_policy_value_linear(const DGPParams& params, const PolicyParams& policy,
                                       const std::array<Vector, 2>& arm_maps, int draws,
                                       std::uint64_t seed);

// Policy optimization against the true-mean direct-method objective.
PolicyParams oracle_optimal_policy(const DGPParams& params, const Vector& rho,
                                   const OptimizerConfig& config, int train_draws = 100'000,
                                   std::uint64_t seed = 777);

// Population limit of the fitted B_hat basis for one arm: eigenvectors of
// Gamma^{1/2} C Sxx_t C' Gamma^{1/2} with the arm-conditional second moment
// Sxx_t = E[X X' e_t(X)] / E[e_t(X)] (propensity-tilted quadrature).
Matrix canonical_latent_basis(const DGPParams& params, int arm, GammaMode gamma_mode,
                              int draws = 1'000'000, std::uint64_t seed = 4242);

struct DhatProbeRow {
    int n = 0;
    // || D_hat(noisy targets) - D*(noiseless targets) || on the same draw
    double gap_paired = 0.0;
    // || D_hat - D*_ref || against a fixed large-sample reference
    double gap_reference = 0.0;
};

// Convergence probe for the fitted control-variate weighting: h = true B_t X,
// true propensities; D_hat regresses noisy latent targets, D* noiseless ones.
std::vector<DhatProbeRow> dhat_consistency_probe(const DGPParams& params,
                                                 const std::vector<int>& ns, const Vector& rho_z,
                                                 std::uint64_t seed,
                                                 int reference_draws = 200'000);

enum class SweepAxis { n, noise, dim_ratio, latent_dim };
enum class PropensityChoice { known, estimated };
enum class ReferencePolicy { always_treat, uniform, oracle_optimal };

struct Sweep {
    SweepAxis axis = SweepAxis::n;
    std::vector<double> values;
};

struct ExperimentConfig {
    int n = 100;
    int replications = 100;
    Vector rho;
    std::vector<EstimatorSpec> estimators;
    std::optional<Sweep> sweep;
    int p = 8, k = 5, r = 2;
    double noise_sd = 1.0;
    int rank = 2;
    GammaMode gamma_mode = GammaMode::residual_precision;
    PropensityChoice propensity = PropensityChoice::known;
    std::vector<ReferencePolicy> reference_policies = {ReferencePolicy::always_treat,
                                                       ReferencePolicy::uniform};
    OptimizerConfig optimizer;
    int eval_n = 10'000;
    std::uint64_t seed = 0;
    std::uint64_t dgp_seed = 0;
    int threads = 1;
    double max_skip_fraction = 0.01;

    void validate() const;
};

// One (sweep value, policy, estimator) cell with its per-replication values.
struct VarianceCell {
    double sweep_value = 0.0;
    std::string policy;
    std::string estimator;
    std::vector<int> replication_ids;
    std::vector<double> values;
    int skipped = 0;
    double mean = 0.0;
    double variance = 0.0;
};

struct VarianceExperimentResult {
    std::vector<VarianceCell> cells;
    std::string tidy_csv() const;
    std::string aggregate_csv() const;
};

struct PolicyOptCell {
    std::string estimator;
    std::vector<int> trial_ids;
    std::vector<double> oos_values;
    std::vector<double> mse_vs_star;
    int skipped = 0;
    double mean_value = 0.0;
    double var_value = 0.0;
    double mean_mse = 0.0;
    double log_mean_mse = 0.0;
};

struct PolicyOptExperimentResult {
    std::vector<PolicyOptCell> cells;
    PolicyParams theta_star;
    std::string tidy_csv() const;
    std::string aggregate_csv() const;
};

// Fig. 1 style: estimator spread across replications at fixed reference
// policies, swept over the configured axis.
VarianceExperimentResult run_variance_experiment(const ExperimentConfig& config);

// Fig. 2 style: estimator spread at the oracle-optimal policy.
VarianceExperimentResult run_policy_eval_experiment(const ExperimentConfig& config);

// Fig. 3 style: train a policy per estimator per trial, evaluate out of
// sample against true means, report value spread and MSE vs the oracle policy.
PolicyOptExperimentResult run_policy_opt_experiment(const ExperimentConfig& config);

// Deterministic %.17g formatting shared by all CSV emitters.
std::string format_double(double v);

// Static-striped parallel loop; results must be written by index so the
// outcome is independent of the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace rrpolicy
