#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rrpolicy/estimators.hpp"

namespace rrpolicy {

enum class InitMode { zeros, seeded_gaussian };

struct OptimizerConfig {
    double learning_rate = 0.05;
    int iterations = 20;
    InitMode init = InitMode::zeros;
    ObjectiveSense sense = ObjectiveSense::minimize;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OptimizationTrace {
    std::vector<Vector> theta_path;   // iterations + 1 entries
    std::vector<double> value_path;   // objective at each theta
    std::vector<double> grad_norms;   // gradient norm at each theta
};

// Objective value (1/n) sum_i sum_t pi_theta(t|x_i) w(i,t) at theta.
double objective_value(const EstimatorWeights& weights, const Matrix& X, const Vector& theta);

// Analytic gradient (1/n) sum_i sigma'(theta.x_i) (w(i,1) - w(i,0)) x_i.
Vector value_gradient(const EstimatorWeights& weights, const Matrix& X, const Vector& theta);

// Exactly config.iterations fixed-step gradient steps (descent for minimize,
// ascent for maximize). Deterministic given config.seed.
std::pair<PolicyParams, OptimizationTrace> optimize_policy(const EstimatorWeights& weights,
                                                           const Matrix& X,
                                                           const OptimizerConfig& config);

// Probability-scale policy disagreement on evaluation covariates.
double mse_vs_oracle(const PolicyParams& theta_hat, const PolicyParams& theta_star,
                     const Matrix& X_eval);

}  // namespace rrpolicy
