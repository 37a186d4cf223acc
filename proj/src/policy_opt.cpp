#include "rrpolicy/policy_opt.hpp"

#include <cmath>

#include "rrpolicy/errors.hpp"
#include "rrpolicy/rng.hpp"

namespace rrpolicy {

void OptimizerConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

double objective_value(const EstimatorWeights& weights, const Matrix& X, const Vector& theta) {
    PolicyParams policy{theta};
    return weighted_policy_value(weights, policy_prob_treated(policy, X));
}

Vector value_gradient(const EstimatorWeights& weights, const Matrix& X, const Vector& theta) {
    if (theta.size() != X.cols() || weights.w.rows() != X.rows()) {
        throw DimensionMismatch("value_gradient: shapes do not match");
    }
    const int n = static_cast<int>(X.rows());
    Vector z = X * theta;
    Vector scale(n);
    for (int i = 0; i < n; ++i) {
        const double s = logistic(z(i));
        scale(i) = s * (1.0 - s) * (weights.w(i, 1) - weights.w(i, 0));
    }
    return (X.transpose() * scale) / static_cast<double>(n);
}

std::pair<PolicyParams, OptimizationTrace> optimize_policy(const EstimatorWeights& weights,
                                                           const Matrix& X,
                                                           const OptimizerConfig& config) {
    config.validate();
    const int p = static_cast<int>(X.cols());

    Vector theta;
    if (config.init == InitMode::zeros) {
        theta = Vector::Zero(p);
    } else {
        RandomStream rng = derive_stream(config.seed, 0x7015ULL);
        theta = rng.normal_vector(p);
    }

    const double direction = config.sense == ObjectiveSense::minimize ? -1.0 : 1.0;
    OptimizationTrace trace;
    trace.theta_path.reserve(config.iterations + 1);
    trace.value_path.reserve(config.iterations + 1);
    trace.grad_norms.reserve(config.iterations + 1);

    auto record = [&](const Vector& th) {
        const double value = objective_value(weights, X, th);
        const Vector grad = value_gradient(weights, X, th);
        if (!std::isfinite(value) || !grad.allFinite()) {
            std::vector<double> last(th.data(), th.data() + th.size());
            if (!trace.theta_path.empty()) {
                const Vector& prev = trace.theta_path.back();
                last.assign(prev.data(), prev.data() + prev.size());
            }
            throw NonFiniteValue("objective or gradient became non-finite", std::move(last));
        }
        trace.theta_path.push_back(th);
        trace.value_path.push_back(value);
        trace.grad_norms.push_back(grad.norm());
        return grad;
    };

    Vector grad = record(theta);
    for (int it = 0; it < config.iterations; ++it) {
        theta += direction * config.learning_rate * grad;
        grad = record(theta);
    }
    return {PolicyParams{theta}, std::move(trace)};
}

double mse_vs_oracle(const PolicyParams& theta_hat, const PolicyParams& theta_star,
                     const Matrix& X_eval) {
    const Vector p_hat = policy_prob_treated(theta_hat, X_eval);
    const Vector p_star = policy_prob_treated(theta_star, X_eval);
    return (p_hat - p_star).squaredNorm() / static_cast<double>(X_eval.rows());
}

}  // namespace rrpolicy
