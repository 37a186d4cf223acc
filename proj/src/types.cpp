#include "rrpolicy/types.hpp"

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

int Dataset::arm_count(int arm) const {
    int c = 0;
    for (int i = 0; i < treatments.size(); ++i) {
        if (treatments(i) == arm) ++c;
    }
    return c;
}

void Dataset::validate() const {
    const int rows = n();
    if (rows < 1) {
        throw ValidationError("dataset is empty");
    }
    if (treatments.size() != rows || outcomes.rows() != rows) {
        throw DimensionMismatch("covariates, treatments, and outcomes row counts differ");
    }
    if (!covariates.allFinite() || !outcomes.allFinite()) {
        throw ValidationError("non-finite entry in covariates or outcomes");
    }
    for (int i = 0; i < rows; ++i) {
        if (treatments(i) != 0 && treatments(i) != 1) {
            throw ValidationError("treatment value outside {0,1} at row " + std::to_string(i));
        }
    }
    if (latent_truth) {
        for (const auto& z : *latent_truth) {
            if (z.rows() != rows) throw DimensionMismatch("latent_truth row count differs");
        }
    }
    if (potential_outcomes_truth) {
        for (const auto& y : *potential_outcomes_truth) {
            if (y.rows() != rows || y.cols() != outcomes.cols()) {
                throw DimensionMismatch("potential_outcomes_truth shape differs");
            }
        }
    }
}

void Dataset::validate_for_fitting() const {
    validate();
    for (int arm = 0; arm < 2; ++arm) {
        if (arm_count(arm) == 0) {
            throw ValidationError("arm " + std::to_string(arm) + " has no units");
        }
    }
}

double policy_prob(const PolicyParams& policy, const Vector& x, int t) {
    if (policy.theta.size() != x.size()) {
        throw DimensionMismatch("policy_prob: theta and x lengths differ");
    }
    const double p1 = logistic(policy.theta.dot(x));
    return t == 1 ? p1 : 1.0 - p1;
}

Vector policy_prob_treated(const PolicyParams& policy, const Matrix& X) {
    if (policy.theta.size() != X.cols()) {
        throw DimensionMismatch("policy_prob_treated: theta and X widths differ");
    }
    Vector z = X * policy.theta;
    for (int i = 0; i < z.size(); ++i) z(i) = logistic(z(i));
    return z;
}

std::string to_string(ObjectiveSense sense) {
    return sense == ObjectiveSense::minimize ? "minimize" : "maximize";
}

std::string to_string(ScalarizationMode mode) {
    return mode == ScalarizationMode::observed_outcomes ? "observed_outcomes" : "latent_factors";
}

}  // namespace rrpolicy
