#pragma once

#include <array>
#include <optional>
#include <string>

#include "rrpolicy/linalg.hpp"

namespace rrpolicy {

// Observational tuples (X_i, T_i, Y_i) with optional synthetic ground truth.
struct Dataset {
    Matrix covariates;                // n x p
    Eigen::VectorXi treatments;       // n, values in {0,1}
    Matrix outcomes;                  // n x k
    std::optional<std::array<Matrix, 2>> latent_truth;              // per-arm n x r
    std::optional<std::array<Matrix, 2>> potential_outcomes_truth;  // per-arm n x k

    int n() const { return static_cast<int>(covariates.rows()); }
    int p() const { return static_cast<int>(covariates.cols()); }
    int k() const { return static_cast<int>(outcomes.cols()); }

    int arm_count(int arm) const;

    // Row counts equal, n >= 1, finite entries, treatments in {0,1}.
    void validate() const;
    // Additionally requires each arm nonempty (precondition of fitting ops).
    void validate_for_fitting() const;
};

enum class ScalarizationMode { observed_outcomes, latent_factors };
enum class ObjectiveSense { minimize, maximize };

struct Scalarization {
    Vector rho;
    ScalarizationMode mode = ScalarizationMode::observed_outcomes;
    ObjectiveSense sense = ObjectiveSense::minimize;
};

struct PolicyParams {
    Vector theta;
};

// pi(t|x) for the logistic policy; stable for |theta.x| up to ~700, and both
// arms derive from a single sigmoid evaluation so they sum to 1 exactly.
double policy_prob(const PolicyParams& policy, const Vector& x, int t);

// pi(1|x_i) for every row of X.
Vector policy_prob_treated(const PolicyParams& policy, const Matrix& X);

std::string to_string(ObjectiveSense sense);
std::string to_string(ScalarizationMode mode);

}  // namespace rrpolicy
