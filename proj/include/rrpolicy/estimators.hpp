#pragma once

#include <array>
#include <optional>
#include <string>

#include "rrpolicy/propensity.hpp"
#include "rrpolicy/rrr.hpp"
#include "rrpolicy/types.hpp"

namespace rrpolicy {

enum class EstimatorFamily { dm, ipw, dr, cv };
enum class OutcomeSource { observed_y, ols_mu, rrr_mu, rrr_latent };
enum class CvTarget { bhatx, mean_y, reg_y_given_x, reg_zhat_given_x, reg_y_given_tx };

struct EstimatorSpec {
    EstimatorFamily family = EstimatorFamily::ipw;
    OutcomeSource source = OutcomeSource::observed_y;
    CvTarget cv_target = CvTarget::bhatx;

    // Family/source compatibility plus the scalarization-mode constraint.
    void validate(const Scalarization& scalarization) const;
    std::string name() const;
    // "family:source" or "family:source:cv_target", e.g. "cv:rrr_mu:bhatx"
    static EstimatorSpec parse(const std::string& text);
};

// Per-arm fitted outcome models plus the propensity model used for weighting.
struct FittedComponents {
    std::array<std::optional<FullRankModel>, 2> ols;
    std::array<std::optional<RRRModel>, 2> rrr;
    PropensityModel propensity;
};

// Fits OLS and RRR per arm on the arm's rows. The propensity model is taken
// as given (known in synthetic mode, fitted upstream otherwise).
FittedComponents fit_components(const Dataset& data, int rank, GammaMode gamma_mode,
                                PropensityModel propensity);

// Scalarized per-unit C_t rows and the fitted weighting vector.
struct ControlVariateBlock {
    Matrix cmat;  // n x d: rows (1 - 1[T_i=t]/e_t(X_i)) * h_t(X_i)
    Vector dvec;  // d: least squares of targets on h_t over arm-t rows
    int arm = 0;
    bool used_pseudoinverse = false;
};

// h_t(X) for the configured target family evaluated on every row.
Matrix cv_basis(const Dataset& data, const FittedComponents& components, int arm,
                CvTarget cv_target);

// targets: scalarized outcome-source values per unit (rho'Y, rho'mu_hat or
// rho'Z_hat of the observed arm). dvec solves targets ~ h on arm-t rows so
// that dvec'h_t(x) estimates the conditional mean of the target given x in
// arm t; the correction dvec'cmat then mirrors the doubly robust form.
ControlVariateBlock build_control_variates(const Vector& propensity_treated, const Dataset& data,
                                           int arm, const Matrix& h, const Vector& targets);

// Per-unit, per-arm scalar weights w[i][t] so that every estimator value is
// (1/n) sum_i sum_t pi(t|x_i) w(i,t). Fixed integrand makes the policy
// gradient analytic.
struct EstimatorWeights {
    Matrix w;  // n x 2
};

// Scalarized model predictions per arm and per observed unit.
struct SourceScalars {
    std::array<Vector, 2> per_arm;  // rho' mu_t(x_i) (or latent); unused for observed_y
    Vector observed;                // rho' (source value at the observed arm)
};

SourceScalars scalarize_source(OutcomeSource source, const Dataset& data,
                               const FittedComponents& components,
                               const Scalarization& scalarization);

EstimatorWeights build_estimator_weights(const EstimatorSpec& spec, const Dataset& data,
                                         const FittedComponents& components,
                                         const Scalarization& scalarization);

// (1/n) sum_i [ pi(0|x_i) w(i,0) + pi(1|x_i) w(i,1) ], Kahan-compensated,
// summation order fixed by unit index then arm.
double weighted_policy_value(const EstimatorWeights& weights, const Vector& pi_treated);

// Named entry points per estimator family.
double dm_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source);
double ipw_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                 const Scalarization& scalarization, OutcomeSource source);
double dr_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source);
double cv_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source,
                const std::array<ControlVariateBlock, 2>& blocks);

std::array<ControlVariateBlock, 2> build_cv_blocks(const Dataset& data,
                                                   const FittedComponents& components,
                                                   const Scalarization& scalarization,
                                                   OutcomeSource source, CvTarget cv_target);

// Dispatcher over the spec.
double estimate(const EstimatorSpec& spec, const Vector& pi_treated, const Dataset& data,
                const FittedComponents& components, const Scalarization& scalarization);

std::string to_string(EstimatorFamily family);
std::string to_string(OutcomeSource source);
std::string to_string(CvTarget target);

}  // namespace rrpolicy
