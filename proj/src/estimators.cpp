#include "rrpolicy/estimators.hpp"

#include <cmath>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

namespace {

const FullRankModel& require_ols(const FittedComponents& c, int arm) {
    if (!c.ols[arm]) throw ModelMissingForArm(arm);
    return *c.ols[arm];
}

const RRRModel& require_rrr(const FittedComponents& c, int arm) {
    if (!c.rrr[arm]) throw ModelMissingForArm(arm);
    return *c.rrr[arm];
}

Vector observed_arm_values(const Dataset& data, const std::array<Vector, 2>& per_arm) {
    Vector out(data.n());
    for (int i = 0; i < data.n(); ++i) {
        out(i) = per_arm[data.treatments(i)](i);
    }
    return out;
}

void check_pi(const Vector& pi_treated, int n) {
    if (pi_treated.size() != n) {
        throw DimensionMismatch("policy probability vector length differs from n");
    }
}

}  // namespace

void EstimatorSpec::validate(const Scalarization& scalarization) const {
    const bool latent = source == OutcomeSource::rrr_latent;
    if (latent && scalarization.mode != ScalarizationMode::latent_factors) {
        throw ConfigError("rrr_latent requires latent_factors scalarization");
    }
    if (!latent && scalarization.mode != ScalarizationMode::observed_outcomes) {
        throw ConfigError(to_string(source) + " requires observed_outcomes scalarization");
    }
    if (family == EstimatorFamily::dm && source == OutcomeSource::observed_y) {
        throw ConfigError("direct method cannot use observed outcomes as its model");
    }
    if (family == EstimatorFamily::dr &&
        !(source == OutcomeSource::ols_mu || source == OutcomeSource::rrr_mu)) {
        throw ConfigError("doubly robust requires an outcome model source (ols_mu or rrr_mu)");
    }
}

std::string EstimatorSpec::name() const {
    std::string s = to_string(family) + ":" + to_string(source);
    if (family == EstimatorFamily::cv) s += ":" + to_string(cv_target);
    return s;
}

EstimatorSpec EstimatorSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() < 2 || parts.size() > 3) {
        throw ConfigError("estimator spec must be family:source[:cv_target], got '" + text + "'");
    }

    EstimatorSpec spec;
    if (parts[0] == "dm") spec.family = EstimatorFamily::dm;
    else if (parts[0] == "ipw") spec.family = EstimatorFamily::ipw;
    else if (parts[0] == "dr") spec.family = EstimatorFamily::dr;
    else if (parts[0] == "cv") spec.family = EstimatorFamily::cv;
    else throw ConfigError("unknown estimator family '" + parts[0] + "'");

    if (parts[1] == "observed_y") spec.source = OutcomeSource::observed_y;
    else if (parts[1] == "ols_mu") spec.source = OutcomeSource::ols_mu;
    else if (parts[1] == "rrr_mu") spec.source = OutcomeSource::rrr_mu;
    else if (parts[1] == "rrr_latent") spec.source = OutcomeSource::rrr_latent;
    else throw ConfigError("unknown outcome source '" + parts[1] + "'");

    if (parts.size() == 3) {
        if (spec.family != EstimatorFamily::cv) {
            throw ConfigError("cv_target only applies to the cv family");
        }
        if (parts[2] == "bhatx") spec.cv_target = CvTarget::bhatx;
        else if (parts[2] == "mean_y") spec.cv_target = CvTarget::mean_y;
        else if (parts[2] == "reg_y_given_x") spec.cv_target = CvTarget::reg_y_given_x;
        else if (parts[2] == "reg_zhat_given_x") spec.cv_target = CvTarget::reg_zhat_given_x;
        else if (parts[2] == "reg_y_given_tx") spec.cv_target = CvTarget::reg_y_given_tx;
        else throw ConfigError("unknown cv target '" + parts[2] + "'");
    }
    return spec;
}

FittedComponents fit_components(const Dataset& data, int rank, GammaMode gamma_mode,
                                PropensityModel propensity) {
    data.validate_for_fitting();
    FittedComponents components;
    components.propensity = std::move(propensity);
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
        components.ols[arm] = fit_ols(Xa, Ya);
        components.rrr[arm] = fit_rrr(Xa, Ya, rank, gamma_mode);
    }
    return components;
}

SourceScalars scalarize_source(OutcomeSource source, const Dataset& data,
                               const FittedComponents& components,
                               const Scalarization& scalarization) {
    const Vector& rho = scalarization.rho;
    SourceScalars out;
    switch (source) {
        case OutcomeSource::observed_y: {
            if (rho.size() != data.k()) throw DimensionMismatch("rho length must equal k");
            out.observed = data.outcomes * rho;
            out.per_arm[0] = out.observed;
            out.per_arm[1] = out.observed;
            return out;
        }
        case OutcomeSource::ols_mu: {
            if (rho.size() != data.k()) throw DimensionMismatch("rho length must equal k");
            for (int arm = 0; arm < 2; ++arm) {
                out.per_arm[arm] = require_ols(components, arm).predict(data.covariates) * rho;
            }
            break;
        }
        case OutcomeSource::rrr_mu: {
            if (rho.size() != data.k()) throw DimensionMismatch("rho length must equal k");
            for (int arm = 0; arm < 2; ++arm) {
                out.per_arm[arm] =
                    predict_outcomes(require_rrr(components, arm), data.covariates) * rho;
            }
            break;
        }
        case OutcomeSource::rrr_latent: {
            for (int arm = 0; arm < 2; ++arm) {
                const RRRModel& model = require_rrr(components, arm);
                if (rho.size() != model.rank) {
                    throw DimensionMismatch("rho length must equal the fitted rank");
                }
                out.per_arm[arm] = predict_latent(model, data.covariates) * rho;
            }
            break;
        }
    }
    out.observed = observed_arm_values(data, out.per_arm);
    return out;
}

Matrix cv_basis(const Dataset& data, const FittedComponents& components, int arm,
                CvTarget cv_target) {
    switch (cv_target) {
        case CvTarget::bhatx:
            return predict_latent(require_rrr(components, arm), data.covariates);
        case CvTarget::mean_y: {
            const Vector mean = data.outcomes.colwise().mean();
            Matrix h(data.n(), data.k());
            h.rowwise() = mean.transpose();
            return h;
        }
        case CvTarget::reg_y_given_x: {
            const FullRankModel pooled = fit_ols(data.covariates, data.outcomes);
            return pooled.predict(data.covariates);
        }
        case CvTarget::reg_zhat_given_x: {
            // observed-arm latent predictions regressed on X, pooling arms
            const int r = require_rrr(components, 0).rank;
            Matrix zhat(data.n(), r);
            for (int i = 0; i < data.n(); ++i) {
                const RRRModel& model = require_rrr(components, data.treatments(i));
                zhat.row(i) = data.covariates.row(i) * model.B_hat.transpose();
            }
            const FullRankModel pooled = fit_ols(data.covariates, zhat);
            return pooled.predict(data.covariates);
        }
        case CvTarget::reg_y_given_tx: {
            return require_ols(components, arm).predict(data.covariates);
        }
    }
    throw ConfigError("unhandled cv target");
}

ControlVariateBlock build_control_variates(const Vector& propensity_treated, const Dataset& data,
                                           int arm, const Matrix& h, const Vector& targets) {
    const int n = data.n();
    if (propensity_treated.size() != n || h.rows() != n || targets.size() != n) {
        throw DimensionMismatch("control variate inputs must share the dataset row count");
    }

    ControlVariateBlock block;
    block.arm = arm;
    block.cmat.resize(n, h.cols());
    for (int i = 0; i < n; ++i) {
        const double e_arm = arm == 1 ? propensity_treated(i) : 1.0 - propensity_treated(i);
        if (!(e_arm > 0.0) || !(e_arm <= 1.0)) {
            throw PropensityOutOfRange("propensity outside (0, 1] at row " + std::to_string(i));
        }
        const double kappa =
            data.treatments(i) == arm ? 1.0 - 1.0 / e_arm : 1.0;
        block.cmat.row(i) = kappa * h.row(i);
    }

    const int m = data.arm_count(arm);
    Matrix h_arm(m, h.cols());
    Vector t_arm(m);
    int row = 0;
    for (int i = 0; i < n; ++i) {
        if (data.treatments(i) == arm) {
            h_arm.row(row) = h.row(i);
            t_arm(row) = targets(i);
            ++row;
        }
    }
    block.dvec = solve_least_squares(h_arm, t_arm, &block.used_pseudoinverse);
    return block;
}

std::array<ControlVariateBlock, 2> build_cv_blocks(const Dataset& data,
                                                   const FittedComponents& components,
                                                   const Scalarization& scalarization,
                                                   OutcomeSource source, CvTarget cv_target) {
    const SourceScalars scalars = scalarize_source(source, data, components, scalarization);
    const Vector e1 = components.propensity.prob_treated(data.covariates);
    std::array<ControlVariateBlock, 2> blocks = {
        build_control_variates(e1, data, 0, cv_basis(data, components, 0, cv_target),
                               scalars.observed),
        build_control_variates(e1, data, 1, cv_basis(data, components, 1, cv_target),
                               scalars.observed),
    };
    return blocks;
}

EstimatorWeights build_estimator_weights(const EstimatorSpec& spec, const Dataset& data,
                                         const FittedComponents& components,
                                         const Scalarization& scalarization) {
    spec.validate(scalarization);
    const int n = data.n();
    const SourceScalars scalars = scalarize_source(spec.source, data, components, scalarization);

    EstimatorWeights weights;
    weights.w.resize(n, 2);

    if (spec.family == EstimatorFamily::dm) {
        for (int t = 0; t < 2; ++t) weights.w.col(t) = scalars.per_arm[t];
        return weights;
    }

    const Vector e1 = components.propensity.prob_treated(data.covariates);
    for (int i = 0; i < n; ++i) {
        const int ti = data.treatments(i);
        const double e_obs = ti == 1 ? e1(i) : 1.0 - e1(i);
        const double core = scalars.observed(i) / e_obs;
        for (int t = 0; t < 2; ++t) {
            weights.w(i, t) = (ti == t) ? core : 0.0;
        }
    }

    if (spec.family == EstimatorFamily::ipw) {
        return weights;
    }

    if (spec.family == EstimatorFamily::dr) {
        const Vector rho_y = data.outcomes * scalarization.rho;
        for (int i = 0; i < n; ++i) {
            const int ti = data.treatments(i);
            const double e_obs = ti == 1 ? e1(i) : 1.0 - e1(i);
            for (int t = 0; t < 2; ++t) {
                const double mu = scalars.per_arm[t](i);
                const double resid = (ti == t) ? (rho_y(i) - mu) / e_obs : 0.0;
                weights.w(i, t) = resid + mu;
            }
        }
        return weights;
    }

    // cv: IPW core plus the fitted zero-mean correction per arm
    const auto blocks = build_cv_blocks(data, components, scalarization, spec.source,
                                        spec.cv_target);
    for (int t = 0; t < 2; ++t) {
        const Vector corr = blocks[t].cmat * blocks[t].dvec;
        for (int i = 0; i < n; ++i) {
            weights.w(i, t) += corr(i);
        }
    }
    return weights;
}

double weighted_policy_value(const EstimatorWeights& weights, const Vector& pi_treated) {
    const int n = static_cast<int>(weights.w.rows());
    check_pi(pi_treated, n);
    KahanSum acc;
    for (int i = 0; i < n; ++i) {
        const double p1 = pi_treated(i);
        acc.add((1.0 - p1) * weights.w(i, 0));
        acc.add(p1 * weights.w(i, 1));
    }
    return acc.value() / static_cast<double>(n);
}

double dm_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source) {
    EstimatorSpec spec{EstimatorFamily::dm, source};
    return weighted_policy_value(build_estimator_weights(spec, data, components, scalarization),
                                 pi_treated);
}

double ipw_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                 const Scalarization& scalarization, OutcomeSource source) {
    EstimatorSpec spec{EstimatorFamily::ipw, source};
    return weighted_policy_value(build_estimator_weights(spec, data, components, scalarization),
                                 pi_treated);
}

double dr_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source) {
    EstimatorSpec spec{EstimatorFamily::dr, source};
    return weighted_policy_value(build_estimator_weights(spec, data, components, scalarization),
                                 pi_treated);
}

double cv_value(const Vector& pi_treated, const Dataset& data, const FittedComponents& components,
                const Scalarization& scalarization, OutcomeSource source,
                const std::array<ControlVariateBlock, 2>& blocks) {
    // Same fold as ipw_value with the correction added inside the integrand,
    // so dvec = 0 reproduces ipw_value bit for bit.
    EstimatorSpec ipw_spec{EstimatorFamily::ipw, source};
    EstimatorWeights weights = build_estimator_weights(ipw_spec, data, components, scalarization);
    for (int t = 0; t < 2; ++t) {
        const Vector corr = blocks[t].cmat * blocks[t].dvec;
        for (int i = 0; i < data.n(); ++i) {
            weights.w(i, t) += corr(i);
        }
    }
    return weighted_policy_value(weights, pi_treated);
}

double estimate(const EstimatorSpec& spec, const Vector& pi_treated, const Dataset& data,
                const FittedComponents& components, const Scalarization& scalarization) {
    return weighted_policy_value(build_estimator_weights(spec, data, components, scalarization),
                                 pi_treated);
}

std::string to_string(EstimatorFamily family) {
    switch (family) {
        case EstimatorFamily::dm: return "dm";
        case EstimatorFamily::ipw: return "ipw";
        case EstimatorFamily::dr: return "dr";
        case EstimatorFamily::cv: return "cv";
    }
    return "?";
}

std::string to_string(OutcomeSource source) {
    switch (source) {
        case OutcomeSource::observed_y: return "observed_y";
        case OutcomeSource::ols_mu: return "ols_mu";
        case OutcomeSource::rrr_mu: return "rrr_mu";
        case OutcomeSource::rrr_latent: return "rrr_latent";
    }
    return "?";
}

std::string to_string(CvTarget target) {
    switch (target) {
        case CvTarget::bhatx: return "bhatx";
        case CvTarget::mean_y: return "mean_y";
        case CvTarget::reg_y_given_x: return "reg_y_given_x";
        case CvTarget::reg_zhat_given_x: return "reg_zhat_given_x";
        case CvTarget::reg_y_given_tx: return "reg_y_given_tx";
    }
    return "?";
}

}  // namespace rrpolicy
