#include "rrpolicy/propensity.hpp"

#include <algorithm>
#include <cmath>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

namespace {

double clamp_prob(double p, double clip) {
    return std::min(std::max(p, clip), 1.0 - clip);
}

double negative_log_likelihood(const Matrix& Xa, const Eigen::VectorXi& T, const Vector& coef) {
    double nll = 0.0;
    const Vector z = Xa * coef;
    for (int i = 0; i < z.size(); ++i) {
        // log(1 + exp(z)) - t*z, computed stably
        const double zi = z(i);
        const double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
        nll += softplus - (T(i) == 1 ? zi : 0.0);
    }
    return nll;
}

}  // namespace

double PropensityModel::prob(const Vector& x, int t) const {
    if (beta.size() != x.size()) {
        throw DimensionMismatch("propensity: beta and x lengths differ");
    }
    const double e1 = clamp_prob(logistic(beta.dot(x) + intercept), clip);
    return t == 1 ? e1 : 1.0 - e1;
}

Vector PropensityModel::prob_treated(const Matrix& X) const {
    if (beta.size() != X.cols()) {
        throw DimensionMismatch("propensity: beta and X widths differ");
    }
    Vector z = (X * beta).array() + intercept;
    for (int i = 0; i < z.size(); ++i) z(i) = clamp_prob(logistic(z(i)), clip);
    return z;
}

PropensityModel fit_propensity(const Dataset& data, double clip) {
    data.validate();
    if (!(clip > 0.0 && clip < 0.5)) {
        throw ConfigError("propensity clip must lie in (0, 0.5)");
    }
    for (int arm = 0; arm < 2; ++arm) {
        if (data.arm_count(arm) == 0) {
            throw ValidationError("cannot fit propensity: arm " + std::to_string(arm) +
                                  " has no units");
        }
    }

    const int n = data.n();
    const int p = data.p();
    Matrix Xa(n, p + 1);
    Xa.leftCols(p) = data.covariates;
    Xa.col(p).setOnes();

    Vector coef = Vector::Zero(p + 1);
    double nll = negative_log_likelihood(Xa, data.treatments, coef);
    const int max_iter = 500;
    bool converged = false;

    for (int iter = 0; iter < max_iter; ++iter) {
        Vector z = Xa * coef;
        Vector mu(n), w(n);
        for (int i = 0; i < n; ++i) {
            mu(i) = logistic(z(i));
            w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-10);
        }
        Vector resid(n);
        for (int i = 0; i < n; ++i) resid(i) = (data.treatments(i) == 1 ? 1.0 : 0.0) - mu(i);
        Vector grad = Xa.transpose() * resid;  // ascent direction of log-likelihood
        if (grad.norm() < 1e-8) {
            converged = true;
            break;
        }
        Matrix hess = Xa.transpose() * w.asDiagonal() * Xa;
        hess += 1e-12 * hess.trace() / (p + 1) * Matrix::Identity(p + 1, p + 1);
        Vector step = hess.ldlt().solve(grad);

        double scale = 1.0;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            Vector trial = coef + scale * step;
            const double trial_nll = negative_log_likelihood(Xa, data.treatments, trial);
            if (trial_nll <= nll) {
                coef = trial;
                nll = trial_nll;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved) break;
    }

    if (!converged) {
        // With perfect separation the likelihood keeps improving as ||coef||
        // grows; detect it by strict margin classification.
        bool separated = true;
        const Vector z = Xa * coef;
        for (int i = 0; i < n; ++i) {
            const double sign = data.treatments(i) == 1 ? 1.0 : -1.0;
            if (sign * z(i) <= 0.0) {
                separated = false;
                break;
            }
        }
        if (separated && coef.norm() > 10.0) {
            throw Separation("perfect separation detected in propensity fit");
        }
        throw NonConvergence("propensity fit did not reach gradient norm < 1e-8");
    }

    PropensityModel model;
    model.beta = coef.head(p);
    model.intercept = coef(p);
    model.clip = clip;
    return model;
}

}  // namespace rrpolicy
