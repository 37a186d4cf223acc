#include "rrpolicy/rrr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

namespace {

void check_design(const Matrix& X, const Matrix& Y) {
    if (X.rows() != Y.rows()) {
        throw DimensionMismatch("X and Y row counts differ");
    }
    if (X.rows() <= X.cols()) {
        throw SingularDesign("need n > p for regression fits");
    }
    if (!X.allFinite() || !Y.allFinite()) {
        throw ValidationError("non-finite entry in regression inputs");
    }
}

Matrix solve_normal_equations(const Matrix& Sxx, const Matrix& Syx) {
    Matrix s = ridge_regularized(Sxx);
    Eigen::LDLT<Matrix> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularDesign("X'X rank-deficient beyond ridge tolerance");
    }
    return ldlt.solve(Syx.transpose()).transpose();  // k x p
}

}  // namespace

Matrix FullRankModel::predict(const Matrix& X) const {
    if (X.cols() != coef.cols()) {
        throw DimensionMismatch("predict: X width does not match model");
    }
    return (X * coef.transpose()).rowwise() + intercept.transpose();
}

FullRankModel fit_ols(const Matrix& X, const Matrix& Y) {
    check_design(X, Y);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int k = static_cast<int>(Y.cols());
    const double dn = static_cast<double>(n);

    const Matrix Sxx = (X.transpose() * X) / dn;
    const Matrix Syx = (Y.transpose() * X) / dn;

    FullRankModel model;
    model.coef = solve_normal_equations(Sxx, Syx);
    model.intercept = Vector::Zero(k);
    const Matrix resid = Y - X * model.coef.transpose();
    model.residual_cov = (resid.transpose() * resid) / static_cast<double>(n - p);
    model.residual_cov = 0.5 * (model.residual_cov + model.residual_cov.transpose());
    return model;
}

RRRModel fit_rrr(const Matrix& X, const Matrix& Y, int rank, GammaMode gamma_mode) {
    check_design(X, Y);
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    const int k = static_cast<int>(Y.cols());
    if (rank < 1 || rank > std::min(k, p)) {
        throw RankTooLarge("rank must lie in [1, min(k, p)]");
    }
    const double dn = static_cast<double>(n);

    const Matrix Sxx = (X.transpose() * X) / dn;
    const Matrix Syx = (Y.transpose() * X) / dn;
    const Matrix ols_coef = solve_normal_equations(Sxx, Syx);  // Sigma_yx Sigma_xx^{-1}

    Matrix gamma;
    if (gamma_mode == GammaMode::identity) {
        gamma = Matrix::Identity(k, k);
    } else {
        const Matrix resid = Y - X * ols_coef.transpose();
        Matrix residual_cov = (resid.transpose() * resid) / static_cast<double>(n - p);
        gamma = sym_inverse(residual_cov);
    }
    const Matrix gamma_half = sym_power(gamma, 0.5);
    const Matrix gamma_inv_half = sym_power(gamma, -0.5);

    Matrix target = gamma_half * Syx * ols_coef.transpose() * gamma_half;
    target = 0.5 * (target + target.transpose());

    Eigen::SelfAdjointEigenSolver<Matrix> es(target);
    if (es.info() != Eigen::Success) {
        throw SingularCovariance("eigendecomposition of the weighted target failed");
    }

    // SelfAdjointEigenSolver sorts ascending; take the trailing r, descending.
    Matrix V(k, rank);
    Vector lambdas(rank);
    for (int j = 0; j < rank; ++j) {
        const int src = k - 1 - j;
        V.col(j) = es.eigenvectors().col(src);
        lambdas(j) = std::max(es.eigenvalues()(src), 0.0);
    }
    orient_eigenvector_columns(V);

    RRRModel model;
    model.A_hat = gamma_inv_half * V;
    model.B_hat = V.transpose() * gamma_half * ols_coef;
    model.rank = rank;
    model.gamma = gamma;
    model.gamma_mode = gamma_mode;
    model.eigenvalues = lambdas;
    return model;
}

Matrix predict_latent(const RRRModel& model, const Matrix& X) {
    if (X.cols() != model.B_hat.cols()) {
        throw DimensionMismatch("predict_latent: X width does not match model");
    }
    return X * model.B_hat.transpose();
}

Matrix predict_outcomes(const RRRModel& model, const Matrix& X) {
    return predict_latent(model, X) * model.A_hat.transpose();
}

int select_rank(const Matrix& X, const Matrix& Y, const std::vector<int>& candidate_ranks,
                GammaMode gamma_mode) {
    check_design(X, Y);
    if (candidate_ranks.empty()) {
        throw InvalidRank("empty candidate rank list");
    }
    const int n = static_cast<int>(X.rows());
    const int max_rank = static_cast<int>(std::min(X.cols(), Y.cols()));
    for (int r : candidate_ranks) {
        if (r < 1 || r > max_rank) {
            throw InvalidRank("candidate rank outside [1, min(k, p)]");
        }
    }

    const int folds = 5;
    std::vector<int> ranks = candidate_ranks;
    std::sort(ranks.begin(), ranks.end());

    std::vector<double> cv_error(ranks.size(), 0.0);
    for (int fold = 0; fold < folds; ++fold) {
        std::vector<int> train_idx, test_idx;
        for (int i = 0; i < n; ++i) {
            (i % folds == fold ? test_idx : train_idx).push_back(i);
        }
        if (train_idx.size() <= static_cast<std::size_t>(X.cols()) || test_idx.empty()) {
            throw SingularDesign("too few rows per fold for rank selection");
        }
        Matrix Xtr(train_idx.size(), X.cols()), Ytr(train_idx.size(), Y.cols());
        Matrix Xte(test_idx.size(), X.cols()), Yte(test_idx.size(), Y.cols());
        for (std::size_t i = 0; i < train_idx.size(); ++i) {
            Xtr.row(i) = X.row(train_idx[i]);
            Ytr.row(i) = Y.row(train_idx[i]);
        }
        for (std::size_t i = 0; i < test_idx.size(); ++i) {
            Xte.row(i) = X.row(test_idx[i]);
            Yte.row(i) = Y.row(test_idx[i]);
        }
        for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
            const RRRModel model = fit_rrr(Xtr, Ytr, ranks[ri], gamma_mode);
            const Matrix err = Yte - predict_outcomes(model, Xte);
            cv_error[ri] += err.squaredNorm() / static_cast<double>(err.size());
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (double e : cv_error) best = std::min(best, e);
    for (std::size_t ri = 0; ri < ranks.size(); ++ri) {
        if (cv_error[ri] <= best * (1.0 + 1e-9) + 1e-12) {
            return ranks[ri];  // ranks ascending, so first hit is the smallest
        }
    }
    return ranks.front();
}

}  // namespace rrpolicy
