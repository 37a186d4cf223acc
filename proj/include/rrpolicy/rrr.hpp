#pragma once

#include <vector>

#include "rrpolicy/types.hpp"

namespace rrpolicy {

// Multivariate OLS of Y on X without intercept (the pipeline standardizes
// first; synthetic draws are correctly specified without one).
struct FullRankModel {
    Matrix coef;          // k x p
    Vector intercept;     // k, zero from fit_ols; carried for model export
    Matrix residual_cov;  // k x k, E'E / (n - p)

    Matrix predict(const Matrix& X) const;
};

enum class GammaMode { residual_precision, identity };

// Rank-constrained coefficient factorization coef = A_hat * B_hat obtained
// from the weighted eigendecomposition of the cross-covariance structure.
struct RRRModel {
    Matrix A_hat;        // k x r
    Matrix B_hat;        // r x p
    int rank = 0;
    Matrix gamma;        // k x k weighting used for the fit
    GammaMode gamma_mode = GammaMode::residual_precision;
    Vector eigenvalues;  // r largest, descending

    Matrix coef() const { return A_hat * B_hat; }
};

FullRankModel fit_ols(const Matrix& X, const Matrix& Y);

// Weighted reduced-rank fit: Sigma_yx = Y'X/n, Sigma_xx = X'X/n,
// V_1..V_r the leading eigenvectors of the symmetrized
// Gamma^{1/2} Sigma_yx Sigma_xx^{-1} Sigma_xy Gamma^{1/2},
// A_hat = Gamma^{-1/2} V, B_hat = V' Gamma^{1/2} Sigma_yx Sigma_xx^{-1}.
RRRModel fit_rrr(const Matrix& X, const Matrix& Y, int rank,
                 GammaMode gamma_mode = GammaMode::residual_precision);

// X * B_hat' (m x r)
Matrix predict_latent(const RRRModel& model, const Matrix& X);
// X * (A_hat B_hat)' (m x k); equals predict_latent * A_hat' exactly
Matrix predict_outcomes(const RRRModel& model, const Matrix& X);

// 5-fold cross-validated rank choice (interleaved folds, deterministic);
// ties within a 1e-9 relative band resolve to the smaller rank.
int select_rank(const Matrix& X, const Matrix& Y, const std::vector<int>& candidate_ranks,
                GammaMode gamma_mode = GammaMode::residual_precision);

}  // namespace rrpolicy
