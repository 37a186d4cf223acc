#include "rrpolicy/standardize.hpp"

#include <cmath>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

namespace {

void column_stats(const Matrix& m, Vector& mean, Vector& sd) {
    const int n = static_cast<int>(m.rows());
    mean = m.colwise().mean();
    sd.resize(m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        const double ss = (m.col(j).array() - mean(j)).square().sum();
        sd(j) = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
        if (!(sd(j) > 0.0)) {
            throw ZeroVarianceColumn(static_cast<int>(j));
        }
    }
}

}  // namespace

std::pair<Dataset, StandardizationParams> standardize(const Dataset& data) {
    data.validate();
    StandardizationParams params;
    column_stats(data.covariates, params.x_mean, params.x_sd);
    column_stats(data.outcomes, params.y_mean, params.y_sd);

    Dataset out = data;
    out.covariates = apply_standardization(data.covariates, params.x_mean, params.x_sd);
    out.outcomes = apply_standardization(data.outcomes, params.y_mean, params.y_sd);
    return {std::move(out), std::move(params)};
}

Matrix apply_standardization(const Matrix& m, const Vector& mean, const Vector& sd) {
    if (m.cols() != mean.size() || m.cols() != sd.size()) {
        throw DimensionMismatch("standardization params do not match matrix width");
    }
    return (m.rowwise() - mean.transpose()).array().rowwise() / sd.transpose().array();
}

Matrix invert_standardization(const Matrix& m, const Vector& mean, const Vector& sd) {
    if (m.cols() != mean.size() || m.cols() != sd.size()) {
        throw DimensionMismatch("standardization params do not match matrix width");
    }
    return (m.array().rowwise() * sd.transpose().array()).rowwise() + mean.transpose().array();
}

}  // namespace rrpolicy
