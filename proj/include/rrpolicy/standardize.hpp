#pragma once

#include <utility>

#include "rrpolicy/types.hpp"

namespace rrpolicy {

// Column means and sample (n-1) standard deviations for the inverse transform.
struct StandardizationParams {
    Vector x_mean;
    Vector x_sd;
    Vector y_mean;
    Vector y_sd;
};

// Centers and scales every X and Y column to mean 0 / unit sample variance.
// Throws ZeroVarianceColumn for a constant column (X columns first, index is
// within the offending block).
std::pair<Dataset, StandardizationParams> standardize(const Dataset& data);

Matrix apply_standardization(const Matrix& m, const Vector& mean, const Vector& sd);
Matrix invert_standardization(const Matrix& m, const Vector& mean, const Vector& sd);

}  // namespace rrpolicy
