#pragma once

#include <Eigen/Dense>

namespace rrpolicy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Compensated (Kahan) accumulator; keeps estimator folds bit-reproducible
// and accurate at large n.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

double logistic(double z);

// Symmetric positive-(semi)definite solve helpers. When the condition number
// exceeds 1e12 a ridge of 1e-8 * trace/dim is added once; failure after that
// raises the supplied error type via throw_singular.
Matrix ridge_regularized(const Matrix& sym, double cond_limit = 1e12);

// Inverse through eigendecomposition with the ridge policy above.
Matrix sym_inverse(const Matrix& sym);

// Symmetric square root (power = 0.5) or inverse root (power = -0.5),
// eigenvalues clamped below 1e-12.
Matrix sym_power(const Matrix& sym, double power);

// Deterministic eigenvector orientation: the entry of largest magnitude
// (smallest index on ties) is made positive, column by column.
void orient_eigenvector_columns(Matrix& V);

// Least squares min ||A x - b||; QR when A has full column rank, SVD
// pseudoinverse (cutoff 1e-10 * sigma_max) otherwise. rank_deficient reports
// which path was taken.
Vector solve_least_squares(const Matrix& A, const Vector& b, bool* rank_deficient = nullptr);

}  // namespace rrpolicy
