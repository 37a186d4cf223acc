#include "rrpolicy/linalg.hpp"

#include <cmath>

#include "rrpolicy/errors.hpp"

namespace rrpolicy {

double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

Matrix ridge_regularized(const Matrix& sym, double cond_limit) {
    Matrix s = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const Vector& ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    const double emin = ev.minCoeff();
    if (emin <= 0.0 || emax / emin > cond_limit) {
        const double eps = 1e-8 * s.trace() / static_cast<double>(s.rows());
        s += eps * Matrix::Identity(s.rows(), s.cols());
    }
    return s;
}

Matrix sym_inverse(const Matrix& sym) {
    Matrix s = ridge_regularized(sym);
    Eigen::LDLT<Matrix> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw SingularCovariance("symmetric matrix not invertible after ridge fallback");
    }
    return ldlt.solve(Matrix::Identity(s.rows(), s.cols()));
}

Matrix sym_power(const Matrix& sym, double power) {
    Matrix s = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    Vector ev = es.eigenvalues();
    for (int i = 0; i < ev.size(); ++i) {
        ev(i) = std::pow(std::max(ev(i), 1e-12), power);
    }
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

void orient_eigenvector_columns(Matrix& V) {
    for (int j = 0; j < V.cols(); ++j) {
        int imax = 0;
        double amax = -1.0;
        for (int i = 0; i < V.rows(); ++i) {
            const double a = std::abs(V(i, j));
            if (a > amax) {
                amax = a;
                imax = i;
            }
        }
        if (V(imax, j) < 0.0) V.col(j) = -V.col(j);
    }
}

Vector solve_least_squares(const Matrix& A, const Vector& b, bool* rank_deficient) {
    if (A.rows() != b.size()) {
        throw DimensionMismatch("least squares: row count mismatch");
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(A);
    if (qr.rank() == A.cols()) {
        if (rank_deficient != nullptr) *rank_deficient = false;
        return qr.solve(b);
    }
    if (rank_deficient != nullptr) *rank_deficient = true;
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    return svd.solve(b);
}

}  // namespace rrpolicy
