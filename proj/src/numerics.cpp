#include "panelegls/numerics.hpp"

#include "panelegls/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace panelegls {

namespace {

// Cholesky pivots at or below this fraction of the largest diagonal entry are rejected.
constexpr double kPivotTolerance = 1e-14;

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols())
        throw InputError("symmetric matrix must be square, got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
    if (!m.allFinite()) throw InputError("symmetric matrix has non-finite entries");
    m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index order) {
    return SymMatrix(Eigen::MatrixXd::Identity(order, order));
}

Eigen::MatrixXd spd_solve(const SymMatrix& a, const Eigen::MatrixXd& b) {
    const Eigen::Index n = a.order();
    if (b.rows() != n) throw InputError("spd_solve: right-hand side has wrong row count");
    if (n == 0) return b;

    const double scale = a.matrix().diagonal().cwiseAbs().maxCoeff();
    const double tol = kPivotTolerance * (scale > 0 ? scale : 1.0);

    // Lower-triangular factor L with A = L L'.
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > tol))
            throw EstimationError("matrix is not positive definite: pivot " + std::to_string(j) + " is " +
                                  std::to_string(pivot));
        const double d = std::sqrt(pivot);
        l(j, j) = d;
        for (Eigen::Index i = j + 1; i < n; ++i)
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / d;
    }
    Eigen::MatrixXd x = l.triangularView<Eigen::Lower>().solve(b);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

SymMatrix inverse_sqrt(const SymMatrix& a) {
    if (a.order() == 0) throw InputError("inverse_sqrt of an empty matrix");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a.matrix());
    if (eig.info() != Eigen::Success) throw EstimationError("eigendecomposition failed");
    const auto& lambda = eig.eigenvalues();
    const double lmax = lambda.maxCoeff();
    const double lmin = lambda.minCoeff();
    if (!(lmax > 0) || lmin <= kEigenFloor * lmax)
        throw EstimationError("matrix is singular or indefinite: eigenvalues span [" + std::to_string(lmin) + ", " +
                              std::to_string(lmax) + "]");
    const auto& v = eig.eigenvectors();
    return SymMatrix(v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
}

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw InputError("pearson: inputs differ in length");
    if (x.size() < 2) throw InputError("pearson: need at least two observations");
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0 || syy <= 0) throw InputError("pearson: zero variance input");
    const double r = sxy / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

}  // namespace panelegls
