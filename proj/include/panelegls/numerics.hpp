#pragma once

#include <Eigen/Core>

#include <span>

namespace panelegls {

/// Dense symmetric matrix. Construction averages the input with its transpose.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Eigen::MatrixXd& m);

    static SymMatrix identity(Eigen::Index order);

    Eigen::Index order() const { return m_.rows(); }
    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

private:
    Eigen::MatrixXd m_;
};

/// Solves A X = B for symmetric positive definite A by Cholesky factorisation.
/// Throws EstimationError naming the first pivot that is not safely positive.
Eigen::MatrixXd spd_solve(const SymMatrix& a, const Eigen::MatrixXd& b);

/// Relative eigenvalue floor below which a matrix is treated as singular.
inline constexpr double kEigenFloor = 1e-12;

/// Symmetric S with S A S = I, from the eigendecomposition of A.
SymMatrix inverse_sqrt(const SymMatrix& a);

/// Sample Pearson correlation. Throws when either input has zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Distribution functions. All return probabilities in [0, 1].

/// Regularised upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// Regularised incomplete beta I_x(a, b).
double beta_inc(double a, double b, double x);

double normal_cdf(double x);
double chi2_sf(double x, double df);
double t_sf(double x, double df);
double f_sf(double x, double df1, double df2);

}  // namespace panelegls
