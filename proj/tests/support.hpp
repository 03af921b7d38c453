#pragma once

// Test-only reference implementations. Everything here is written directly from
// textbook formulas on dense matrices and deliberately shares no code paths with
// the library beyond the data containers.

#include "panelegls/estimators.hpp"
#include "panelegls/panel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using panelegls::DesignMatrix;
using panelegls::Observation;
using panelegls::Year;

inline double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

struct SyntheticPanel {
    int entities = 3;
    int periods = 4;
    int slopes = 2;
    bool intercept = true;
    /// (entity index, period index) cells to drop from the sample.
    std::vector<std::pair<int, int>> holes;
    /// AR(1) coefficient of the disturbances inside each entity.
    double rho = 0.0;
    /// Standard deviation of the entity effect.
    double effect_sd = 0.0;
    double noise_sd = 1.0;
};

inline std::string entity_code(int i) {
    return std::string(1, static_cast<char>('A' + i / 26)) + static_cast<char>('A' + i % 26);
}

/// Random design with y = X beta + u_i + e_it; beta = (1, 0.5, -0.25, ...).
inline DesignMatrix synthetic(std::mt19937_64& rng, const SyntheticPanel& p) {
    std::normal_distribution<double> z(0.0, 1.0);
    const int k = p.slopes + (p.intercept ? 1 : 0);
    std::vector<double> ys, xs;
    std::vector<Observation> obs;
    for (int i = 0; i < p.entities; ++i) {
        const double effect = p.effect_sd * z(rng);
        double e = 0;
        for (int t = 0; t < p.periods; ++t) {
            e = p.rho * e + p.noise_sd * z(rng);
            std::vector<double> row;
            if (p.intercept) row.push_back(1.0);
            for (int j = 0; j < p.slopes; ++j) row.push_back(z(rng) + 0.3 * i);
            double y = effect + e;
            for (int j = 0; j < k; ++j) y += row[static_cast<std::size_t>(j)] * (j == 0 ? 1.0 : 0.5 / j);
            bool hole = false;
            for (const auto& h : p.holes) hole = hole || (h.first == i && h.second == t);
            if (hole) continue;
            ys.push_back(y);
            xs.insert(xs.end(), row.begin(), row.end());
            obs.push_back({entity_code(i), 2000 + t});
        }
    }
    const auto n = static_cast<Eigen::Index>(ys.size());
    VectorXd y = Eigen::Map<VectorXd>(ys.data(), n);
    MatrixXd x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(xs.data(), n, k);
    std::vector<std::string> names;
    if (p.intercept) names.emplace_back("C");
    for (int j = 0; j < p.slopes; ++j) names.push_back("x" + std::to_string(j + 1));
    return DesignMatrix::create("y", names, p.intercept, y, x, obs);
}

/// Row ranges of each entity in stacked order.
inline std::vector<std::pair<Eigen::Index, Eigen::Index>> entity_ranges(const std::vector<Observation>& obs) {
    std::vector<std::pair<Eigen::Index, Eigen::Index>> out;
    Eigen::Index start = 0;
    for (std::size_t i = 1; i <= obs.size(); ++i) {
        if (i == obs.size() || obs[i].entity != obs[static_cast<std::size_t>(start)].entity) {
            out.emplace_back(start, static_cast<Eigen::Index>(i) - start);
            start = static_cast<Eigen::Index>(i);
        }
    }
    return out;
}

/// Full n x n block-diagonal matrix with f(omega[J, J]) for each entity's years J.
inline MatrixXd block_diagonal(const MatrixXd& omega, const std::vector<Year>& periods,
                               const std::vector<Observation>& obs,
                               const std::function<MatrixXd(const MatrixXd&)>& f) {
    const auto n = static_cast<Eigen::Index>(obs.size());
    MatrixXd out = MatrixXd::Zero(n, n);
    for (const auto& [begin, size] : entity_ranges(obs)) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index r = begin; r < begin + size; ++r) {
            const auto year = obs[static_cast<std::size_t>(r)].year;
            for (std::size_t s = 0; s < periods.size(); ++s)
                if (periods[s] == year) idx.push_back(static_cast<Eigen::Index>(s));
        }
        MatrixXd sub(size, size);
        for (Eigen::Index a = 0; a < size; ++a)
            for (Eigen::Index b = 0; b < size; ++b) sub(a, b) = omega(idx[a], idx[b]);
        out.block(begin, begin, size, size) = f(sub);
    }
    return out;
}

/// Omega[s,t] as the average of e_i(s) e_i(t) over entities observing both years.
inline MatrixXd pairwise_omega(const VectorXd& e, const std::vector<Observation>& obs, const std::vector<Year>& periods) {
    const auto t = static_cast<Eigen::Index>(periods.size());
    MatrixXd sums = MatrixXd::Zero(t, t), counts = MatrixXd::Zero(t, t);
    auto pos = [&](Year y) {
        for (std::size_t s = 0; s < periods.size(); ++s)
            if (periods[s] == y) return static_cast<Eigen::Index>(s);
        return Eigen::Index{-1};
    };
    for (const auto& [begin, size] : entity_ranges(obs))
        for (Eigen::Index a = begin; a < begin + size; ++a)
            for (Eigen::Index b = begin; b < begin + size; ++b) {
                const auto sa = pos(obs[static_cast<std::size_t>(a)].year);
                const auto sb = pos(obs[static_cast<std::size_t>(b)].year);
                sums(sa, sb) += e(a) * e(b);
                counts(sa, sb) += 1;
            }
    return sums.cwiseQuotient(counts);
}

inline VectorXd ols_coefficients(const MatrixXd& x, const VectorXd& y) {
    return x.colPivHouseholderQr().solve(y);
}

/// b = (X'WX)^{-1} X'Wy with W = block-diag(Omega[J,J]^{-1}).
inline VectorXd brute_force_gls(const DesignMatrix& dm, const MatrixXd& omega, const std::vector<Year>& periods) {
    const MatrixXd w = block_diagonal(omega, periods, dm.obs(), [](const MatrixXd& m) { return MatrixXd(m.inverse()); });
    const MatrixXd xtwx = dm.x().transpose() * w * dm.x();
    return xtwx.fullPivLu().solve(dm.x().transpose() * w * dm.y());
}

struct Lsdv {
    VectorXd slopes;
    MatrixXd covariance;
    double ssr = 0;
};

/// Fixed effects by explicit entity dummies (intercept column, if any, replaced by the dummies).
inline Lsdv lsdv(const DesignMatrix& dm) {
    const auto ranges = entity_ranges(dm.obs());
    const Eigen::Index first = dm.has_intercept() ? 1 : 0;
    const Eigen::Index slopes = static_cast<Eigen::Index>(dm.k()) - first;
    const auto n = static_cast<Eigen::Index>(dm.n());
    const auto ne = static_cast<Eigen::Index>(ranges.size());
    MatrixXd z = MatrixXd::Zero(n, slopes + ne);
    z.leftCols(slopes) = dm.x().rightCols(slopes);
    for (Eigen::Index j = 0; j < ne; ++j) z.col(slopes + j).segment(ranges[static_cast<std::size_t>(j)].first, ranges[static_cast<std::size_t>(j)].second).setOnes();
    const VectorXd coef = ols_coefficients(z, dm.y());
    const VectorXd e = dm.y() - z * coef;
    Lsdv out;
    out.ssr = e.squaredNorm();
    const MatrixXd inv = (z.transpose() * z).inverse();
    out.covariance = (out.ssr / static_cast<double>(n - slopes - ne) * inv).topLeftCorner(slopes, slopes);
    out.slopes = coef.head(slopes);
    return out;
}

/// Exact random-effects GLS with Omega_i = s2e I + s2u J.
inline VectorXd exact_re_gls(const DesignMatrix& dm, double s2e, double s2u) {
    const auto n = static_cast<Eigen::Index>(dm.n());
    MatrixXd omega = MatrixXd::Zero(n, n);
    for (const auto& [begin, size] : entity_ranges(dm.obs()))
        omega.block(begin, begin, size, size) = s2e * MatrixXd::Identity(size, size) + s2u * MatrixXd::Ones(size, size);
    const MatrixXd inv = omega.inverse();
    return (dm.x().transpose() * inv * dm.x()).fullPivLu().solve(dm.x().transpose() * inv * dm.y());
}

/// Symmetric inverse square root via eigenpairs.
inline MatrixXd sym_inverse_sqrt(const MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
    return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13, int depth = 0) {
    static const double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073, 0.741531185599394440,
                                 0.586087235467691130, 0.405845151377397167, 0.207784955007898468, 0.0};
    static const double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184, 0.140653259715525919,
                                 0.169004726639267903, 0.190350578064785410, 0.204432940075298892, 0.209482141084727828};
    static const double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945, 0.417959183673469388};
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double kronrod = wk[7] * f(c), gauss = wg[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const double s = f(c - h * xk[i]) + f(c + h * xk[i]);
        kronrod += wk[i] * s;
        if (i % 2 == 1) gauss += wg[i / 2] * s;
    }
    kronrod *= h;
    gauss *= h;
    if (depth >= 30 || std::fabs(kronrod - gauss) <= tol)
        return kronrod;
    return integrate(f, a, c, tol, depth + 1) + integrate(f, c, b, tol, depth + 1);
}

/// Two-sample Kolmogorov-Smirnov distance of a sample against U(0, 1).
inline double ks_uniform(std::vector<double> p) {
    std::sort(p.begin(), p.end());
    const auto n = static_cast<double>(p.size());
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        d = std::max(d, static_cast<double>(i + 1) / n - p[i]);
        d = std::max(d, p[i] - static_cast<double>(i) / n);
    }
    return d;
}

}  // namespace testing
