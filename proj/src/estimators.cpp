#include "panelegls/estimators.hpp"

#include "panelegls/error.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

namespace panelegls {

namespace {

// Columns whose distance to the span of the preceding (unit-scaled) columns falls
// below this are treated as collinear.
constexpr double kRankTolerance = 1e-10;

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct LeastSquares {
    VectorXd b;
    MatrixXd xtx_inv;
    VectorXd residuals;
    double ssr = 0;
};

void check_rank(const MatrixXd& x, const std::vector<std::string>& names) {
    const VectorXd norms = x.colwise().norm();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (!(norms(j) > 0)) throw EstimationError("regressor '" + names[j] + "' is identically zero");
    const MatrixXd scaled = x * norms.cwiseInverse().asDiagonal();
    Eigen::HouseholderQR<MatrixXd> qr(scaled);
    const auto& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        if (std::fabs(r(j, j)) <= kRankTolerance)
            throw EstimationError("rank deficient design: regressor '" + names[j] +
                                  "' is collinear with the preceding regressors");
}

LeastSquares least_squares(const MatrixXd& x, const VectorXd& y, const std::vector<std::string>& names) {
    check_rank(x, names);
    LeastSquares out;
    const SymMatrix xtx(x.transpose() * x);
    out.xtx_inv = spd_solve(xtx, MatrixXd::Identity(x.cols(), x.cols()));
    out.b = spd_solve(xtx, x.transpose() * y);
    out.residuals = y - x * out.b;
    out.ssr = out.residuals.squaredNorm();
    return out;
}

FitStats fit_stats(const VectorXd& y, const VectorXd& e, std::size_t k_eff, std::size_t df, bool has_constant) {
    FitStats s;
    const auto n = static_cast<double>(y.size());
    s.ssr = e.squaredNorm();
    s.mean_dep = y.mean();
    const double tss = (y.array() - s.mean_dep).square().sum();
    s.sd_dep = y.size() > 1 ? std::sqrt(tss / (n - 1)) : 0.0;
    s.r_squared = tss > 0 ? 1.0 - s.ssr / tss : 0.0;
    const auto dfd = static_cast<double>(df);
    s.adj_r_squared = 1.0 - (1.0 - s.r_squared) * (n - 1) / dfd;
    s.se_regression = std::sqrt(s.ssr / dfd);
    if (has_constant && k_eff > 1) {
        const auto df1 = static_cast<double>(k_eff - 1);
        if (s.r_squared >= 1.0) {
            s.f_statistic = std::numeric_limits<double>::infinity();
            s.prob_f = 0.0;
        } else {
            s.f_statistic = (s.r_squared / df1) / ((1.0 - s.r_squared) / dfd);
            s.prob_f = f_sf(std::max(*s.f_statistic, 0.0), df1, dfd);
        }
    }
    s.durbin_watson = s.ssr > 0 ? durbin_watson({e.data(), static_cast<std::size_t>(e.size())}) : 0.0;
    return s;
}

double gaussian_log_likelihood(double ssr, std::size_t n) {
    const auto nd = static_cast<double>(n);
    return -0.5 * nd * (1.0 + std::log(2.0 * std::numbers::pi) + std::log(ssr / nd));
}

void fill_inference(EstimationResult& r) {
    const auto k = r.coefficients.size();
    r.std_errors.resize(k);
    r.t_stats.resize(k);
    r.p_values.resize(k);
    const auto df = static_cast<double>(r.df_resid);
    for (Eigen::Index i = 0; i < k; ++i) {
        const double var = r.covariance(i, i);
        r.std_errors(i) = var > 0 ? std::sqrt(var) : 0.0;
        if (r.std_errors(i) > 0) {
            r.t_stats(i) = r.coefficients(i) / r.std_errors(i);
            r.p_values(i) = std::min(1.0, 2.0 * t_sf(std::fabs(r.t_stats(i)), df));
        } else {
            r.t_stats(i) = std::numeric_limits<double>::quiet_NaN();
            r.p_values(i) = std::numeric_limits<double>::quiet_NaN();
            r.warnings.push_back("non-positive variance for coefficient '" + r.names[i] + "'");
        }
    }
}

EstimationResult skeleton(const DesignMatrix& dm, Method method) {
    EstimationResult r;
    r.method = method;
    r.dependent = dm.dependent();
    r.obs = dm.obs();
    r.n_obs = dm.n();
    r.n_entities = dm.entity_count();
    r.n_periods = dm.periods().size();
    r.balanced = dm.balanced();
    return r;
}

struct WithinData {
    VectorXd y;
    MatrixXd x;
    std::vector<std::string> names;
};

// Subtracts entity means from y and every non-intercept column.
WithinData within_transform(const DesignMatrix& dm) {
    const std::size_t first = dm.has_intercept() ? 1 : 0;
    WithinData w;
    w.y = dm.y();
    w.x = dm.x().rightCols(static_cast<Eigen::Index>(dm.k() - first));
    w.names.assign(dm.column_names().begin() + static_cast<std::ptrdiff_t>(first), dm.column_names().end());
    for (const auto& b : dm.blocks()) {
        const auto begin = static_cast<Eigen::Index>(b.begin);
        const auto size = static_cast<Eigen::Index>(b.size);
        w.y.segment(begin, size).array() -= w.y.segment(begin, size).mean();
        for (Eigen::Index j = 0; j < w.x.cols(); ++j)
            w.x.col(j).segment(begin, size).array() -= w.x.col(j).segment(begin, size).mean();
    }
    return w;
}

std::unordered_map<Year, Eigen::Index> period_positions(const std::vector<Year>& periods) {
    std::unordered_map<Year, Eigen::Index> pos;
    for (std::size_t i = 0; i < periods.size(); ++i) pos[periods[i]] = static_cast<Eigen::Index>(i);
    return pos;
}

std::vector<Eigen::Index> block_positions(const DesignMatrix& dm, const EntityBlock& b,
                                          const std::unordered_map<Year, Eigen::Index>& pos) {
    std::vector<Eigen::Index> idx;
    idx.reserve(b.size);
    for (std::size_t r = b.begin; r < b.begin + b.size; ++r) {
        auto it = pos.find(dm.obs()[r].year);
        if (it == pos.end())
            throw EstimationError("period covariance has no row for year " + std::to_string(dm.obs()[r].year));
        idx.push_back(it->second);
    }
    return idx;
}

}  // namespace

std::string_view method_name(Method m) {
    switch (m) {
        case Method::pooled_ols: return "Panel Least Squares";
        case Method::fixed_effects: return "Panel Least Squares (cross-section fixed effects)";
        case Method::random_effects: return "Panel EGLS (Cross-section random effects)";
        case Method::egls_period_sur: return "Panel EGLS (Period SUR)";
    }
    return "unknown";
}

std::string_view covariance_description(CovarianceKind c) {
    switch (c) {
        case CovarianceKind::ordinary: return "Ordinary standard errors & covariance";
        case CovarianceKind::pcse_period_sur: return "Period SUR (PCSE) standard errors & covariance (d.f. corrected)";
    }
    return "unknown";
}

std::size_t EstimationResult::index_of(std::string_view name) const {
    auto it = std::find(names.begin(), names.end(), name);
    return static_cast<std::size_t>(it - names.begin());
}

double durbin_watson(std::span<const double> residuals) {
    if (residuals.size() < 2) throw InputError("Durbin-Watson needs at least two residuals");
    double num = 0, den = residuals[0] * residuals[0];
    for (std::size_t t = 1; t < residuals.size(); ++t) {
        const double d = residuals[t] - residuals[t - 1];
        num += d * d;
        den += residuals[t] * residuals[t];
    }
    if (!(den > 0)) throw EstimationError("Durbin-Watson undefined for all-zero residuals");
    return num / den;
}

EstimationResult ols(const DesignMatrix& dm) {
    auto fit = least_squares(dm.x(), dm.y(), dm.column_names());
    EstimationResult r = skeleton(dm, Method::pooled_ols);
    r.names = dm.column_names();
    r.k_params = dm.k();
    r.df_resid = dm.n() - dm.k();
    r.coefficients = fit.b;
    r.covariance = SymMatrix(fit.ssr / static_cast<double>(r.df_resid) * fit.xtx_inv);
    r.residuals_weighted = fit.residuals;
    r.residuals_unweighted = fit.residuals;
    r.unweighted = fit_stats(dm.y(), fit.residuals, dm.k(), r.df_resid, dm.has_intercept());
    r.weighted = r.unweighted;
    r.log_likelihood = gaussian_log_likelihood(fit.ssr, dm.n());
    fill_inference(r);
    return r;
}

EstimationResult fixed_effects(const DesignMatrix& dm) {
    auto w = within_transform(dm);
    if (w.x.cols() == 0) throw EstimationError("fixed effects need at least one slope regressor");
    const std::size_t first = dm.has_intercept() ? 1 : 0;
    for (Eigen::Index j = 0; j < w.x.cols(); ++j) {
        const double scale = std::max(1.0, dm.x().col(j + static_cast<Eigen::Index>(first)).norm());
        if (w.x.col(j).norm() <= kRankTolerance * scale)
            throw EstimationError("regressor '" + w.names[j] + "' has no within-entity variation");
    }
    const std::size_t n = dm.n(), entities = dm.entity_count(), slopes = w.names.size();
    if (n <= entities + slopes)
        throw EstimationError("fixed effects leave no residual degrees of freedom");

    auto fit = least_squares(w.x, w.y, w.names);
    EstimationResult r = skeleton(dm, Method::fixed_effects);
    r.names = w.names;
    r.k_params = slopes;
    r.df_resid = n - entities - slopes;
    r.coefficients = fit.b;
    r.covariance = SymMatrix(fit.ssr / static_cast<double>(r.df_resid) * fit.xtx_inv);
    r.residuals_weighted = fit.residuals;
    r.residuals_unweighted = fit.residuals;
    r.unweighted = fit_stats(dm.y(), fit.residuals, entities + slopes, r.df_resid, true);
    r.weighted = r.unweighted;
    r.log_likelihood = gaussian_log_likelihood(fit.ssr, n);
    if (entities == 1) r.warnings.push_back("fixed effects estimated on a single entity");
    fill_inference(r);
    return r;
}

VarianceComponents swamy_arora_components(const DesignMatrix& dm) {
    if (!dm.has_intercept()) throw EstimationError("random effects require a model with an intercept");
    const std::size_t n = dm.n(), entities = dm.entity_count(), k = dm.k();
    if (entities <= k)
        throw EstimationError("variance components not estimable: " + std::to_string(entities) +
                              " entities for " + std::to_string(k) + " between-regression parameters");
    if (n <= entities + (k - 1)) throw EstimationError("variance components not estimable: no within d.f.");

    auto w = within_transform(dm);
    double ssr_within = w.y.squaredNorm();
    if (w.x.cols() > 0) ssr_within = least_squares(w.x, w.y, w.names).ssr;

    MatrixXd xb(static_cast<Eigen::Index>(entities), static_cast<Eigen::Index>(k));
    VectorXd yb(static_cast<Eigen::Index>(entities));
    double inv_t_sum = 0;
    for (std::size_t i = 0; i < entities; ++i) {
        const auto& b = dm.blocks()[i];
        const auto begin = static_cast<Eigen::Index>(b.begin), size = static_cast<Eigen::Index>(b.size);
        yb(static_cast<Eigen::Index>(i)) = dm.y().segment(begin, size).mean();
        xb.row(static_cast<Eigen::Index>(i)) = dm.x().middleRows(begin, size).colwise().mean();
        inv_t_sum += 1.0 / static_cast<double>(b.size);
    }
    const double ssr_between = least_squares(xb, yb, dm.column_names()).ssr;

    VarianceComponents c;
    c.sigma2_e = ssr_within / static_cast<double>(n - entities - (k - 1));
    const double t_bar = static_cast<double>(entities) / inv_t_sum;
    c.sigma2_u = std::max(0.0, ssr_between / static_cast<double>(entities - k) - c.sigma2_e / t_bar);
    return c;
}

EstimationResult random_effects(const DesignMatrix& dm, const VarianceComponents& components) {
    if (!dm.has_intercept()) throw EstimationError("random effects require a model with an intercept");
    if (components.sigma2_e < 0 || components.sigma2_u < 0)
        throw InputError("variance components must be non-negative");

    VectorXd ys = dm.y();
    MatrixXd xs = dm.x();
    for (const auto& b : dm.blocks()) {
        const double total = static_cast<double>(b.size) * components.sigma2_u + components.sigma2_e;
        const double theta = total > 0 ? 1.0 - std::sqrt(components.sigma2_e / total) : 0.0;
        const auto begin = static_cast<Eigen::Index>(b.begin), size = static_cast<Eigen::Index>(b.size);
        ys.segment(begin, size).array() -= theta * dm.y().segment(begin, size).mean();
        const Eigen::RowVectorXd means = dm.x().middleRows(begin, size).colwise().mean();
        xs.middleRows(begin, size).rowwise() -= theta * means;
    }
    auto fit = least_squares(xs, ys, dm.column_names());

    EstimationResult r = skeleton(dm, Method::random_effects);
    r.names = dm.column_names();
    r.k_params = dm.k();
    r.df_resid = dm.n() - dm.k();
    r.coefficients = fit.b;
    r.covariance = SymMatrix(fit.ssr / static_cast<double>(r.df_resid) * fit.xtx_inv);
    r.residuals_weighted = fit.residuals;
    r.residuals_unweighted = dm.y() - dm.x() * fit.b;
    r.weighted = fit_stats(ys, fit.residuals, dm.k(), r.df_resid, true);
    r.unweighted = fit_stats(dm.y(), r.residuals_unweighted, dm.k(), r.df_resid, true);
    r.log_likelihood = gaussian_log_likelihood(r.unweighted.ssr, dm.n());
    r.components = components;
    if (components.sigma2_u == 0) r.warnings.push_back("entity variance component is zero; random effects equal pooled OLS");
    fill_inference(r);
    return r;
}

EstimationResult random_effects(const DesignMatrix& dm) {
    return random_effects(dm, swamy_arora_components(dm));
}

PeriodCovariance estimate_period_omega(std::span<const double> residuals, std::span<const Observation> obs) {
    if (residuals.size() != obs.size()) throw InputError("residual and observation counts differ");
    if (residuals.empty()) throw InputError("no residuals to estimate a period covariance from");

    std::vector<Year> periods;
    for (const auto& o : obs) periods.push_back(o.year);
    std::sort(periods.begin(), periods.end());
    periods.erase(std::unique(periods.begin(), periods.end()), periods.end());
    const auto pos = period_positions(periods);
    const auto t = static_cast<Eigen::Index>(periods.size());

    // entity -> (period position, residual)
    std::map<std::string, std::vector<std::pair<Eigen::Index, double>>> by_entity;
    for (std::size_t i = 0; i < obs.size(); ++i) by_entity[obs[i].entity].emplace_back(pos.at(obs[i].year), residuals[i]);

    MatrixXd sums = MatrixXd::Zero(t, t);
    Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(t, t);
    for (const auto& [entity, cells] : by_entity) {
        for (const auto& [s, es] : cells)
            for (const auto& [u, eu] : cells) {
                sums(s, u) += es * eu;
                ++counts(s, u);
            }
    }
    for (Eigen::Index s = 0; s < t; ++s)
        for (Eigen::Index u = 0; u < t; ++u)
            if (counts(s, u) == 0)
                throw EstimationError("no entity observes both " + std::to_string(periods[s]) + " and " +
                                      std::to_string(periods[u]) + "; sample too fragmented for Period SUR");

    PeriodCovariance pc;
    pc.omega = SymMatrix(sums.cwiseQuotient(counts.cast<double>()));
    pc.periods = std::move(periods);
    pc.pair_counts = std::move(counts);
    return pc;
}

WeightedData period_sur_transform(const DesignMatrix& dm, const PeriodCovariance& omega) {
    const auto pos = period_positions(omega.periods);
    std::map<std::vector<Eigen::Index>, MatrixXd> roots;
    WeightedData w{VectorXd(dm.n()), MatrixXd(dm.n(), dm.k())};
    for (const auto& b : dm.blocks()) {
        const auto idx = block_positions(dm, b, pos);
        auto it = roots.find(idx);
        if (it == roots.end()) {
            const MatrixXd sub = omega.omega.matrix()(idx, idx);
            it = roots.emplace(idx, inverse_sqrt(SymMatrix(sub)).matrix()).first;
        }
        const auto begin = static_cast<Eigen::Index>(b.begin), size = static_cast<Eigen::Index>(b.size);
        w.y.segment(begin, size) = it->second * dm.y().segment(begin, size);
        w.x.middleRows(begin, size) = it->second * dm.x().middleRows(begin, size);
    }
    return w;
}

double pcse_dof_correction(std::size_t n, std::size_t k) {
    return static_cast<double>(n) / static_cast<double>(n - k);
}

SymMatrix pcse_covariance(const DesignMatrix& dm, const PeriodCovariance& omega, const VectorXd& b) {
    const auto w = period_sur_transform(dm, omega);
    const VectorXd e = w.y - w.x * b;
    const auto resid_omega = estimate_period_omega({e.data(), dm.n()}, dm.obs());
    const auto pos = period_positions(resid_omega.periods);

    const MatrixXd bread = spd_solve(SymMatrix(w.x.transpose() * w.x), MatrixXd::Identity(dm.k(), dm.k()));
    MatrixXd meat = MatrixXd::Zero(dm.k(), dm.k());
    for (const auto& blk : dm.blocks()) {
        const auto idx = block_positions(dm, blk, pos);
        const auto xi = w.x.middleRows(static_cast<Eigen::Index>(blk.begin), static_cast<Eigen::Index>(blk.size));
        meat += xi.transpose() * resid_omega.omega.matrix()(idx, idx) * xi;
    }
    return SymMatrix(bread * meat * bread * pcse_dof_correction(dm.n(), dm.k()));
}

EstimationResult egls_with_omega(const DesignMatrix& dm, const PeriodCovariance& omega, CovarianceKind covariance) {
    const auto w = period_sur_transform(dm, omega);
    auto fit = least_squares(w.x, w.y, dm.column_names());

    EstimationResult r = skeleton(dm, Method::egls_period_sur);
    r.covariance_kind = covariance;
    r.names = dm.column_names();
    r.k_params = dm.k();
    r.df_resid = dm.n() - dm.k();
    r.coefficients = fit.b;
    if (covariance == CovarianceKind::pcse_period_sur)
        r.covariance = pcse_covariance(dm, omega, fit.b);
    else
        r.covariance = SymMatrix(fit.ssr / static_cast<double>(r.df_resid) * fit.xtx_inv);
    r.residuals_weighted = fit.residuals;
    r.residuals_unweighted = dm.y() - dm.x() * fit.b;
    r.weighted = fit_stats(w.y, fit.residuals, dm.k(), r.df_resid, dm.has_intercept());
    r.unweighted = fit_stats(dm.y(), r.residuals_unweighted, dm.k(), r.df_resid, dm.has_intercept());
    r.log_likelihood = gaussian_log_likelihood(r.unweighted.ssr, dm.n());
    fill_inference(r);
    return r;
}

EstimationResult egls_period_sur(const DesignMatrix& dm, CovarianceKind covariance) {
    EstimationResult first;
    try {
        first = ols(dm);
    } catch (const Error& e) {
        throw EstimationError(std::string("EGLS first stage: ") + e.what());
    }
    PeriodCovariance omega;
    try {
        omega = estimate_period_omega({first.residuals_unweighted.data(), dm.n()}, dm.obs());
    } catch (const Error& e) {
        throw EstimationError(std::string("EGLS period covariance: ") + e.what());
    }
    try {
        return egls_with_omega(dm, omega, covariance);
    } catch (const Error& e) {
        throw EstimationError(std::string("EGLS weighting: ") + e.what());
    }
}

EstimationResult estimate(const DesignMatrix& dm, Weighting weighting, CovarianceKind covariance) {
    if (weighting == Weighting::period_sur) return egls_period_sur(dm, covariance);
    EstimationResult r = ols(dm);
    if (covariance == CovarianceKind::pcse_period_sur) {
        PeriodCovariance unit;
        unit.periods = dm.periods();
        unit.omega = SymMatrix::identity(static_cast<Eigen::Index>(unit.periods.size()));
        r.covariance = pcse_covariance(dm, unit, r.coefficients);
        r.covariance_kind = covariance;
        r.warnings.clear();
        fill_inference(r);
    }
    return r;
}

}  // namespace panelegls
