#include "panelegls/diagnostics.hpp"

#include "panelegls/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace panelegls {

namespace {

void decide(TestResult& t, const std::string& if_retained, const std::string& if_rejected) {
    const auto p = t.primary.p_value.value_or(1.0);
    t.null_retained = p >= kSignificance;
    t.verdict = t.null_retained ? if_retained : if_rejected;
}

struct PairCorrelation {
    std::size_t overlap = 0;
    double rho = 0;
};

// Pearson correlations over the years each pair of entities shares.
std::vector<PairCorrelation> pairwise_correlations(std::span<const EntityResiduals> residuals,
                                                   std::vector<std::string>& warnings) {
    if (residuals.size() < 2) throw InputError("cross-section dependence tests need at least two entities");
    std::vector<PairCorrelation> out;
    for (std::size_t i = 0; i < residuals.size(); ++i) {
        for (std::size_t j = i + 1; j < residuals.size(); ++j) {
            const auto& a = residuals[i];
            const auto& b = residuals[j];
            std::vector<double> xa, xb;
            std::size_t p = 0, q = 0;
            while (p < a.years.size() && q < b.years.size()) {
                if (a.years[p] < b.years[q]) ++p;
                else if (b.years[q] < a.years[p]) ++q;
                else {
                    xa.push_back(a.values[p++]);
                    xb.push_back(b.values[q++]);
                }
            }
            const std::string pair = a.entity + "/" + b.entity;
            if (xa.size() < 2) {
                warnings.push_back("pair " + pair + " excluded: fewer than two common periods");
                continue;
            }
            try {
                out.push_back({xa.size(), pearson(xa, xb)});
            } catch (const InputError&) {
                warnings.push_back("pair " + pair + " excluded: zero residual variance on common periods");
            }
        }
    }
    if (out.empty()) throw EstimationError("no entity pair has usable overlapping residuals");
    return out;
}

std::size_t total_obs(std::span<const EntityResiduals> residuals) {
    std::size_t n = 0;
    for (const auto& r : residuals) n += r.values.size();
    return n;
}

}  // namespace

std::vector<EntityResiduals> group_by_entity(std::span<const double> residuals, std::span<const Observation> obs) {
    if (residuals.size() != obs.size()) throw InputError("residual and observation counts differ");
    std::vector<EntityResiduals> out;
    std::map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        auto [it, fresh] = where.emplace(obs[i].entity, out.size());
        if (fresh) out.push_back({obs[i].entity, {}, {}});
        auto& g = out[it->second];
        if (!g.years.empty() && obs[i].year <= g.years.back())
            throw InputError("residuals for entity '" + obs[i].entity + "' are not in increasing year order");
        g.years.push_back(obs[i].year);
        g.values.push_back(residuals[i]);
    }
    return out;
}

TestResult redundant_fixed_effects(const EstimationResult& pooled, const EstimationResult& fe) {
    if (fe.method != Method::fixed_effects) throw InputError("second argument must be a fixed effects fit");
    if (pooled.n_obs != fe.n_obs) throw InputError("pooled and fixed effects fits use different samples");
    const std::size_t entities = fe.n_entities;
    if (entities < 2) throw InputError("redundant fixed effects test needs at least two entities");

    const double ssr_pooled = pooled.unweighted.ssr;
    const double ssr_fe = fe.unweighted.ssr;
    if (ssr_fe > ssr_pooled * (1.0 + 1e-12))
        throw EstimationError("fixed effects SSR exceeds pooled SSR; models are not nested on this sample");

    const double gain = std::max(0.0, ssr_pooled - ssr_fe);
    const auto df1 = static_cast<double>(entities - 1);
    const auto df2 = static_cast<double>(fe.df_resid);
    const auto n = static_cast<double>(fe.n_obs);

    TestResult t;
    t.name = "Redundant Fixed Effects - Likelihood Ratio";
    t.null_hypothesis = "Fixed effects model is redundant";
    t.n_obs = fe.n_obs;
    const double lr = gain > 0 ? n * std::log(ssr_pooled / ssr_fe) : 0.0;
    t.primary = {"Cross-section Chi-square", lr, {df1}, chi2_sf(lr, df1)};
    const double f = gain > 0 ? (gain / df1) / (ssr_fe / df2) : 0.0;
    t.secondary.push_back({"Cross-section F", f, {df1, df2}, f_sf(f, df1, df2)});
    decide(t, "Fixed effects are redundant", "Fixed effects model is indicated");
    return t;
}

TestResult hausman(const EstimationResult& fe, const EstimationResult& re) {
    std::vector<std::size_t> in_fe, in_re;
    std::vector<std::string> common;
    for (std::size_t i = 0; i < fe.names.size(); ++i) {
        if (fe.names[i] == kInterceptName) continue;
        const auto j = re.index_of(fe.names[i]);
        if (j == re.names.size()) continue;
        in_fe.push_back(i);
        in_re.push_back(j);
        common.push_back(fe.names[i]);
    }
    if (common.empty()) throw InputError("Hausman test: no common slope coefficients");

    const auto m = static_cast<Eigen::Index>(common.size());
    Eigen::VectorXd q(m);
    Eigen::MatrixXd diff(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        q(a) = fe.coefficients(static_cast<Eigen::Index>(in_fe[a])) - re.coefficients(static_cast<Eigen::Index>(in_re[a]));
        for (Eigen::Index b = 0; b < m; ++b)
            diff(a, b) = fe.covariance(static_cast<Eigen::Index>(in_fe[a]), static_cast<Eigen::Index>(in_fe[b])) -
                         re.covariance(static_cast<Eigen::Index>(in_re[a]), static_cast<Eigen::Index>(in_re[b]));
    }

    TestResult t;
    t.name = "Correlated Random Effects - Hausman";
    t.null_hypothesis = "Random effects are consistent with the data";
    t.n_obs = fe.n_obs;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(SymMatrix(diff).matrix());
    const auto& lambda = eig.eigenvalues();
    const double scale = lambda.cwiseAbs().maxCoeff();
    double h = 0;
    double df = static_cast<double>(m);
    if (scale > 0 && lambda.minCoeff() > kEigenFloor * scale) {
        h = q.dot(spd_solve(SymMatrix(diff), q).col(0));
    } else {
        // Moore-Penrose pseudo-inverse over the non-negligible spectrum.
        const Eigen::VectorXd z = eig.eigenvectors().transpose() * q;
        int rank = 0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::fabs(lambda(i)) > kEigenFloor * scale) {
                h += z(i) * z(i) / lambda(i);
                ++rank;
            }
        }
        df = std::max(rank, 1);
        t.warnings.push_back("covariance difference is not positive definite; pseudo-inverse used with rank " +
                             std::to_string(rank));
        if (h < 0) {
            t.warnings.push_back("negative Hausman statistic " + std::to_string(h) + " truncated to zero");
            h = 0;
        }
    }
    t.primary = {"Cross-section random", h, {df}, chi2_sf(h, df)};
    decide(t, "Random effects model is indicated", "Fixed effects model is indicated");
    return t;
}

TestResult jarque_bera(std::span<const double> residuals) {
    const std::size_t n = residuals.size();
    if (n < 4) throw InputError("Jarque-Bera needs at least four residuals");
    const auto nd = static_cast<double>(n);
    double mean = 0;
    for (double e : residuals) mean += e;
    mean /= nd;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double e : residuals) {
        const double d = e - mean, d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= nd;
    m3 /= nd;
    m4 /= nd;
    if (!(m2 > 0)) throw InputError("Jarque-Bera undefined for zero-variance residuals");
    const double skew = m3 / std::pow(m2, 1.5);
    const double kurt = m4 / (m2 * m2);
    const double jb = nd / 6.0 * (skew * skew + 0.25 * (kurt - 3.0) * (kurt - 3.0));

    TestResult t;
    t.name = "Jarque-Bera";
    t.null_hypothesis = "Residuals are normally distributed";
    t.n_obs = n;
    t.primary = {"Jarque-Bera", jb, {2.0}, chi2_sf(jb, 2.0)};
    t.details = {{"Skewness", skew}, {"Kurtosis", kurt}};
    decide(t, "Residuals are normally distributed", "Residuals are not normally distributed");
    return t;
}

TestResult breusch_pagan_cd(std::span<const EntityResiduals> residuals) {
    TestResult t;
    t.name = "Breusch-Pagan LM";
    t.null_hypothesis = "No cross-section dependence";
    t.n_obs = total_obs(residuals);
    const auto pairs = pairwise_correlations(residuals, t.warnings);
    double lm = 0;
    for (const auto& p : pairs) lm += static_cast<double>(p.overlap) * p.rho * p.rho;
    const auto df = static_cast<double>(pairs.size());
    t.primary = {"Breusch-Pagan LM", lm, {df}, chi2_sf(lm, df)};
    decide(t, "No cross-section dependence", "Cross-section dependence");
    return t;
}

TestResult pesaran_cd(std::span<const EntityResiduals> residuals) {
    TestResult t;
    t.name = "Pesaran CD";
    t.null_hypothesis = "No cross-section dependence";
    t.n_obs = total_obs(residuals);
    const auto pairs = pairwise_correlations(residuals, t.warnings);
    double sum = 0;
    for (const auto& p : pairs) sum += std::sqrt(static_cast<double>(p.overlap)) * p.rho;
    // Equals sqrt(2 / (N (N - 1))) when every pair is usable.
    const double cd = sum / std::sqrt(static_cast<double>(pairs.size()));
    t.primary = {"Pesaran CD", cd, {}, std::min(1.0, 2.0 * normal_cdf(-std::fabs(cd)))};
    decide(t, "No cross-section dependence", "Cross-section dependence");
    return t;
}

TestResult bpg_heteroskedasticity(const EstimationResult& result, const DesignMatrix& dm) {
    if (!dm.has_intercept()) throw InputError("Breusch-Pagan-Godfrey test requires a model with an intercept");
    if (dm.k() < 2) throw InputError("Breusch-Pagan-Godfrey test needs at least one slope regressor");
    if (static_cast<std::size_t>(result.residuals_unweighted.size()) != dm.n())
        throw InputError("residuals do not match the design matrix");

    const Eigen::VectorXd e2 = result.residuals_unweighted.array().square();
    const auto aux = DesignMatrix::create("RESID^2", dm.column_names(), true, e2, dm.x(), dm.obs());
    const auto fit = ols(aux);
    const double lm = static_cast<double>(dm.n()) * fit.unweighted.r_squared;
    const auto df = static_cast<double>(dm.k() - 1);

    TestResult t;
    t.name = "Breusch-Pagan-Godfrey";
    t.null_hypothesis = "Homoskedasticity";
    t.n_obs = dm.n();
    t.primary = {"Obs*R-squared", lm, {df}, chi2_sf(lm, df)};
    decide(t, "Model is homoskedastic", "Model is heteroskedastic");
    return t;
}

TestResult breusch_godfrey(const EstimationResult& result, const DesignMatrix& dm, int lags) {
    if (lags < 1) throw InputError("Breusch-Godfrey lag order must be positive");
    if (static_cast<std::size_t>(result.residuals_unweighted.size()) != dm.n())
        throw InputError("residuals do not match the design matrix");
    const auto& e = result.residuals_unweighted;
    const auto p = static_cast<std::size_t>(lags);

    std::vector<Eigen::Index> rows;
    std::vector<std::vector<double>> lagged;
    for (const auto& b : dm.blocks()) {
        for (std::size_t r = b.begin; r < b.begin + b.size; ++r) {
            std::vector<double> lag_values;
            const Year year = dm.obs()[r].year;
            // Lags are taken by calendar year within the entity's own rows.
            for (std::size_t l = 1; l <= p; ++l) {
                const Year want = year - static_cast<Year>(l);
                bool found = false;
                for (std::size_t s = b.begin; s < r; ++s) {
                    if (dm.obs()[s].year == want) {
                        lag_values.push_back(e(static_cast<Eigen::Index>(s)));
                        found = true;
                        break;
                    }
                }
                if (!found) break;
            }
            if (lag_values.size() != p) continue;
            rows.push_back(static_cast<Eigen::Index>(r));
            lagged.push_back(std::move(lag_values));
        }
    }
    const std::size_t n_aux = rows.size();
    const std::size_t k_aux = dm.k() + p;
    if (n_aux <= k_aux)
        throw EstimationError("Breusch-Godfrey: insufficient time depth, " + std::to_string(n_aux) +
                              " usable rows for " + std::to_string(k_aux) + " auxiliary parameters");

    Eigen::VectorXd y(static_cast<Eigen::Index>(n_aux));
    Eigen::MatrixXd x(static_cast<Eigen::Index>(n_aux), static_cast<Eigen::Index>(k_aux));
    std::vector<Observation> obs;
    for (std::size_t i = 0; i < n_aux; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        y(ii) = e(rows[i]);
        x.row(ii).head(static_cast<Eigen::Index>(dm.k())) = dm.x().row(rows[i]);
        for (std::size_t l = 0; l < p; ++l) x(ii, static_cast<Eigen::Index>(dm.k() + l)) = lagged[i][l];
        obs.push_back(dm.obs()[static_cast<std::size_t>(rows[i])]);
    }
    auto names = dm.column_names();
    for (std::size_t l = 1; l <= p; ++l) names.push_back("RESID(-" + std::to_string(l) + ")");
    const auto restricted = DesignMatrix::create("RESID", dm.column_names(), dm.has_intercept(), y,
                                                 x.leftCols(static_cast<Eigen::Index>(dm.k())), obs);
    const auto aux = DesignMatrix::create("RESID", std::move(names), dm.has_intercept(), y, x, std::move(obs));
    // Lag terms are scored against a refit of the regressors on the retained rows.
    const double ssr_r = ols(restricted).unweighted.ssr;
    const double ssr_u = ols(aux).unweighted.ssr;
    if (!(ssr_r > 0)) throw EstimationError("Breusch-Godfrey: residuals are exactly explained by the regressors");
    const double lm = static_cast<double>(n_aux) * std::max(0.0, ssr_r - ssr_u) / ssr_r;

    TestResult t;
    t.name = "Breusch-Godfrey serial correlation LM";
    t.null_hypothesis = "No serial correlation";
    t.n_obs = n_aux;
    t.primary = {"Obs*R-squared", lm, {static_cast<double>(lags)}, chi2_sf(lm, static_cast<double>(lags))};
    decide(t, "No serial correlation", "Serial correlation");
    return t;
}

TestResult multicollinearity_screen(const DesignMatrix& dm, const EstimationResult& result) {
    TestResult t;
    t.name = "Multicollinearity screen";
    t.null_hypothesis = "No harmful multicollinearity";
    t.n_obs = dm.n();

    const std::size_t first = dm.has_intercept() ? 1 : 0;
    const auto& names = dm.column_names();
    double max_abs = 0;
    if (dm.k() - first < 2) t.warnings.push_back("fewer than two slope regressors; no pairs to compare");
    for (std::size_t i = first; i < dm.k(); ++i) {
        for (std::size_t j = i + 1; j < dm.k(); ++j) {
            const auto ci = dm.x().col(static_cast<Eigen::Index>(i));
            const auto cj = dm.x().col(static_cast<Eigen::Index>(j));
            try {
                const double r = pearson({ci.data(), dm.n()}, {cj.data(), dm.n()});
                t.details.push_back({"corr(" + names[i] + ", " + names[j] + ")", r});
                max_abs = std::max(max_abs, std::fabs(r));
            } catch (const InputError&) {
                t.warnings.push_back("pair " + names[i] + "/" + names[j] + " skipped: zero variance");
            }
        }
    }
    const double r2 = result.weighted.r_squared;
    t.details.push_back({"R-squared", r2});
    t.primary = {"Max |correlation|", max_abs, {}, std::nullopt};
    t.null_retained = r2 > max_abs;
    t.verdict = t.null_retained ? "Multicollinearity absent" : "Multicollinearity present";
    return t;
}

}  // namespace panelegls
