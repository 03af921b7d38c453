#include "panelegls/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace panelegls {

namespace {

using nlohmann::json;

constexpr std::size_t kRule = 80;

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::string pad_right(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

std::string fmt_opt(const std::optional<double>& v) {
    return v ? format_fixed(*v) : "NA";
}

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

std::string cluster_title(const std::string& cluster) {
    return "Model. " + std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(cluster[0])))) +
           cluster.substr(1) + " institutions cluster";
}

// Coefficient display order: slopes in design order, then the intercept.
std::vector<std::size_t> display_order(const EstimationResult& r) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < r.names.size(); ++i)
        if (r.names[i] != kInterceptName) order.push_back(i);
    for (std::size_t i = 0; i < r.names.size(); ++i)
        if (r.names[i] == kInterceptName) order.push_back(i);
    return order;
}

std::pair<Year, Year> sample_span(const EstimationResult& r) {
    Year lo = r.obs.front().year, hi = lo;
    for (const auto& o : r.obs) {
        lo = std::min(lo, o.year);
        hi = std::max(hi, o.year);
    }
    return {lo, hi};
}

void stat_line(std::string& out, const std::string& l1, const std::string& v1, const std::string& l2 = {},
               const std::string& v2 = {}) {
    std::string line = pad_right(l1, 22) + pad_left(v1, 16);
    if (!l2.empty()) line += "    " + pad_right(l2, 22) + pad_left(v2, 16);
    out += line + "\n";
}

void render_model(std::string& out, const ClusterModel& m, const ModelSpec& spec) {
    const auto& r = m.result;
    const auto [first, last] = sample_span(r);
    const bool adjusted = first != spec.sample.first || last != spec.sample.last;

    out += std::string(kRule, '=') + "\n";
    out += cluster_title(m.cluster) + "\n";
    out += "Dependent Variable: " + upper(r.dependent) + "\n";
    out += "Method: " + std::string(method_name(r.method)) + "\n";
    out += std::string(adjusted ? "Sample (adjusted): " : "Sample: ") + std::to_string(first) + " " +
           std::to_string(last) + "\n";
    out += "Periods included: " + std::to_string(r.n_periods) + "\n";
    out += "Cross-sections included: " + std::to_string(r.n_entities) + "\n";
    out += std::string("Total panel (") + (r.balanced ? "balanced" : "unbalanced") +
           ") observations: " + std::to_string(r.n_obs) + "\n";
    if (r.method == Method::egls_period_sur) out += "Linear estimation after one-step weighting matrix\n";
    out += std::string(covariance_description(r.covariance_kind)) + "\n\n";

    out += pad_right("Variable", 16) + pad_left("Coefficient", 16) + pad_left("Std. Error", 16) +
           pad_left("t-Statistic", 16) + pad_left("Prob.", 16) + "\n";
    for (auto i : display_order(r)) {
        const auto ii = static_cast<Eigen::Index>(i);
        out += pad_right(upper(r.names[i]), 16) + pad_left(format_fixed(r.coefficients(ii)), 16) +
               pad_left(format_fixed(r.std_errors(ii)), 16) + pad_left(format_fixed(r.t_stats(ii)), 16) +
               pad_left(format_fixed(r.p_values(ii)), 16) + "\n";
    }
    out += "\n";

    const bool weighted = r.method == Method::egls_period_sur || r.method == Method::random_effects;
    if (weighted) out += "Weighted Statistics\n\n";
    const auto& w = weighted ? r.weighted : r.unweighted;
    stat_line(out, "R-squared", format_fixed(w.r_squared), "Mean dependent var", format_fixed(w.mean_dep));
    stat_line(out, "Adjusted R-squared", format_fixed(w.adj_r_squared), "S.D. dependent var", format_fixed(w.sd_dep));
    stat_line(out, "S.E. of regression", format_fixed(w.se_regression), "Sum squared resid", format_fixed(w.ssr));
    stat_line(out, "F-statistic", fmt_opt(w.f_statistic), "Durbin-Watson stat", format_fixed(w.durbin_watson));
    stat_line(out, "Prob(F-statistic)", fmt_opt(w.prob_f));
    if (weighted) {
        const auto& u = r.unweighted;
        out += "\nUnweighted Statistics\n\n";
        stat_line(out, "R-squared", format_fixed(u.r_squared), "Mean dependent var", format_fixed(u.mean_dep));
        stat_line(out, "Sum squared resid", format_fixed(u.ssr), "Durbin-Watson stat", format_fixed(u.durbin_watson));
    }
    for (const auto& warning : r.warnings) out += "Warning: " + warning + "\n";

    if (!m.correlations.empty()) {
        out += "\nCorrelations with the dependent variable\n\n";
        for (const auto& c : m.correlations) out += pad_right(c.label, 38) + pad_left(format_fixed(c.value), 16) + "\n";
    }

    if (!m.tests.empty()) {
        out += "\nDiagnostic tests\n";
        for (const auto& t : m.tests) {
            out += "\n" + t.name + " (n = " + std::to_string(t.n_obs) + ")\n";
            out += "  H0: " + t.null_hypothesis + "\n";
            auto stat = [&](const Statistic& s) {
                std::string line = "  " + pad_right(s.label, 26) + pad_left(format_fixed(s.value), 16);
                if (!s.df.empty()) {
                    std::vector<std::string> dfs;
                    for (double d : s.df) dfs.push_back(std::to_string(static_cast<long long>(std::llround(d))));
                    line += "  d.f. " + join(dfs, ",");
                }
                if (s.p_value) line += "  Prob. " + format_fixed(*s.p_value);
                out += line + "\n";
            };
            stat(t.primary);
            for (const auto& s : t.secondary) stat(s);
            for (const auto& d : t.details) out += "  " + pad_right(d.label, 26) + pad_left(format_fixed(d.value), 16) + "\n";
            for (const auto& warning : t.warnings) out += "  Warning: " + warning + "\n";
            out += "  Result: " + t.verdict + "\n";
        }
    }
}

json statistic_json(const Statistic& s) {
    json j{{"label", s.label}, {"value", s.value}, {"df", s.df}};
    j["p_value"] = s.p_value ? json(*s.p_value) : json(nullptr);
    return j;
}

json fit_json(const FitStats& f) {
    json j{{"r_squared", f.r_squared},         {"adj_r_squared", f.adj_r_squared}, {"se_regression", f.se_regression},
           {"ssr", f.ssr},                     {"durbin_watson", f.durbin_watson}, {"mean_dep", f.mean_dep},
           {"sd_dep", f.sd_dep}};
    j["f_statistic"] = f.f_statistic ? json(*f.f_statistic) : json(nullptr);
    j["prob_f"] = f.prob_f ? json(*f.prob_f) : json(nullptr);
    return j;
}

std::string weighting_name(Weighting w) {
    return w == Weighting::period_sur ? "period-sur" : "none";
}

std::string covariance_name(CovarianceKind c) {
    return c == CovarianceKind::pcse_period_sur ? "pcse" : "ordinary";
}

}  // namespace

std::string format_fixed(double v) {
    if (!std::isfinite(v)) return "NA";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string render_text(const ReportBundle& bundle) {
    std::string out;
    const auto& a = bundle.assignment;
    out += "Institutional clustering: " + a.indicator + "\n";
    out += "Median score: " + format_fixed(a.median) + "\n";
    out += "Inclusive (" + std::to_string(a.inclusive.size()) + "): " + join(a.inclusive, " ") + "\n";
    out += "Extractive (" + std::to_string(a.extractive.size()) + "): " + join(a.extractive, " ") + "\n";
    for (const auto& w : a.warnings) out += w + "\n";
    for (const auto& m : bundle.models) {
        out += "\n";
        render_model(out, m, bundle.model);
    }
    return out;
}

json to_json(const ReportBundle& bundle) {
    const auto& a = bundle.assignment;
    json j;
    j["format"] = "panelegls-report";
    j["version"] = 1;
    j["clustering"] = {{"indicator", a.indicator},
                       {"median", a.median},
                       {"inclusive", a.inclusive},
                       {"extractive", a.extractive},
                       {"warnings", a.warnings}};

    const auto& spec = bundle.model;
    json regressors = json::array();
    for (const auto& r : spec.regressors) regressors.push_back({{"variable", r.variable}, {"lag", r.lag}});
    j["model"] = {{"dependent", spec.dependent},
                  {"regressors", regressors},
                  {"intercept", spec.include_intercept},
                  {"sample", {spec.sample.first, spec.sample.last}},
                  {"weighting", weighting_name(spec.weighting)},
                  {"covariance", covariance_name(spec.covariance)}};

    json models = json::array();
    for (const auto& m : bundle.models) {
        const auto& r = m.result;
        const auto [first, last] = sample_span(r);
        json coefs = json::array();
        for (std::size_t i = 0; i < r.names.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            coefs.push_back({{"name", r.names[i]},
                             {"coefficient", r.coefficients(ii)},
                             {"std_error", r.std_errors(ii)},
                             {"t_statistic", r.t_stats(ii)},
                             {"prob", r.p_values(ii)}});
        }
        json cov = json::array();
        for (Eigen::Index i = 0; i < r.covariance.order(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < r.covariance.order(); ++k) row.push_back(r.covariance(i, k));
            cov.push_back(row);
        }
        json resid = json::array();
        for (std::size_t i = 0; i < r.obs.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            resid.push_back({{"entity", r.obs[i].entity},
                             {"year", r.obs[i].year},
                             {"weighted", r.residuals_weighted(ii)},
                             {"unweighted", r.residuals_unweighted(ii)}});
        }
        json tests = json::array();
        for (const auto& t : m.tests) {
            json secondary = json::array();
            for (const auto& s : t.secondary) secondary.push_back(statistic_json(s));
            json details = json::array();
            for (const auto& d : t.details) details.push_back({{"label", d.label}, {"value", d.value}});
            tests.push_back({{"name", t.name},
                             {"null_hypothesis", t.null_hypothesis},
                             {"n_obs", t.n_obs},
                             {"statistic", statistic_json(t.primary)},
                             {"secondary", secondary},
                             {"null_retained", t.null_retained},
                             {"verdict", t.verdict},
                             {"details", details},
                             {"warnings", t.warnings}});
        }
        json corr = json::array();
        for (const auto& c : m.correlations) corr.push_back({{"label", c.label}, {"value", c.value}});

        json model{{"cluster", m.cluster},
                   {"members", m.members},
                   {"method", std::string(method_name(r.method))},
                   {"covariance", covariance_name(r.covariance_kind)},
                   {"dependent", r.dependent},
                   {"sample", {{"first", first}, {"last", last}}},
                   {"periods", r.n_periods},
                   {"cross_sections", r.n_entities},
                   {"observations", r.n_obs},
                   {"balanced", r.balanced},
                   {"df_resid", r.df_resid},
                   {"log_likelihood", r.log_likelihood},
                   {"coefficients", coefs},
                   {"covariance_matrix", cov},
                   {"weighted_statistics", fit_json(r.weighted)},
                   {"unweighted_statistics", fit_json(r.unweighted)},
                   {"residuals", resid},
                   {"tests", tests},
                   {"correlations", corr},
                   {"warnings", r.warnings}};
        models.push_back(std::move(model));
    }
    j["models"] = std::move(models);
    return j;
}

std::string render_json(const ReportBundle& bundle) {
    return to_json(bundle).dump(2) + "\n";
}

}  // namespace panelegls
