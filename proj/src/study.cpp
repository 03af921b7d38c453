#include "panelegls/study.hpp"

#include "panelegls/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace panelegls {

ScoreTable ScoreTable::create(std::vector<ScoreRow> rows) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : rows) {
        if (r.country.empty()) throw InputError("score row with empty country code");
        if (!std::isfinite(r.score) || r.score < kMinScore || r.score > kMaxScore) {
            std::ostringstream os;
            os << "score " << r.score << " for " << r.country << " (" << r.indicator << ") is outside [1, 7]";
            throw InputError(os.str());
        }
        if (!seen.emplace(r.indicator, r.country).second)
            throw InputError("country " + r.country + " scored twice for indicator '" + r.indicator + "'");
    }
    ScoreTable t;
    t.rows_ = std::move(rows);
    return t;
}

std::vector<std::string> ScoreTable::indicators() const {
    std::vector<std::string> out;
    for (const auto& r : rows_)
        if (std::find(out.begin(), out.end(), r.indicator) == out.end()) out.push_back(r.indicator);
    return out;
}

bool ClusterAssignment::is_inclusive(std::string_view country) const {
    return std::find(inclusive.begin(), inclusive.end(), country) != inclusive.end();
}

ClusterAssignment median_cluster(const ScoreTable& scores, std::string_view indicator) {
    std::vector<const ScoreRow*> rows;
    for (const auto& r : scores.rows())
        if (r.indicator == indicator) rows.push_back(&r);
    if (rows.size() < 2)
        throw InputError("indicator '" + std::string(indicator) + "' has fewer than two scored countries");

    std::stable_sort(rows.begin(), rows.end(), [](const ScoreRow* a, const ScoreRow* b) { return a->score > b->score; });
    const std::size_t n = rows.size();
    // rows are descending; the median is the same from either end.
    const double median = n % 2 == 1 ? rows[n / 2]->score : 0.5 * (rows[n / 2 - 1]->score + rows[n / 2]->score);

    ClusterAssignment c;
    c.indicator = std::string(indicator);
    c.median = median;
    for (const auto* r : rows) {
        if (r->score > median) {
            c.inclusive.push_back(r->country);
        } else {
            if (r->score == median)
                c.warnings.push_back("WARNING: " + r->country + " ties the median " + std::to_string(median) +
                                     " and is assigned to the extractive cluster");
            c.extractive.push_back(r->country);
        }
    }
    return c;
}

std::string_view drift_category_name(DriftCategory c) {
    switch (c) {
        case DriftCategory::identical: return "identical";
        case DriftCategory::similar: return "similar";
        case DriftCategory::significantly_different: return "significantly different";
    }
    return "unknown";
}

DriftReport subindicator_drift(const ClusterAssignment& main, const ClusterAssignment& alt) {
    auto universe = [](const ClusterAssignment& a) {
        std::set<std::string> u(a.inclusive.begin(), a.inclusive.end());
        u.insert(a.extractive.begin(), a.extractive.end());
        return u;
    };
    if (universe(main) != universe(alt))
        throw InputError("clusterings for '" + main.indicator + "' and '" + alt.indicator +
                         "' cover different countries");

    DriftReport d;
    d.indicator = alt.indicator;
    for (const auto& c : main.inclusive)
        if (!alt.is_inclusive(c)) d.left_inclusive.push_back(c);
    for (const auto& c : alt.inclusive)
        if (!main.is_inclusive(c)) d.joined_inclusive.push_back(c);

    const std::size_t moves = std::max(d.left_inclusive.size(), d.joined_inclusive.size());
    for (std::size_t i = 0; i < moves; ++i)
        d.replacements.emplace_back(i < d.left_inclusive.size() ? d.left_inclusive[i] : "",
                                    i < d.joined_inclusive.size() ? d.joined_inclusive[i] : "");
    if (moves == 0) d.category = DriftCategory::identical;
    else if (moves <= 2) d.category = DriftCategory::similar;
    else d.category = DriftCategory::significantly_different;
    return d;
}

void CrisisCalendar::add_country(const std::string& country) {
    if (country.empty()) throw InputError("empty country code in crisis calendar");
    if (has_country(country)) return;
    countries_.push_back(country);
    intervals_.emplace_back();
}

void CrisisCalendar::add_interval(const std::string& country, CrisisInterval interval) {
    if (interval.end && *interval.end < interval.start)
        throw InputError("crisis interval for " + country + " ends (" + std::to_string(*interval.end) +
                         ") before it starts (" + std::to_string(interval.start) + ")");
    add_country(country);
    auto it = std::find(countries_.begin(), countries_.end(), country);
    intervals_[static_cast<std::size_t>(it - countries_.begin())].push_back(std::move(interval));
}

bool CrisisCalendar::has_country(std::string_view country) const {
    return std::find(countries_.begin(), countries_.end(), country) != countries_.end();
}

const std::vector<CrisisInterval>& CrisisCalendar::intervals(std::string_view country) const {
    auto it = std::find(countries_.begin(), countries_.end(), country);
    if (it == countries_.end()) throw InputError("country '" + std::string(country) + "' is not in the crisis calendar");
    return intervals_[static_cast<std::size_t>(it - countries_.begin())];
}

std::optional<Year> CrisisCalendar::earliest_start() const {
    std::optional<Year> out;
    for (const auto& list : intervals_)
        for (const auto& i : list)
            if (!out || i.start < *out) out = i.start;
    return out;
}

int crisis_dummy(const CrisisCalendar& calendar, std::string_view country, Year year) {
    for (const auto& i : calendar.intervals(country)) {
        const Year end = i.end.value_or(calendar.horizon_end());
        if (year >= i.start && year <= end) return 1;
    }
    return 0;
}

Panel add_crisis_dummy(const Panel& panel, const CrisisCalendar& calendar, std::string name) {
    Panel::Series cells;
    cells.reserve(panel.entities().size() * panel.period_count());
    for (const auto& entity : panel.entities())
        for (Year t = panel.first_year(); t <= panel.last_year(); ++t)
            cells.emplace_back(static_cast<double>(crisis_dummy(calendar, entity, t)));
    return panel.with_series(std::move(name), std::move(cells));
}

namespace {

template <class F>
auto tagged(const std::string& cluster, const char* stage, F&& f) -> decltype(f()) {
    const std::string prefix = "[" + cluster + "/" + stage + "] ";
    try {
        return f();
    } catch (const InputError& e) {
        throw InputError(prefix + e.what());
    } catch (const EstimationError& e) {
        throw EstimationError(prefix + e.what());
    }
}

std::vector<Detail> dependent_correlations(const Panel& panel, const ReplicationOptions& opt) {
    std::vector<Detail> out;
    std::vector<std::string> done;
    const auto& dep = panel.series(opt.model.dependent);
    for (const auto& r : opt.model.regressors) {
        if (r.variable == opt.dummy_name || r.variable == opt.model.dependent) continue;
        if (std::find(done.begin(), done.end(), r.variable) != done.end()) continue;
        done.push_back(r.variable);
        const auto& x = panel.series(r.variable);
        std::vector<double> a, b;
        for (std::size_t i = 0; i < dep.size(); ++i) {
            if (dep[i] && x[i]) {
                a.push_back(*dep[i]);
                b.push_back(*x[i]);
            }
        }
        out.push_back({"corr(" + opt.model.dependent + ", " + r.variable + ")", pearson(a, b)});
    }
    return out;
}

}  // namespace

std::vector<TestResult> diagnostic_battery(const DesignMatrix& dm, const EstimationResult& result, int serial_lags) {
    const auto pooled = ols(dm);
    const auto fe = fixed_effects(dm);
    const auto re = random_effects(dm);
    const auto by_entity = group_by_entity({result.residuals_unweighted.data(), dm.n()}, dm.obs());

    std::vector<TestResult> tests;
    tests.push_back(redundant_fixed_effects(pooled, fe));
    tests.push_back(hausman(fe, re));
    tests.push_back(jarque_bera({result.residuals_weighted.data(), dm.n()}));
    tests.push_back(breusch_pagan_cd(by_entity));
    tests.push_back(pesaran_cd(by_entity));
    tests.push_back(bpg_heteroskedasticity(result, dm));
    tests.push_back(breusch_godfrey(result, dm, serial_lags));
    tests.push_back(multicollinearity_screen(dm, result));
    return tests;
}

ReportBundle replicate(const Panel& panel, const ScoreTable& scores, const CrisisCalendar& calendar,
                       const ReplicationOptions& options) {
    ReportBundle bundle;
    bundle.model = options.model;
    bundle.assignment = tagged("all", "clustering", [&] { return median_cluster(scores, options.indicator); });

    CrisisCalendar cal = calendar;
    cal.set_horizon_end(options.horizon_end.value_or(panel.last_year()));

    std::vector<std::pair<std::string, std::vector<std::string>>> wanted;
    if (options.clusters != ClusterChoice::extractive) wanted.emplace_back("inclusive", bundle.assignment.inclusive);
    if (options.clusters != ClusterChoice::inclusive) wanted.emplace_back("extractive", bundle.assignment.extractive);

    for (auto& [name, members] : wanted) {
        ClusterModel m;
        m.cluster = name;
        m.members = members;
        const auto sub = tagged(name, "data", [&] {
            for (const auto& c : members)
                if (!panel.has_entity(c)) throw InputError("cluster member " + c + " has no rows in the panel data");
            return add_crisis_dummy(panel.select_entities(members), cal, options.dummy_name);
        });
        const auto dm = tagged(name, "assemble", [&] { return assemble(sub, options.model); });
        m.result = tagged(name, "estimation",
                          [&] { return estimate(dm, options.model.weighting, options.model.covariance); });
        m.tests = tagged(name, "diagnostics", [&] { return diagnostic_battery(dm, m.result, options.serial_lags); });
        m.correlations = tagged(name, "correlations", [&] { return dependent_correlations(sub, options); });
        bundle.models.push_back(std::move(m));
    }
    return bundle;
}

}  // namespace panelegls
