#include "panelegls/panel.hpp"

#include "panelegls/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <tuple>

namespace panelegls {

namespace {

std::string describe(const PanelRow& row) {
    return "(" + row.entity + ", " + std::to_string(row.year) + ", " + row.variable + ")";
}

std::size_t index_of(const std::vector<std::string>& names, std::string_view name) {
    auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? names.size() : static_cast<std::size_t>(it - names.begin());
}

}  // namespace

std::vector<Year> Panel::periods() const {
    std::vector<Year> out(period_count_);
    for (std::size_t t = 0; t < period_count_; ++t) out[t] = first_year_ + static_cast<Year>(t);
    return out;
}

bool Panel::has_entity(std::string_view entity) const {
    return index_of(entities_, entity) < entities_.size();
}

bool Panel::has_variable(std::string_view variable) const {
    return index_of(variables_, variable) < variables_.size();
}

std::size_t Panel::entity_index(std::string_view entity) const {
    auto i = index_of(entities_, entity);
    if (i == entities_.size()) throw InputError("unknown entity '" + std::string(entity) + "'");
    return i;
}

std::size_t Panel::variable_index(std::string_view variable) const {
    auto i = index_of(variables_, variable);
    if (i == variables_.size()) throw InputError("unknown variable '" + std::string(variable) + "'");
    return i;
}

std::optional<double> Panel::value(std::string_view entity, Year year, std::string_view variable) const {
    return value(entity_index(entity), year, variable_index(variable));
}

std::optional<double> Panel::value(std::size_t entity, Year year, std::size_t variable) const {
    if (year < first_year_ || year > last_year()) return std::nullopt;
    return data_.at(variable).at(entity * period_count_ + static_cast<std::size_t>(year - first_year_));
}

const Panel::Series& Panel::series(std::string_view variable) const {
    return data_[variable_index(variable)];
}

std::size_t Panel::observed_cells() const {
    std::size_t count = 0;
    for (const auto& s : data_)
        count += static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](const auto& v) { return v.has_value(); }));
    return count;
}

Panel Panel::with_series(std::string name, Series cells) const {
    if (has_variable(name)) throw InputError("variable '" + name + "' already exists in panel");
    if (cells.size() != entities_.size() * period_count_)
        throw InputError("series '" + name + "' has " + std::to_string(cells.size()) + " cells, expected " +
                         std::to_string(entities_.size() * period_count_));
    for (const auto& c : cells)
        if (c && !std::isfinite(*c)) throw InputError("series '" + name + "' contains a non-finite value");
    Panel out = *this;
    out.variables_.push_back(std::move(name));
    out.data_.push_back(std::move(cells));
    return out;
}

Panel Panel::select_entities(std::span<const std::string> keep) const {
    Panel out;
    out.first_year_ = first_year_;
    out.period_count_ = period_count_;
    out.variables_ = variables_;
    out.data_.assign(data_.size(), {});
    for (const auto& entity : keep) {
        if (index_of(out.entities_, entity) < out.entities_.size())
            throw InputError("entity '" + entity + "' selected twice");
        const auto src = entity_index(entity);
        out.entities_.push_back(entity);
        for (std::size_t v = 0; v < data_.size(); ++v) {
            auto first = data_[v].begin() + static_cast<std::ptrdiff_t>(src * period_count_);
            out.data_[v].insert(out.data_[v].end(), first, first + static_cast<std::ptrdiff_t>(period_count_));
        }
    }
    return out;
}

Panel build_panel(std::span<const PanelRow> rows) {
    if (rows.empty()) throw InputError("cannot build a panel from zero rows");

    Panel p;
    Year lo = std::numeric_limits<Year>::max();
    Year hi = std::numeric_limits<Year>::min();
    for (const auto& row : rows) {
        if (row.entity.empty()) throw InputError("empty entity code in row " + describe(row));
        if (row.variable.empty()) throw InputError("empty variable name in row " + describe(row));
        if (row.value && !std::isfinite(*row.value)) throw InputError("non-finite value at " + describe(row));
        if (index_of(p.entities_, row.entity) == p.entities_.size()) p.entities_.push_back(row.entity);
        if (index_of(p.variables_, row.variable) == p.variables_.size()) p.variables_.push_back(row.variable);
        lo = std::min(lo, row.year);
        hi = std::max(hi, row.year);
    }
    p.first_year_ = lo;
    p.period_count_ = static_cast<std::size_t>(hi - lo) + 1;
    p.data_.assign(p.variables_.size(), Panel::Series(p.entities_.size() * p.period_count_));

    std::set<std::tuple<std::size_t, Year, std::size_t>> seen;
    for (const auto& row : rows) {
        const auto e = index_of(p.entities_, row.entity);
        const auto v = index_of(p.variables_, row.variable);
        auto& cell = p.data_[v][e * p.period_count_ + static_cast<std::size_t>(row.year - lo)];
        if (!seen.emplace(e, row.year, v).second) {
            if (cell != row.value) throw InputError("conflicting values for " + describe(row));
            continue;
        }
        cell = row.value;
    }
    return p;
}

std::string lagged_name(std::string_view variable, int lag) {
    return std::string(variable) + "(-" + std::to_string(lag) + ")";
}

Panel lag(const Panel& panel, std::string_view variable, int k) {
    if (k < 1) throw InputError("lag order must be positive, got " + std::to_string(k));
    const auto& src = panel.series(variable);
    const auto periods = panel.period_count();
    Panel::Series out(src.size());
    for (std::size_t e = 0; e < panel.entities().size(); ++e)
        for (std::size_t t = static_cast<std::size_t>(k); t < periods; ++t)
            out[e * periods + t] = src[e * periods + t - static_cast<std::size_t>(k)];
    return panel.with_series(lagged_name(variable, k), std::move(out));
}

void ModelSpec::validate() const {
    if (dependent.empty()) throw InputError("model has no dependent variable");
    if (regressors.empty() && !include_intercept) throw InputError("model has no regressors");
    if (sample.first > sample.last)
        throw InputError("sample window " + std::to_string(sample.first) + "-" + std::to_string(sample.last) +
                         " is inverted");
    for (std::size_t i = 0; i < regressors.size(); ++i) {
        const auto& r = regressors[i];
        if (r.lag < 0) throw InputError("negative lag for regressor '" + r.variable + "'");
        if (r.variable == dependent && r.lag == 0)
            throw InputError("dependent variable '" + dependent + "' appears as a regressor at lag 0");
        for (std::size_t j = 0; j < i; ++j)
            if (regressors[j] == r) throw InputError("regressor '" + r.label() + "' listed twice");
    }
}

DesignMatrix DesignMatrix::create(std::string dependent, std::vector<std::string> column_names,
                                  bool has_intercept, Eigen::VectorXd y, Eigen::MatrixXd x,
                                  std::vector<Observation> obs) {
    const auto n = static_cast<std::size_t>(y.size());
    if (n == 0) throw InputError("design matrix has zero usable rows");
    if (static_cast<std::size_t>(x.rows()) != n || obs.size() != n)
        throw InputError("design matrix row counts disagree");
    if (column_names.size() != static_cast<std::size_t>(x.cols()))
        throw InputError("design matrix column names do not match column count");
    if (x.cols() == 0) throw InputError("design matrix has no columns");
    if (static_cast<std::size_t>(x.cols()) >= n)
        throw InputError("design matrix has " + std::to_string(x.cols()) + " columns but only " + std::to_string(n) +
                         " rows");
    if (!y.allFinite() || !x.allFinite()) throw InputError("design matrix contains non-finite values");
    if (has_intercept && (x.col(0).array() != 1.0).any())
        throw InputError("intercept column must be all ones");

    DesignMatrix dm;
    std::set<Year> years;
    std::set<std::string> closed;
    for (std::size_t r = 0; r < n; ++r) {
        years.insert(obs[r].year);
        if (r == 0 || obs[r].entity != obs[r - 1].entity) {
            if (!closed.insert(obs[r].entity).second)
                throw InputError("rows for entity '" + obs[r].entity + "' are not contiguous");
            dm.blocks_.push_back({obs[r].entity, r, 0});
        } else if (obs[r].year <= obs[r - 1].year) {
            throw InputError("years for entity '" + obs[r].entity + "' are not strictly increasing");
        }
        ++dm.blocks_.back().size;
    }
    dm.periods_.assign(years.begin(), years.end());
    dm.dependent_ = std::move(dependent);
    dm.column_names_ = std::move(column_names);
    dm.has_intercept_ = has_intercept;
    dm.y_ = std::move(y);
    dm.x_ = std::move(x);
    dm.obs_ = std::move(obs);
    return dm;
}

DesignMatrix assemble(const Panel& panel, const ModelSpec& spec) {
    spec.validate();
    const auto dep = panel.variable_index(spec.dependent);
    std::vector<std::size_t> reg_vars;
    for (const auto& r : spec.regressors) reg_vars.push_back(panel.variable_index(r.variable));

    const Year first = std::max(spec.sample.first, panel.first_year());
    const Year last = std::min(spec.sample.last, panel.last_year());
    const std::size_t offset = spec.include_intercept ? 1 : 0;
    const std::size_t k = spec.regressors.size() + offset;

    std::vector<double> ys;
    std::vector<double> xs;
    std::vector<Observation> obs;
    std::vector<double> row(k);
    for (std::size_t e = 0; e < panel.entities().size(); ++e) {
        for (Year t = first; t <= last; ++t) {
            const auto yv = panel.value(e, t, dep);
            if (!yv) continue;
            bool complete = true;
            if (offset) row[0] = 1.0;
            for (std::size_t j = 0; j < spec.regressors.size() && complete; ++j) {
                const auto xv = panel.value(e, t - spec.regressors[j].lag, reg_vars[j]);
                if (xv) row[j + offset] = *xv;
                else complete = false;
            }
            if (!complete) continue;
            ys.push_back(*yv);
            xs.insert(xs.end(), row.begin(), row.end());
            obs.push_back({panel.entities()[e], t});
        }
    }
    if (ys.empty())
        throw InputError("no usable observations for '" + spec.dependent + "' in sample " +
                         std::to_string(spec.sample.first) + "-" + std::to_string(spec.sample.last));

    const auto n = static_cast<Eigen::Index>(ys.size());
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), n);
    Eigen::MatrixXd x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        xs.data(), n, static_cast<Eigen::Index>(k));

    std::vector<std::string> names;
    if (offset) names.emplace_back(kInterceptName);
    for (const auto& r : spec.regressors) names.push_back(r.label());
    return DesignMatrix::create(spec.dependent, std::move(names), spec.include_intercept, std::move(y), std::move(x),
                                std::move(obs));
}

}  // namespace panelegls
