#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace panelegls {

using Year = int;

/// One (entity, year, variable) observation; an empty value marks the cell as missing.
struct PanelRow {
    std::string entity;
    Year year = 0;
    std::string variable;
    std::optional<double> value;
};

/**
 * Rectangular entity x year store of named series.
 *
 * Periods are the contiguous calendar years between the smallest and largest year
 * seen at construction. Entities and variables keep their first-appearance order.
 * Instances are immutable; derived series are added by returning a new panel.
 */
class Panel {
public:
    using Series = std::vector<std::optional<double>>;

    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<std::string>& variables() const { return variables_; }
    Year first_year() const { return first_year_; }
    Year last_year() const { return first_year_ + static_cast<Year>(period_count_) - 1; }
    std::size_t period_count() const { return period_count_; }
    std::vector<Year> periods() const;

    bool has_entity(std::string_view entity) const;
    bool has_variable(std::string_view variable) const;
    std::size_t entity_index(std::string_view entity) const;
    std::size_t variable_index(std::string_view variable) const;

    /// Missing for years outside the panel range. Throws on unknown entity or variable.
    std::optional<double> value(std::string_view entity, Year year, std::string_view variable) const;
    std::optional<double> value(std::size_t entity, Year year, std::size_t variable) const;

    /// Series laid out entity-major, one slot per period.
    const Series& series(std::string_view variable) const;

    /// Number of non-missing cells across all variables.
    std::size_t observed_cells() const;

    /// Returns a copy with `cells` (entity-major, period_count() per entity) added as `name`.
    Panel with_series(std::string name, Series cells) const;

    /// Returns a copy holding only the listed entities, in the order given.
    Panel select_entities(std::span<const std::string> keep) const;

    friend Panel build_panel(std::span<const PanelRow> rows);

private:
    Panel() = default;

    std::vector<std::string> entities_;
    std::vector<std::string> variables_;
    Year first_year_ = 0;
    std::size_t period_count_ = 0;
    std::vector<Series> data_;
};

/// Builds a panel from long-format rows. Conflicting duplicate cells are rejected.
Panel build_panel(std::span<const PanelRow> rows);

/// Display name of a lagged series, e.g. "youth(-1)".
std::string lagged_name(std::string_view variable, int lag);

/// Adds `variable` lagged by `k` periods under lagged_name(variable, k).
Panel lag(const Panel& panel, std::string_view variable, int k);

enum class Weighting { none, period_sur };
enum class CovarianceKind { ordinary, pcse_period_sur };

struct RegressorTerm {
    std::string variable;
    int lag = 0;

    std::string label() const { return lag == 0 ? variable : lagged_name(variable, lag); }
    friend bool operator==(const RegressorTerm&, const RegressorTerm&) = default;
};

struct SampleWindow {
    Year first = 0;
    Year last = 0;
};

/// Declarative single-equation panel regression.
struct ModelSpec {
    std::string dependent;
    std::vector<RegressorTerm> regressors;
    bool include_intercept = true;
    SampleWindow sample;
    Weighting weighting = Weighting::period_sur;
    CovarianceKind covariance = CovarianceKind::pcse_period_sur;

    /// Throws InputError on an internally inconsistent specification.
    void validate() const;
};

inline constexpr std::string_view kInterceptName = "C";

struct Observation {
    std::string entity;
    Year year = 0;
    friend bool operator==(const Observation&, const Observation&) = default;
};

struct EntityBlock {
    std::string entity;
    std::size_t begin = 0;
    std::size_t size = 0;
};

/**
 * Stacked estimation sample with no missing values.
 *
 * Rows are ordered entity-major, year-minor, so every entity occupies one contiguous
 * block. When an intercept is present it is column 0.
 */
class DesignMatrix {
public:
    /// Validates shape, finiteness, ordering and the intercept column.
    static DesignMatrix create(std::string dependent, std::vector<std::string> column_names,
                               bool has_intercept, Eigen::VectorXd y, Eigen::MatrixXd x,
                               std::vector<Observation> obs);

    const Eigen::VectorXd& y() const { return y_; }
    const Eigen::MatrixXd& x() const { return x_; }
    const std::string& dependent() const { return dependent_; }
    const std::vector<std::string>& column_names() const { return column_names_; }
    bool has_intercept() const { return has_intercept_; }
    const std::vector<Observation>& obs() const { return obs_; }
    const std::vector<EntityBlock>& blocks() const { return blocks_; }
    /// Distinct years present in the sample, ascending.
    const std::vector<Year>& periods() const { return periods_; }
    /// True when every included entity is observed in every sample period.
    bool balanced() const { return obs_.size() == blocks_.size() * periods_.size(); }

    std::size_t n() const { return static_cast<std::size_t>(y_.size()); }
    std::size_t k() const { return static_cast<std::size_t>(x_.cols()); }
    std::size_t entity_count() const { return blocks_.size(); }

private:
    DesignMatrix() = default;

    std::string dependent_;
    std::vector<std::string> column_names_;
    bool has_intercept_ = false;
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;
    std::vector<Observation> obs_;
    std::vector<EntityBlock> blocks_;
    std::vector<Year> periods_;
};

/// Listwise-deleted design matrix for `spec` over `panel`.
DesignMatrix assemble(const Panel& panel, const ModelSpec& spec);

}  // namespace panelegls
