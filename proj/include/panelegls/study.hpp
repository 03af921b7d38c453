#pragma once

#include "panelegls/diagnostics.hpp"
#include "panelegls/estimators.hpp"
#include "panelegls/panel.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace panelegls {

// ---------------------------------------------------------------------------
// Institutional scores and clustering

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 7.0;

struct ScoreRow {
    std::string country;
    std::string indicator;
    double score = 0;
    std::optional<int> world_rank;
    std::optional<int> eu_rank;
};

/// Validated scores: every score in [1, 7], each country at most once per indicator.
class ScoreTable {
public:
    static ScoreTable create(std::vector<ScoreRow> rows);

    const std::vector<ScoreRow>& rows() const { return rows_; }
    /// Indicator names in first-appearance order.
    std::vector<std::string> indicators() const;

private:
    std::vector<ScoreRow> rows_;
};

struct ClusterAssignment {
    std::string indicator;
    double median = 0;
    /// Members ordered by descending score.
    std::vector<std::string> inclusive;
    std::vector<std::string> extractive;
    std::vector<std::string> warnings;

    bool is_inclusive(std::string_view country) const;
};

/// Splits countries at the median score: above is inclusive, at or below is extractive.
ClusterAssignment median_cluster(const ScoreTable& scores, std::string_view indicator);

enum class DriftCategory { identical = 1, similar = 2, significantly_different = 3 };

std::string_view drift_category_name(DriftCategory c);

struct DriftReport {
    std::string indicator;
    DriftCategory category = DriftCategory::identical;
    /// Inclusive under the main indicator, extractive under the alternative.
    std::vector<std::string> left_inclusive;
    /// Extractive under the main indicator, inclusive under the alternative.
    std::vector<std::string> joined_inclusive;
    /// (leaving, replacement) pairs; the replacement is empty when nobody took the slot.
    std::vector<std::pair<std::string, std::string>> replacements;
};

/// Compares a sub-indicator clustering with the main one.
DriftReport subindicator_drift(const ClusterAssignment& main, const ClusterAssignment& alt);

// ---------------------------------------------------------------------------
// Crisis calendar

struct CrisisInterval {
    Year start = 0;
    /// Empty for an episode that is still ongoing.
    std::optional<Year> end;
    /// Free-form event category; metadata only.
    std::string category;
};

class CrisisCalendar {
public:
    explicit CrisisCalendar(Year horizon_end) : horizon_end_(horizon_end) {}

    /// Registers a country with no episodes (no-op if already present).
    void add_country(const std::string& country);
    /// Throws InputError when the interval is inverted.
    void add_interval(const std::string& country, CrisisInterval interval);

    Year horizon_end() const { return horizon_end_; }
    void set_horizon_end(Year y) { horizon_end_ = y; }

    bool has_country(std::string_view country) const;
    const std::vector<std::string>& countries() const { return countries_; }
    const std::vector<CrisisInterval>& intervals(std::string_view country) const;
    /// Earliest start year across all countries, if any episode exists.
    std::optional<Year> earliest_start() const;

private:
    Year horizon_end_;
    std::vector<std::string> countries_;
    std::vector<std::vector<CrisisInterval>> intervals_;
};

/// 1 when `year` falls in any episode of `country` (ends inclusive, open episodes run to the horizon).
int crisis_dummy(const CrisisCalendar& calendar, std::string_view country, Year year);

/// Adds the crisis dummy as a panel series for every panel entity.
Panel add_crisis_dummy(const Panel& panel, const CrisisCalendar& calendar, std::string name);

// ---------------------------------------------------------------------------
// Two-cluster replication pipeline

enum class ClusterChoice { both, inclusive, extractive };

struct ReplicationOptions {
    std::string indicator = "Institutions";
    ModelSpec model;
    std::string dummy_name = "dummy";
    ClusterChoice clusters = ClusterChoice::both;
    int serial_lags = 2;
    /// Overrides the calendar horizon; defaults to the panel's last year.
    std::optional<Year> horizon_end;
};

struct ClusterModel {
    std::string cluster;
    std::vector<std::string> members;
    EstimationResult result;
    std::vector<TestResult> tests;
    /// Dependent-variable correlations over all panel years, e.g. "corr(unem, youth)".
    std::vector<Detail> correlations;
};

struct ReportBundle {
    ClusterAssignment assignment;
    ModelSpec model;
    std::vector<ClusterModel> models;
};

/// Runs the full diagnostic battery for one fitted model.
std::vector<TestResult> diagnostic_battery(const DesignMatrix& dm, const EstimationResult& result, int serial_lags);

ReportBundle replicate(const Panel& panel, const ScoreTable& scores, const CrisisCalendar& calendar,
                       const ReplicationOptions& options);

}  // namespace panelegls
