#pragma once

#include "panelegls/panel.hpp"
#include "panelegls/study.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace panelegls {

// CSV ingestion. Headers must match exactly; CR/LF line endings and a leading UTF-8
// BOM are tolerated; numbers use '.' as the decimal separator regardless of locale.
// Errors carry "<source>:<line>:" prefixes.

/// Wide layout: `country,year,<var1>,<var2>,...`; an empty field is a missing cell.
Panel parse_panel_csv(std::istream& in, const std::string& source = "<panel>");
Panel read_panel_csv(const std::filesystem::path& path);

/// `country,indicator,score` optionally followed by `,world_rank,eu_rank`.
ScoreTable parse_scores_csv(std::istream& in, const std::string& source = "<scores>");
ScoreTable read_scores_csv(const std::filesystem::path& path);

/// `country,start_year,end_year` optionally followed by `,category`. `end_year` may be
/// `ongoing`. A row with both years empty registers a country without episodes.
CrisisCalendar parse_events_csv(std::istream& in, Year horizon_end, const std::string& source = "<events>");
CrisisCalendar read_events_csv(const std::filesystem::path& path, Year horizon_end);

struct ParsedRegressor {
    RegressorTerm term;
    std::optional<std::string> warning;
};

/// Parses `name` or `name(-k)`.
ParsedRegressor parse_regressor(std::string_view expr);

enum class OutputMode { text, json, both };

OutputMode parse_output_mode(std::string_view s);

/**
 * Declarative run description, read from a flat `key = value` file.
 *
 * Recognised keys: data, scores, events (paths, relative to the config file),
 * indicator, dependent, regressor (repeatable), intercept, sample ("first last"),
 * weighting (period-sur | none), covariance (pcse | ordinary), output, horizon_end,
 * dummy, clusters (both | inclusive | extractive), serial_lags.
 */
struct RunConfig {
    std::filesystem::path data_path;
    std::filesystem::path scores_path;
    std::filesystem::path events_path;
    ReplicationOptions options;
    OutputMode output = OutputMode::text;
    std::vector<std::string> warnings;
};

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source = "<config>");
RunConfig read_config(const std::filesystem::path& path);

}  // namespace panelegls
