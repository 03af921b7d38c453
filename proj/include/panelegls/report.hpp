#pragma once

#include "panelegls/study.hpp"

#include <json.hpp>

#include <string>

namespace panelegls {

/// Fixed six-decimal rendering used throughout the text report; "NA" for non-finite values.
std::string format_fixed(double v);

/// Plain-text report: clustering, one regression block per model, then the test summary.
std::string render_text(const ReportBundle& bundle);

/// Structured report with stable field names and full-precision numbers.
nlohmann::json to_json(const ReportBundle& bundle);
std::string render_json(const ReportBundle& bundle);

}  // namespace panelegls
