#include "panelegls/io.hpp"

#include "panelegls/error.hpp"
#include "text.hpp"

#include <set>

namespace panelegls {

using namespace detail;

OutputMode parse_output_mode(std::string_view s) {
    if (s == "text") return OutputMode::text;
    if (s == "json") return OutputMode::json;
    if (s == "both") return OutputMode::both;
    throw InputError("unknown output mode '" + std::string(s) + "'; expected text, json or both");
}

RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir, const std::string& source) {
    LineReader reader(in, source);
    RunConfig cfg;
    auto& model = cfg.options.model;
    bool have_sample = false;
    std::set<std::string> seen;
    std::string line;

    auto parse_bool = [&](std::string_view v) {
        if (v == "true" || v == "yes" || v == "1") return true;
        if (v == "false" || v == "no" || v == "0") return false;
        reader.fail("expected a boolean, got '" + std::string(v) + "'");
    };
    auto parse_year = [&](std::string_view v) {
        const auto y = to_int(v);
        if (!y) reader.fail("'" + std::string(v) + "' is not a year");
        return *y;
    };

    while (reader.next(line)) {
        const auto hash = line.find('#');
        const auto body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) reader.fail("expected 'key = value'");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (value.empty()) reader.fail("empty value for '" + key + "'");
        if (key != "regressor" && !seen.insert(key).second) reader.fail("key '" + key + "' given twice");

        if (key == "data") cfg.data_path = base_dir / value;
        else if (key == "scores") cfg.scores_path = base_dir / value;
        else if (key == "events") cfg.events_path = base_dir / value;
        else if (key == "indicator") cfg.options.indicator = value;
        else if (key == "dependent") model.dependent = value;
        else if (key == "regressor") {
            try {
                auto parsed = parse_regressor(value);
                if (parsed.warning) cfg.warnings.push_back(source + ":" + std::to_string(reader.line_no()) + ": " + *parsed.warning);
                model.regressors.push_back(parsed.term);
            } catch (const InputError& e) {
                reader.fail(e.what());
            }
        } else if (key == "intercept") model.include_intercept = parse_bool(value);
        else if (key == "sample") {
            const auto f = split_ws(value);
            if (f.size() != 2) reader.fail("sample must be 'first_year last_year'");
            model.sample = {parse_year(f[0]), parse_year(f[1])};
            have_sample = true;
        } else if (key == "weighting") {
            if (value == "period-sur") model.weighting = Weighting::period_sur;
            else if (value == "none") model.weighting = Weighting::none;
            else reader.fail("weighting must be 'period-sur' or 'none'");
        } else if (key == "covariance") {
            if (value == "pcse") model.covariance = CovarianceKind::pcse_period_sur;
            else if (value == "ordinary") model.covariance = CovarianceKind::ordinary;
            else reader.fail("covariance must be 'pcse' or 'ordinary'");
        } else if (key == "output") {
            try {
                cfg.output = parse_output_mode(value);
            } catch (const InputError& e) {
                reader.fail(e.what());
            }
        } else if (key == "horizon_end") cfg.options.horizon_end = parse_year(value);
        else if (key == "dummy") cfg.options.dummy_name = value;
        else if (key == "clusters") {
            if (value == "both") cfg.options.clusters = ClusterChoice::both;
            else if (value == "inclusive") cfg.options.clusters = ClusterChoice::inclusive;
            else if (value == "extractive") cfg.options.clusters = ClusterChoice::extractive;
            else reader.fail("clusters must be 'both', 'inclusive' or 'extractive'");
        } else if (key == "serial_lags") {
            const auto lags = to_int(value);
            if (!lags || *lags < 1) reader.fail("serial_lags must be a positive integer");
            cfg.options.serial_lags = *lags;
        } else reader.fail("unknown key '" + key + "'");
    }

    auto require = [&](bool ok, const char* what) {
        if (!ok) throw InputError(source + ": missing required key '" + what + "'");
    };
    require(!cfg.data_path.empty(), "data");
    require(!cfg.scores_path.empty(), "scores");
    require(!cfg.events_path.empty(), "events");
    require(!model.dependent.empty(), "dependent");
    require(have_sample, "sample");
    try {
        model.validate();
    } catch (const InputError& e) {
        throw InputError(source + ": " + e.what());
    }
    return cfg;
}

RunConfig read_config(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_config(in, path.parent_path(), path.string());
}

}  // namespace panelegls
