// Command-line front end: replication runs, clustering and crisis dummies.

#include "panelegls/error.hpp"
#include "panelegls/io.hpp"
#include "panelegls/report.hpp"
#include "panelegls/study.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

using namespace panelegls;
namespace fs = std::filesystem;

enum Exit { ok = 0, usage = 1, input_error = 2, estimation_error = 3, internal_error = 4 };

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
    if (!out) throw InputError("failed writing " + path.string());
}

int run_estimate(const std::string& config_path, const std::string& output, const std::string& out_dir) {
    auto cfg = read_config(config_path);
    if (!output.empty()) cfg.output = parse_output_mode(output);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";

    const auto panel = read_panel_csv(cfg.data_path);
    const auto scores = read_scores_csv(cfg.scores_path);
    const auto calendar = read_events_csv(cfg.events_path, cfg.options.horizon_end.value_or(panel.last_year()));
    const auto bundle = replicate(panel, scores, calendar, cfg.options);

    const bool text = cfg.output != OutputMode::json;
    const bool json = cfg.output != OutputMode::text;
    if (out_dir.empty()) {
        if (text) std::cout << render_text(bundle);
        if (json) std::cout << render_json(bundle);
    } else {
        const fs::path dir(out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw InputError("cannot create output directory " + dir.string() + ": " + ec.message());
        if (text) write_file(dir / "report.txt", render_text(bundle));
        if (json) write_file(dir / "report.json", render_json(bundle));
    }
    return ok;
}

int run_cluster(const std::string& scores_path, const std::string& indicator) {
    const auto scores = read_scores_csv(scores_path);
    const auto c = median_cluster(scores, indicator);
    for (const auto& w : c.warnings) std::cerr << w << "\n";
    std::cout << "indicator: " << c.indicator << "\n";
    std::cout << "median: " << format_fixed(c.median) << "\n";
    auto list = [](const char* name, const std::vector<std::string>& members) {
        std::cout << name << " (" << members.size() << "):";
        for (const auto& m : members) std::cout << ' ' << m;
        std::cout << "\n";
    };
    list("inclusive", c.inclusive);
    list("extractive", c.extractive);
    return ok;
}

int run_dummy(const std::string& events_path, Year horizon, std::optional<Year> from) {
    const auto cal = read_events_csv(events_path, horizon);
    const Year first = from ? *from : cal.earliest_start().value_or(horizon);
    if (first > horizon)
        throw InputError("first year " + std::to_string(first) + " is after the horizon " + std::to_string(horizon));
    std::cout << "country,year,dummy\n";
    for (const auto& c : cal.countries())
        for (Year t = first; t <= horizon; ++t) std::cout << c << ',' << t << ',' << crisis_dummy(cal, c, t) << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Panel EGLS estimation and replication tool"};
    app.require_subcommand(1);

    std::string config, output, out_dir;
    auto* estimate = app.add_subcommand("estimate", "Estimate the two-cluster model described by a config file");
    estimate->add_option("--config", config, "Run configuration file")->required();
    estimate->add_option("--output", output, "Report format")->check(CLI::IsMember({"text", "json", "both"}));
    estimate->add_option("--out-dir", out_dir, "Write report.txt / report.json here instead of stdout");

    std::string scores, indicator;
    auto* cluster = app.add_subcommand("cluster", "Split countries at the median institutional score");
    cluster->add_option("--scores", scores, "Scores CSV")->required();
    cluster->add_option("--indicator", indicator, "Indicator name")->required();

    std::string events;
    Year horizon = 0;
    std::optional<Year> from;
    auto* dummy = app.add_subcommand("dummy", "Print the crisis dummy panel");
    dummy->add_option("--events", events, "Events CSV")->required();
    dummy->add_option("--horizon", horizon, "Last year; ongoing episodes run to it")->required();
    dummy->add_option("--from", from, "First year (default: earliest episode start)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : usage;
    }

    try {
        if (*estimate) return run_estimate(config, output, out_dir);
        if (*cluster) return run_cluster(scores, indicator);
        if (*dummy) return run_dummy(events, horizon, from);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return input_error;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return estimation_error;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return internal_error;
    }
    return usage;
}
