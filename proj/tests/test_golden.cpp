#include "panelegls/io.hpp"
#include "panelegls/report.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace panelegls;
using nlohmann::json;

namespace {

const std::filesystem::path kData = PANELEGLS_TEST_DATA;
const std::filesystem::path kGolden = PANELEGLS_TEST_GOLDEN;
const std::string kCli = PANELEGLS_CLI;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ReportBundle golden_bundle() {
    const auto cfg = read_config(kData / "golden.conf");
    const auto panel = read_panel_csv(cfg.data_path);
    return replicate(panel, read_scores_csv(cfg.scores_path), read_events_csv(cfg.events_path, panel.last_year()),
                     cfg.options);
}

struct Mismatch {
    std::string path;
    std::string detail;
};

// Every field of `expected` must be present in `actual`; numbers agree to a relative 1e-9.
void compare(const json& expected, const json& actual, const std::string& path, std::vector<Mismatch>& out) {
    if (expected.is_number()) {
        if (!actual.is_number()) {
            out.push_back({path, "not a number"});
            return;
        }
        const double a = expected.get<double>(), b = actual.get<double>();
        if (std::fabs(a - b) > 1e-9 * std::max(std::fabs(a), std::fabs(b)) + 1e-13)
            out.push_back({path, std::to_string(a) + " vs " + std::to_string(b)});
    } else if (expected.is_object()) {
        for (const auto& [k, v] : expected.items()) {
            if (!actual.is_object() || !actual.contains(k)) out.push_back({path + "." + k, "missing"});
            else compare(v, actual[k], path + "." + k, out);
        }
    } else if (expected.is_array()) {
        if (!actual.is_array() || actual.size() != expected.size()) {
            out.push_back({path, "array size differs"});
            return;
        }
        for (std::size_t i = 0; i < expected.size(); ++i) compare(expected[i], actual[i], path + "[" + std::to_string(i) + "]", out);
    } else if (expected != actual) {
        out.push_back({path, expected.dump() + " vs " + actual.dump()});
    }
}

int run(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("golden: library agrees with the independent oracle") {
    const auto expected = json::parse(slurp(kGolden / "expected.json"));
    const auto actual = to_json(golden_bundle());
    std::vector<Mismatch> bad;
    compare(expected, actual, "$", bad);
    for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i)
        MESSAGE(bad[i].path << ": " << bad[i].detail);
    CHECK(bad.empty());
}

TEST_CASE("golden: library reproduces the frozen reports") {
    const auto bundle = golden_bundle();
    CHECK(render_text(bundle) == slurp(kGolden / "report.txt"));
    CHECK(render_json(bundle) == slurp(kGolden / "report.json"));
}

TEST_CASE("golden: CLI output is byte-identical") {
    const auto dir = std::filesystem::temp_directory_path() / "panelegls_golden_test";
    std::filesystem::remove_all(dir);
    REQUIRE(run("estimate --config \"" + (kData / "golden.conf").string() + "\" --output both --out-dir \"" +
                dir.string() + "\"") == 0);
    CHECK(slurp(dir / "report.txt") == slurp(kGolden / "report.txt"));
    CHECK(slurp(dir / "report.json") == slurp(kGolden / "report.json"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("CLI exit codes") {
    CHECK(run("") == 1);
    CHECK(run("estimate") == 1);
    CHECK(run("estimate --config \"" + (kData / "golden.conf").string() + "\" --output xml") == 1);
    CHECK(run("estimate --config /nonexistent/x.conf") == 2);
    CHECK(run("cluster --scores \"" + (kData / "institution_scores.csv").string() + "\" --indicator Institutions") == 0);
    CHECK(run("cluster --scores \"" + (kData / "institution_scores.csv").string() + "\" --indicator Nope") == 2);
    CHECK(run("dummy --events \"" + (kData / "crisis_events.csv").string() + "\" --horizon 2017") == 0);
    CHECK(run("--help") == 0);
}

TEST_CASE("CLI: estimation failure maps to exit code 3") {
    // T > N within each cluster makes the period covariance singular.
    const auto dir = std::filesystem::temp_directory_path() / "panelegls_exit3_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream panel(dir / "panel.csv");
        panel << "country,year,y,x\n";
        for (const char* c : {"AA", "BB", "CC", "DD"})
            for (int t = 2000; t < 2010; ++t) panel << c << "," << t << "," << (t % 3) + c[0] * 0.01 + (t * 7 % 5) << "," << (t * 13 % 7) << "\n";
        std::ofstream scores(dir / "scores.csv");
        scores << "country,indicator,score\nAA,I,6\nBB,I,5\nCC,I,3\nDD,I,2\n";
        std::ofstream events(dir / "events.csv");
        events << "country,start_year,end_year\nAA,,\nBB,,\nCC,,\nDD,,\n";
        std::ofstream conf(dir / "run.conf");
        conf << "data = panel.csv\nscores = scores.csv\nevents = events.csv\nindicator = I\ndependent = y\n"
                "regressor = x\nsample = 2000 2009\n";
    }
    CHECK(run("estimate --config \"" + (dir / "run.conf").string() + "\"") == 3);
    std::filesystem::remove_all(dir);
}
