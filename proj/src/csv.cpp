#include "panelegls/io.hpp"

#include "panelegls/error.hpp"
#include "text.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace panelegls {

using namespace detail;

Panel parse_panel_csv(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    std::string line;
    if (!reader.next(line)) reader.fail("empty file, expected header 'country,year,...'");
    const auto header = split(line);
    if (header.size() < 3 || header[0] != "country" || header[1] != "year")
        reader.fail("malformed header, expected 'country,year,<var1>,...'");
    std::vector<std::string> vars;
    for (std::size_t i = 2; i < header.size(); ++i) {
        const std::string name(header[i]);
        if (name.empty()) reader.fail("empty variable name in header column " + std::to_string(i + 1));
        if (std::find(vars.begin(), vars.end(), name) != vars.end()) reader.fail("duplicate variable '" + name + "'");
        vars.push_back(name);
    }

    std::vector<PanelRow> rows;
    std::set<std::pair<std::string, Year>> seen;
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto f = split(line);
        if (f.size() != header.size())
            reader.fail("expected " + std::to_string(header.size()) + " fields, found " + std::to_string(f.size()));
        if (f[0].empty()) reader.fail("empty country code");
        const auto year = to_int(f[1]);
        if (!year) reader.fail("year '" + std::string(f[1]) + "' is not an integer");
        if (!seen.emplace(std::string(f[0]), *year).second)
            reader.fail("duplicate row for (" + std::string(f[0]) + ", " + std::to_string(*year) + ")");
        for (std::size_t i = 0; i < vars.size(); ++i) {
            const auto field = f[i + 2];
            std::optional<double> value;
            if (!field.empty()) {
                value = to_double(field);
                if (!value) reader.fail("value '" + std::string(field) + "' for " + vars[i] + " is not numeric");
            }
            rows.push_back({std::string(f[0]), *year, vars[i], value});
        }
    }
    if (rows.empty()) reader.fail("no data rows");
    return build_panel(rows);
}

Panel read_panel_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_panel_csv(in, path.string());
}

ScoreTable parse_scores_csv(std::istream& in, const std::string& source) {
    LineReader reader(in, source);
    std::string line;
    if (!reader.next(line)) reader.fail("empty file, expected header 'country,indicator,score'");
    const bool ranked = line == "country,indicator,score,world_rank,eu_rank";
    if (line != "country,indicator,score" && !ranked)
        reader.fail("malformed header, expected 'country,indicator,score[,world_rank,eu_rank]'");
    const std::size_t width = ranked ? 5 : 3;

    std::vector<ScoreRow> rows;
    std::set<std::pair<std::string, std::string>> seen;
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto f = split(line);
        if (f.size() != width)
            reader.fail("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
        ScoreRow r;
        r.country = std::string(f[0]);
        r.indicator = std::string(f[1]);
        if (r.country.empty() || r.indicator.empty()) reader.fail("empty country or indicator");
        const auto score = to_double(f[2]);
        if (!score) reader.fail("score '" + std::string(f[2]) + "' is not numeric");
        if (*score < kMinScore || *score > kMaxScore) reader.fail("score " + std::string(f[2]) + " outside [1, 7]");
        r.score = *score;
        if (ranked) {
            for (std::size_t i = 3; i < 5; ++i) {
                if (f[i].empty()) continue;
                const auto rank = to_int(f[i]);
                if (!rank || *rank < 1) reader.fail("rank '" + std::string(f[i]) + "' is not a positive integer");
                (i == 3 ? r.world_rank : r.eu_rank) = *rank;
            }
        }
        if (!seen.emplace(r.country, r.indicator).second)
            reader.fail("duplicate score for " + r.country + " (" + r.indicator + ")");
        rows.push_back(std::move(r));
    }
    return ScoreTable::create(std::move(rows));
}

ScoreTable read_scores_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_scores_csv(in, path.string());
}

CrisisCalendar parse_events_csv(std::istream& in, Year horizon_end, const std::string& source) {
    LineReader reader(in, source);
    std::string line;
    if (!reader.next(line)) reader.fail("empty file, expected header 'country,start_year,end_year'");
    const bool tagged = line == "country,start_year,end_year,category";
    if (line != "country,start_year,end_year" && !tagged)
        reader.fail("malformed header, expected 'country,start_year,end_year[,category]'");
    const std::size_t width = tagged ? 4 : 3;

    CrisisCalendar cal(horizon_end);
    while (reader.next(line)) {
        if (blank(line)) continue;
        const auto f = split(line);
        if (f.size() != width)
            reader.fail("expected " + std::to_string(width) + " fields, found " + std::to_string(f.size()));
        const std::string country(f[0]);
        if (country.empty()) reader.fail("empty country code");
        if (f[1].empty() && f[2].empty()) {
            cal.add_country(country);
            continue;
        }
        const auto start = to_int(f[1]);
        if (!start) reader.fail("start year '" + std::string(f[1]) + "' is not an integer");
        CrisisInterval interval{*start, std::nullopt, tagged ? std::string(f[3]) : std::string()};
        if (f[2] != "ongoing") {
            const auto end = to_int(f[2]);
            if (!end) reader.fail("end year '" + std::string(f[2]) + "' is neither an integer nor 'ongoing'");
            if (*end < *start)
                reader.fail("interval " + std::string(f[1]) + "-" + std::string(f[2]) + " for " + country +
                            " ends before it starts");
            interval.end = *end;
        }
        cal.add_interval(country, std::move(interval));
    }
    return cal;
}

CrisisCalendar read_events_csv(const std::filesystem::path& path, Year horizon_end) {
    auto in = open(path);
    return parse_events_csv(in, horizon_end, path.string());
}

ParsedRegressor parse_regressor(std::string_view expr) {
    static const std::regex pattern(R"(([A-Za-z_][A-Za-z0-9_.]*)(?:\(-([0-9]+)\))?)");
    const std::string text(trim(expr));
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        throw InputError("malformed regressor expression '" + std::string(expr) + "'; expected name or name(-k)");
    ParsedRegressor out;
    out.term.variable = m[1].str();
    if (m[2].matched) {
        const auto lag = to_int(m[2].str());
        if (!lag) throw InputError("lag in '" + std::string(expr) + "' is out of range");
        out.term.lag = *lag;
        if (*lag == 0) out.warning = "regressor '" + text + "' has lag 0; treated as '" + out.term.variable + "'";
    }
    return out;
}

}  // namespace panelegls
