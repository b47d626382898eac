#include "auxkey/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "auxkey/analysis.hpp"

namespace auxkey {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Ctx {
    std::string key;
    std::size_t line;
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("line " + std::to_string(line) + ": key '" + key + "': " + why, key, line);
    }
};

std::uint64_t to_u64(std::string_view v, const Ctx& ctx) {
    std::uint64_t out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || p != v.data() + v.size()) ctx.fail("expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

double to_double(std::string_view v, const Ctx& ctx) {
    // std::from_chars for double is missing from older libstdc++.
    std::string s(v);
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        ctx.fail("expected a number, got '" + s + "'");
    }
    if (used != s.size() || !std::isfinite(out)) ctx.fail("expected a number, got '" + s + "'");
    return out;
}

std::vector<double> to_list(std::string_view v, const Ctx& ctx) {
    std::vector<double> out;
    if (v.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        while (true) {
            const auto colon = v.find(':', start);
            parts.push_back(to_double(trim(v.substr(start, colon - start)), ctx));
            if (colon == std::string_view::npos) break;
            start = colon + 1;
        }
        if (parts.size() != 3) ctx.fail("range must be start:stop:step");
        const double lo = parts[0], hi = parts[1], step = parts[2];
        if (!(step > 0.0) || hi < lo) ctx.fail("range needs step > 0 and stop >= start");
        // Index-based stepping keeps 0.01:0.10:0.01 at exactly ten points.
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        const auto item = trim(v.substr(start, comma - start));
        if (item.empty()) ctx.fail("empty list element");
        out.push_back(to_double(item, ctx));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string fmt_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_floating_point_v<T>) {
            s += fmt_number(v[i]);
        } else {
            s += std::to_string(v[i]);
        }
    }
    return s;
}

}  // namespace

ConfigError::ConfigError(const std::string& what, std::string k, std::size_t l)
    : std::runtime_error(what), key(std::move(k)), line(l) {}

ScenarioConfig::ScenarioConfig() : ratio_grid(default_ratio_grid()) {}

Boundary parse_boundary(std::string_view s) {
    if (s == "torus") return Boundary::torus;
    if (s == "bounded") return Boundary::bounded;
    throw ConfigError("boundary must be 'torus' or 'bounded', got '" + std::string(s) + "'", "boundary");
}

std::string to_string(Boundary b) { return b == Boundary::torus ? "torus" : "bounded"; }

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    auto& sc = cfg.scenario;
    using Setter = std::function<void(std::string_view, const Ctx&)>;
    const std::map<std::string, Setter, std::less<>> setters{
        {"n", [&](auto v, auto& c) { sc.n = to_u64(v, c); }},
        {"m", [&](auto v, auto& c) { sc.m = to_u64(v, c); }},
        {"d", [&](auto v, auto& c) { sc.d = to_u64(v, c); }},
        {"rho_m", [&](auto v, auto& c) { sc.rho = to_double(v, c); }},
        {"boundary",
         [&](auto v, auto& c) {
             if (v == "torus") {
                 sc.boundary = Boundary::torus;
             } else if (v == "bounded") {
                 sc.boundary = Boundary::bounded;
             } else {
                 c.fail("expected torus|bounded");
             }
         }},
        {"hops",
         [&](auto v, auto& c) {
             const auto h = to_u64(v, c);
             if (h > 1) c.fail("hops must be 0 or 1");
             sc.hops = static_cast<unsigned>(h);
         }},
        {"mobility_rounds", [&](auto v, auto& c) { sc.mobility_rounds = to_u64(v, c); }},
        {"mobility_step_factor", [&](auto v, auto& c) { sc.mobility_step_factor = to_double(v, c); }},
        {"seed", [&](auto v, auto& c) { sc.seed = to_u64(v, c); }},
        {"trials", [&](auto v, auto& c) { sc.trials = to_u64(v, c); }},
        {"aux_placement",
         [&](auto v, auto& c) {
             if (v == "grid") {
                 sc.placement = AuxPlacement::grid;
             } else if (v == "uniform") {
                 sc.placement = AuxPlacement::uniform;
             } else {
                 c.fail("expected grid|uniform");
             }
         }},
        {"captures",
         [&](auto v, auto& c) {
             cfg.captures.clear();
             for (double x : to_list(v, c)) {
                 if (x < 0.0 || x != std::floor(x)) c.fail("capture counts must be non-negative integers");
                 cfg.captures.push_back(static_cast<std::size_t>(x));
             }
         }},
        {"d_series", [&](auto v, auto& c) { cfg.d_series = to_list(v, c); }},
        {"ratio_grid", [&](auto v, auto& c) { cfg.ratio_grid = to_list(v, c); }},
    };

    std::set<std::string, std::less<>> seen;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", {}, line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const Ctx ctx{std::string(key), line_no};
        if (key.empty()) ctx.fail("missing key");
        auto it = setters.find(key);
        if (it == setters.end()) ctx.fail("unknown key");
        if (!seen.insert(std::string(key)).second) ctx.fail("duplicate key");
        if (value.empty()) ctx.fail("missing value");
        it->second(value, ctx);
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_config(in);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_config(in);
}

void ScenarioConfig::validate() const {
    const auto& s = scenario;
    auto bad = [](const std::string& key, const std::string& why) {
        throw ConfigError("key '" + key + "': " + why, key);
    };
    if (s.n < 1) bad("n", "must be >= 1");
    if (s.d < 1) bad("d", "must be >= 1");
    if (s.d + 1 > s.n + s.m) bad("d", "must not exceed m + n - 1");
    if (!(s.rho > 0.0)) bad("rho_m", "must be > 0");
    if (!(s.mobility_step_factor >= 0.0)) bad("mobility_step_factor", "must be >= 0");
    if (s.trials < 1) bad("trials", "must be >= 1");
    if (d_series.empty()) bad("d_series", "must not be empty");
    for (double d : d_series) {
        if (!(d >= 0.0)) bad("d_series", "values must be >= 0");
    }
    if (ratio_grid.empty()) bad("ratio_grid", "must not be empty");
    for (double r : ratio_grid) {
        if (!(r >= 0.0)) bad("ratio_grid", "values must be >= 0");
    }
}

void ScenarioConfig::validate_captures() const {
    for (auto c : captures) {
        if (c > scenario.n) {
            throw ConfigError("key 'captures': capture count " + std::to_string(c) + " exceeds n = " +
                                  std::to_string(scenario.n),
                              "captures");
        }
    }
}

std::string ScenarioConfig::to_text() const {
    const auto& s = scenario;
    std::ostringstream os;
    os << "n = " << s.n << '\n'
       << "m = " << s.m << '\n'
       << "d = " << s.d << '\n'
       << "rho_m = " << fmt_number(s.rho) << '\n'
       << "boundary = " << to_string(s.boundary) << '\n'
       << "hops = " << s.hops << '\n'
       << "mobility_rounds = " << s.mobility_rounds << '\n'
       << "mobility_step_factor = " << fmt_number(s.mobility_step_factor) << '\n'
       << "seed = " << s.seed << '\n'
       << "trials = " << s.trials << '\n'
       << "aux_placement = " << (s.placement == AuxPlacement::grid ? "grid" : "uniform") << '\n'
       << "captures = " << join(captures) << '\n'
       << "d_series = " << join(d_series) << '\n'
       << "ratio_grid = " << join(ratio_grid) << '\n';
    return os.str();
}

}  // namespace auxkey
