#pragma once

// Line-based scenario configuration:
//
//   # comment
//   n = 5000
//   m = 500
//   boundary = torus
//   captures = 50:500:50      # start:stop:step, or a comma list
//
// Unknown keys and malformed lines are rejected with the line number.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "auxkey/simulation.hpp"

namespace auxkey {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, std::string key = {}, std::size_t line = 0);
    std::string key;
    std::size_t line = 0;
};

struct ScenarioConfig {
    ScenarioParams scenario;
    /// Capture counts for the resilience command.
    std::vector<std::size_t> captures{50, 100, 150, 200, 250, 300, 350, 400, 450, 500};
    /// d series and m/n grid for the analytic command.
    std::vector<double> d_series{20, 40, 60, 80, 100};
    std::vector<double> ratio_grid;

    ScenarioConfig();
    /// Canonical `key = value` rendering; parses back to an equal config.
    std::string to_text() const;
    /// Module preconditions; throws ConfigError naming the offending key.
    void validate() const;
    /// Capture counts must not exceed n; checked by the resilience command.
    void validate_captures() const;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

Boundary parse_boundary(std::string_view s);
std::string to_string(Boundary b);

}  // namespace auxkey
