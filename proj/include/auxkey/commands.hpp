#pragma once

// Experiment commands behind the CLI. Each one computes everything in memory,
// then writes its CSV outputs and a manifest into the output directory via
// temp-file + rename, so a failed run never leaves partial files.

#include <filesystem>
#include <string>
#include <vector>

#include "auxkey/config.hpp"

namespace auxkey {

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    bool transcript = false;
};

struct CommandResult {
    std::vector<std::filesystem::path> outputs;  // manifest excluded
    std::filesystem::path manifest;
};

/// fig1 and fig2 analytic curves -> curves.csv
CommandResult cmd_analytic(const ScenarioConfig& cfg, const CommandOptions& opts);
/// Monte-Carlo establishment (+ mobility) -> rounds.csv, transcript-<t>.txt
CommandResult cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opts);
/// Node-capture experiment for each configured c -> resilience.csv
CommandResult cmd_resilience(const ScenarioConfig& cfg, const CommandOptions& opts);
/// Preloaded-key and per-handshake primitive counts -> audit.csv
CommandResult cmd_audit(const ScenarioConfig& cfg, const CommandOptions& opts);

/// Six decimal places, '.' separator.
std::string format_fixed(double v);
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace auxkey
