#include "auxkey/commands.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "auxkey/analysis.hpp"

#ifndef AUXKEY_VERSION
#define AUXKEY_VERSION "unknown"
#endif

namespace auxkey {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

// Root of the per-(trial, c) capture streams; disjoint from simulation streams.
constexpr std::uint64_t kCaptureStreamBase = 0x1000;

struct Output {
    std::string name;
    std::string content;
};

CommandResult finish(const std::string& command, const ScenarioConfig& cfg, const CommandOptions& opts,
                     const std::vector<Output>& files, Clock::time_point started) {
    fs::create_directories(opts.out_dir);
    CommandResult result;
    for (const auto& f : files) {
        const fs::path p = opts.out_dir / f.name;
        write_file_atomic(p, f.content);
        result.outputs.push_back(p);
    }

    nlohmann::ordered_json manifest;
    manifest["command"] = command;
    manifest["version"] = AUXKEY_VERSION;
    manifest["seed"] = cfg.scenario.seed;
    manifest["config"] = cfg.to_text();
    manifest["outputs"] = nlohmann::json::array();
    for (const auto& f : files) manifest["outputs"].push_back(f.name);
    manifest["transcript"] = opts.transcript;
    manifest["wall_clock_seconds"] = std::chrono::duration<double>(Clock::now() - started).count();

    result.manifest = opts.out_dir / "manifest.json";
    write_file_atomic(result.manifest, manifest.dump(2) + "\n");
    return result;
}

std::string ops_rows(const std::string& role, const OpCounts& ops, std::uint64_t handshakes) {
    auto per = [&](std::uint64_t v) {
        return handshakes == 0 ? format_fixed(0.0)
                               : format_fixed(static_cast<double>(v) / static_cast<double>(handshakes));
    };
    std::string s;
    s += role + ",prf_per_handshake," + per(ops.prf) + "\n";
    s += role + ",mac_per_handshake," + per(ops.mac) + "\n";
    s += role + ",encrypt_per_handshake," + per(ops.encrypt) + "\n";
    s += role + ",decrypt_per_handshake," + per(ops.decrypt) + "\n";
    return s;
}

}  // namespace

std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

CommandResult cmd_analytic(const ScenarioConfig& cfg, const CommandOptions& opts) {
    const auto started = Clock::now();
    cfg.validate();
    SweepGrid grid;
    grid.n = cfg.scenario.n;
    grid.d_values = cfg.d_series;
    grid.ratios = cfg.ratio_grid;

    std::string csv = "figure,series,x,y,kind\n";
    for (Figure f : {Figure::fig1, Figure::fig2}) {
        for (const auto& pt : sweep(grid, f)) {
            csv += to_string(pt.figure) + "," + pt.series + "," + format_fixed(pt.x) + "," + format_fixed(pt.y) +
                   "," + to_string(pt.kind) + "\n";
        }
    }
    return finish("analytic", cfg, opts, {{"curves.csv", csv}}, started);
}

CommandResult cmd_simulate(const ScenarioConfig& cfg, const CommandOptions& opts) {
    const auto started = Clock::now();
    cfg.validate();
    const auto jobs = make_jobs(cfg.scenario);

    std::vector<TrialResult> results;
    std::vector<Output> files;
    if (opts.transcript) {
        // Transcripts are buffered per trial; run serially to bound memory.
        for (const auto& job : jobs) {
            std::ostringstream tx;
            results.push_back(run_trial(job.params, job.trial, &tx));
            files.push_back({"transcript-" + std::to_string(job.trial) + ".txt", tx.str()});
        }
    } else {
        results = run_trials(jobs);
    }

    std::string csv = "trial,round,attempted,direct_ok,supplemental_ok,failed,empirical_p\n";
    auto row = [&csv](const std::string& trial, std::size_t round, const RoundReport& r, double p) {
        csv += trial + "," + std::to_string(round) + "," + std::to_string(r.attempted) + "," +
               std::to_string(r.direct_ok) + "," + std::to_string(r.supplemental_ok) + "," +
               std::to_string(r.failed) + "," + format_fixed(p) + "\n";
    };
    for (const auto& tr : results) {
        for (const auto& r : tr.rounds) row(std::to_string(tr.trial), r.round, r, empirical_p(r));
    }
    const std::size_t rounds = cfg.scenario.mobility_rounds + 1;
    for (std::size_t k = 0; k < rounds; ++k) {
        RoundReport sum;
        double p = 0.0;
        for (const auto& tr : results) {
            const auto& r = tr.rounds[k];
            sum.attempted += r.attempted;
            sum.direct_ok += r.direct_ok;
            sum.supplemental_ok += r.supplemental_ok;
            sum.failed += r.failed;
            p += empirical_p(r);
        }
        row("all", k, sum, p / static_cast<double>(results.size()));
    }
    files.insert(files.begin(), Output{"rounds.csv", csv});
    return finish("simulate", cfg, opts, files, started);
}

CommandResult cmd_resilience(const ScenarioConfig& cfg, const CommandOptions& opts) {
    const auto started = Clock::now();
    cfg.validate();
    cfg.validate_captures();
    std::vector<ResilienceReport> totals(cfg.captures.size());
    for (std::size_t t = 0; t < cfg.scenario.trials; ++t) {
        Simulation sim(cfg.scenario, t);
        sim.run_establishment_round(Rekey::missing);
        for (std::size_t r = 0; r < cfg.scenario.mobility_rounds; ++r) {
            sim.mobility_round();
            sim.run_establishment_round(Rekey::all);
        }
        for (std::size_t i = 0; i < cfg.captures.size(); ++i) {
            const std::size_t c = cfg.captures[i];
            Rng rng = Rng(cfg.scenario.seed, t).derive(kCaptureStreamBase + c);
            const auto rep = resilience(capture_nodes(sim, c, rng), sim);
            totals[i].total_links += rep.total_links;
            totals[i].compromised_links += rep.compromised_links;
        }
    }
    std::string csv = "c,total_links,compromised_links,fraction\n";
    for (std::size_t i = 0; i < totals.size(); ++i) {
        const auto& tot = totals[i];
        const double fraction = tot.total_links == 0 ? 0.0
                                                     : static_cast<double>(tot.compromised_links) /
                                                           static_cast<double>(tot.total_links);
        csv += std::to_string(cfg.captures[i]) + "," + std::to_string(tot.total_links) + "," +
               std::to_string(tot.compromised_links) + "," + format_fixed(fraction) + "\n";
    }
    return finish("resilience", cfg, opts, {{"resilience.csv", csv}}, started);
}

CommandResult cmd_audit(const ScenarioConfig& cfg, const CommandOptions& opts) {
    const auto started = Clock::now();
    cfg.validate();
    Simulation sim(cfg.scenario, 0);
    const RoundReport rep = sim.run_establishment_round(Rekey::missing);
    const StorageAudit storage = storage_audit(sim);
    const std::uint64_t case1 = rep.direct_ok + rep.supplemental_ok;

    std::string csv = "role,metric,value\n";
    csv += "regular,nodes," + std::to_string(storage.regular_nodes) + "\n";
    csv += "regular,preloaded_keys_min," + std::to_string(storage.regular_min) + "\n";
    csv += "regular,preloaded_keys_max," + std::to_string(storage.regular_max) + "\n";
    csv += "auxiliary,nodes," + std::to_string(storage.auxiliary_nodes) + "\n";
    csv += "auxiliary,preloaded_keys_min," + std::to_string(storage.auxiliary_min) + "\n";
    csv += "auxiliary,preloaded_keys_max," + std::to_string(storage.auxiliary_max) + "\n";
    csv += "all,session_keys," + std::to_string(storage.session_keys) + "\n";
    csv += "case1,handshakes," + std::to_string(case1) + "\n";
    csv += ops_rows("case1_initiator", rep.ops.initiator, case1);
    csv += ops_rows("case1_responder", rep.ops.responder, case1);
    csv += ops_rows("case1_auxiliary", rep.ops.case1_auxiliary, case1);
    csv += "case2,handshakes," + std::to_string(rep.case2_ok) + "\n";
    csv += ops_rows("case2_regular", rep.ops.case2_regular, rep.case2_ok);
    csv += ops_rows("case2_auxiliary", rep.ops.case2_auxiliary, rep.case2_ok);
    return finish("audit", cfg, opts, {{"audit.csv", csv}}, started);
}

}  // namespace auxkey
