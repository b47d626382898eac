// auxkey: scenario runner for the auxiliary-node key establishment simulator.
//
//   auxkey analytic   --config cfg.txt --out results/
//   auxkey simulate   --config cfg.txt --seed 7 --transcript
//   auxkey resilience --config cfg.txt
//   auxkey audit      --config cfg.txt --boundary bounded

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "auxkey/commands.hpp"

namespace {

struct Flags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> boundary;
    std::string out = ".";
    bool transcript = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "Scenario config file (key = value lines)");
    sub->add_option("--seed", f.seed, "Override the config seed");
    sub->add_option("--out", f.out, "Output directory")->capture_default_str();
    sub->add_option("--boundary", f.boundary, "Override boundary mode")
        ->check(CLI::IsMember({"torus", "bounded"}));
    sub->add_flag("--transcript", f.transcript, "Write per-trial message transcripts (simulate)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Auxiliary-node pairwise key establishment simulator"};
    app.require_subcommand(1);
    Flags flags;

    auto* analytic = app.add_subcommand("analytic", "Closed-form connectivity curves (fig1, fig2)");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo establishment and mobility rounds");
    auto* resilience = app.add_subcommand("resilience", "Node-capture resilience per capture count");
    auto* audit = app.add_subcommand("audit", "Storage and per-handshake operation counts");
    for (auto* sub : {analytic, simulate, resilience, audit}) add_common(sub, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        auxkey::ScenarioConfig cfg;
        if (!flags.config.empty()) cfg = auxkey::load_config(flags.config);
        if (flags.seed) cfg.scenario.seed = *flags.seed;
        if (flags.boundary) cfg.scenario.boundary = auxkey::parse_boundary(*flags.boundary);
        cfg.validate();

        const auxkey::CommandOptions opts{flags.out, flags.transcript};
        auxkey::CommandResult result;
        if (analytic->parsed()) {
            result = auxkey::cmd_analytic(cfg, opts);
        } else if (simulate->parsed()) {
            result = auxkey::cmd_simulate(cfg, opts);
        } else if (resilience->parsed()) {
            result = auxkey::cmd_resilience(cfg, opts);
        } else {
            result = auxkey::cmd_audit(cfg, opts);
        }
        for (const auto& p : result.outputs) std::cout << p.string() << '\n';
        return 0;
    } catch (const auxkey::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
