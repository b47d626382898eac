// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Indented lines are measurements backing the verdict.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "../fixtures.hpp"
#include "../test_support.hpp"
#include "auxkey/analysis.hpp"
#include "auxkey/protocol.hpp"

using namespace auxkey;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void note(const std::string& line) { std::cout << "    " << line << std::endl; }

int failures = 0;

void verdict(int id, const std::string& name, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << id << " (" << name << "): " << detail << std::endl;
}

void guarded(int id, const std::string& name, const std::function<void()>& body) {
    try {
        body();
    } catch (const std::exception& e) {
        verdict(id, name, false, std::string("exception: ") + e.what());
    }
}

// --- 1 ---------------------------------------------------------------------

void formula_fidelity() {
    const auto t0 = Clock::now();
    const auto rows = testing::read_csv(std::string(AUXKEY_TEST_DATA_DIR) + "/analytic_oracle.csv");
    if (rows.size() < 2) throw std::runtime_error("oracle table missing");
    double worst = 0.0;
    std::set<std::pair<double, double>> grid_points;
    std::size_t evaluations = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const ConnectivityParams c{std::stod(r[0]), std::stod(r[1]), std::stod(r[2])};
        const double got[3] = {analytic_p_prime(c), analytic_p(c), analytic_p1(c)};
        for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(got[k] - std::stod(r[3 + k])));
        evaluations += 3;
        if (c.n == 5000 && std::fmod(c.d, 20.0) == 0.0 && c.d >= 20 && c.d <= 100 && std::fmod(c.m, 50.0) == 0.0 &&
            c.m >= 50 && c.m <= 500) {
            grid_points.insert({c.m, c.d});
        }
    }
    const double elapsed = seconds_since(t0);
    const bool pass = worst <= 1e-12 && grid_points.size() == 50 && elapsed < 1.0;
    verdict(1, "formula fidelity", pass,
            "max |delta| = " + sci(worst) + " over " + std::to_string(evaluations) + " evaluations (" +
                std::to_string(grid_points.size()) + " grid points), " + fixed(elapsed, 4) + " s");
}

// --- 2, 3 ------------------------------------------------------------------

SweepGrid figure_grid() {
    SweepGrid g;
    g.n = 5000;
    g.d_values = {80};
    g.ratios = default_ratio_grid();
    g.rho = 30.0;
    g.boundary = Boundary::torus;
    g.trials = 10;
    g.mobility_rounds = 10;
    g.mobility_step_factor = 2.0;
    g.seed = 1;
    return g;
}

struct StaticCurve {
    std::map<long, double> analytic;
    std::map<long, double> empirical;
};

StaticCurve static_curve(const SweepGrid& g) {
    StaticCurve c;
    for (const auto& pt : sweep(g, Figure::fig3)) {
        const long m = std::lround(pt.x * static_cast<double>(g.n));
        (pt.kind == CurveKind::analytic ? c.analytic : c.empirical)[m] = pt.y;
    }
    return c;
}

StaticCurve fig3_grid_placement;

void static_reproduction() {
    const SweepGrid g = figure_grid();
    const auto t0 = Clock::now();
    fig3_grid_placement = static_curve(g);
    const double elapsed = seconds_since(t0);

    double worst = 0.0;
    long worst_m = 0;
    std::size_t within = 0;
    for (const auto& [m, emp] : fig3_grid_placement.empirical) {
        const double gap = std::abs(emp - fig3_grid_placement.analytic.at(m));
        if (gap <= 0.02) ++within;
        if (gap > worst) {
            worst = gap;
            worst_m = m;
        }
        note("m=" + std::to_string(m) + "  empirical " + fixed(emp) + "  analytic " +
             fixed(fig3_grid_placement.analytic.at(m)) + "  |delta| " + fixed(gap));
    }
    const bool pass = within == fig3_grid_placement.empirical.size() && within == 10;
    verdict(2, "static connectivity vs closed form", pass,
            std::to_string(within) + "/10 m values within 0.02; worst |delta| = " + fixed(worst) + " at m=" +
                std::to_string(worst_m) + "; " + std::to_string(g.trials) + " trials per m, " + fixed(elapsed, 1) +
                " s (target < 300 s)");

    // Not a criterion: the same runs with independently placed auxiliaries,
    // which is the placement the closed form assumes.
    SweepGrid u = g;
    u.placement = AuxPlacement::uniform;
    const StaticCurve uniform = static_curve(u);
    double uworst = 0.0;
    for (const auto& [m, emp] : uniform.empirical) uworst = std::max(uworst, std::abs(emp - uniform.analytic.at(m)));
    std::cout << "INFO  uniform auxiliary placement: max |empirical - closed form| = " << fixed(uworst)
              << " over m = 50..500" << std::endl;
}

void mobile_reproduction() {
    const SweepGrid g = figure_grid();
    const auto t0 = Clock::now();
    const auto points = sweep(g, Figure::fig4);
    const double elapsed = seconds_since(t0);

    // Series are "d=80/round=r"; x groups the rounds of one m.
    std::map<long, std::map<std::size_t, double>> by_m;
    for (const auto& pt : points) {
        const long m = std::lround(pt.x * static_cast<double>(g.n));
        const std::size_t round = std::stoul(pt.series.substr(pt.series.rfind('=') + 1));
        by_m[m][round] = pt.y;
    }
    double worst = 0.0;
    long worst_m = 0;
    std::size_t ok_m = 0;
    bool static_matches = true;
    for (const auto& [m, rounds] : by_m) {
        const double base = rounds.at(0);
        if (fig3_grid_placement.empirical.count(m) && fig3_grid_placement.empirical.at(m) != base) {
            static_matches = false;
        }
        double local = 0.0;
        for (const auto& [r, y] : rounds) local = std::max(local, std::abs(y - base));
        if (local <= 0.05 && rounds.size() == g.mobility_rounds + 1) ++ok_m;
        if (local >= worst) {
            worst = local;
            worst_m = m;
        }
        double lo = 1.0;
        double hi = 0.0;
        for (const auto& [r, y] : rounds) {
            if (r == 0) continue;
            lo = std::min(lo, y);
            hi = std::max(hi, y);
        }
        note("m=" + std::to_string(m) + "  static " + fixed(base) + "  rounds 1-10 in [" + fixed(lo) + ", " +
             fixed(hi) + "]  max |delta| " + fixed(local));
    }
    const bool pass = ok_m == 10 && by_m.size() == 10 && static_matches;
    verdict(3, "connectivity under mobility", pass,
            std::to_string(ok_m) + "/10 m values with every round within 0.05 of static; worst = " + fixed(worst) +
                " at m=" + std::to_string(worst_m) + "; round 0 reproduces the static run: " +
                (static_matches ? "yes" : "no") + "; " + fixed(elapsed, 1) + " s");
}

// --- 4 ---------------------------------------------------------------------

void qualitative_claims() {
    SweepGrid g;
    g.ratios = default_ratio_grid();
    const auto f1 = sweep(g, Figure::fig1);
    const auto f2 = sweep(g, Figure::fig2);
    std::map<std::string, std::vector<double>> p_by_d;
    for (const auto& pt : f1) p_by_d[pt.series].push_back(pt.y);
    std::size_t dominance_violations = 0;
    const auto& lo = p_by_d.at("d=20");
    const auto& hi = p_by_d.at("d=100");
    for (std::size_t i = 0; i < lo.size(); ++i) dominance_violations += hi[i] < lo[i] ? 1 : 0;
    std::size_t boost_violations = 0;
    for (std::size_t i = 0; i < f1.size(); ++i) boost_violations += f2[i].y < f1[i].y ? 1 : 0;
    const bool pass = dominance_violations == 0 && boost_violations == 0 && lo.size() == 10 && f1.size() == 50 &&
                      f2.size() == 50;
    verdict(4, "closed-form curve ordering", pass,
            "d=100 below d=20 at " + std::to_string(dominance_violations) + "/" + std::to_string(lo.size()) +
                " points; supplemental below direct at " + std::to_string(boost_violations) + "/" +
                std::to_string(f1.size()) + " points");
}

// --- 5 ---------------------------------------------------------------------

void capture_resilience() {
    std::size_t runs = 0;
    std::size_t clean = 0;
    std::uint64_t links = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioParams p;
        p.seed = seed;
        Simulation sim(p, 0);
        sim.run_establishment_round();
        for (std::size_t c = 50; c <= 500; c += 50) {
            Rng rng = Rng(seed, 0).derive(0x1000 + c);
            const ResilienceReport r = resilience(capture_nodes(sim, c, rng), sim);
            ++runs;
            links += r.total_links;
            if (r.compromised_links == 0 && r.fraction == 0.0 && r.total_links > 0) ++clean;
        }
    }
    verdict(5, "node-capture resilience", runs == 50 && clean == runs,
            std::to_string(clean) + "/" + std::to_string(runs) + " (seed, c) runs with zero compromised links; " +
                std::to_string(links) + " spared links examined");
}

// --- 6 ---------------------------------------------------------------------

void protocol_properties() {
    Rng rng(20240601);
    SetupServer server(rng);
    AuxiliaryNode aux = server.provision_auxiliary(NodeId{rng.next()});
    const std::uint64_t aux_print = aux.fingerprint();

    std::size_t agreed = 0;
    std::size_t responder_cost_ok = 0;
    std::size_t aux_unchanged = 0;
    std::size_t preload_ok = aux.preloaded_secret_count() == 1 ? 1 : 0;
    std::size_t nodes = 1;
    std::vector<AuxRequest> valid_requests;

    auto fresh_regular = [&]() {
        NodeId id{rng.next()};
        while (server.is_issued(id)) id = NodeId{rng.next()};
        RegularNode n = server.provision_regular(id);
        ++nodes;
        preload_ok += n.preloaded_secret_count() == 1 ? 1 : 0;
        return n;
    };

    for (int i = 0; i < 1000; ++i) {
        RegularNode u = fresh_regular();
        RegularNode v = fresh_regular();
        const InitRequest init = initiate(u, v.id, rng);

        OpCounts mark = thread_op_counts();
        const AuxRequest request = handle_init(v, init, rng);
        OpCounts responder = thread_op_counts() - mark;

        KeyMaterial issued;
        const AuxReply reply = aux_handle(aux, request, rng, &issued);
        aux_unchanged += aux.fingerprint() == aux_print ? 1 : 0;

        mark = thread_op_counts();
        const ForwardKey forward = responder_handle_reply(v, reply, u.id);
        responder += thread_op_counts() - mark;

        const KeyMaterial k_u = initiator_handle_forward(u, forward, v.id);
        if (k_u == issued && v.key_with(u.id) == issued && u.key_with(v.id) == issued) ++agreed;
        if (responder.mac == 1 && responder.decrypt == 1) ++responder_cost_ok;
        valid_requests.push_back(request);
    }

    std::size_t rejected = 0;
    const KeyMaterial attacker = random_key(rng);
    for (int i = 0; i < 1000; ++i) {
        AuxRequest forged = valid_requests[static_cast<std::size_t>(i)];
        if (i % 2 == 0) {
            const auto bit = rng.below(kTagLen * 8);
            forged.tag.bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        } else {
            forged.tag = mac(attacker, forged.authenticated_bytes());
        }
        try {
            aux_handle(aux, forged, rng);
        } catch (const AuthError&) {
            ++rejected;
        }
        aux_unchanged += aux.fingerprint() == aux_print ? 1 : 0;
    }

    const bool pass = agreed == 1000 && rejected == 1000 && aux_unchanged == 2000 && preload_ok == nodes &&
                      responder_cost_ok == 1000;
    verdict(6, "protocol properties", pass,
            "key agreement " + std::to_string(agreed) + "/1000, forged requests rejected " +
                std::to_string(rejected) + "/1000, auxiliary state unchanged " + std::to_string(aux_unchanged) +
                "/2000, single preloaded secret " + std::to_string(preload_ok) + "/" + std::to_string(nodes) +
                ", responder at 1 MAC + 1 decryption " + std::to_string(responder_cost_ok) + "/1000");
}

// --- 7 ---------------------------------------------------------------------

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AUXKEY_CLI_PATH) + " " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void simulate_determinism() {
    const fs::path dir = fs::temp_directory_path() / ("auxkey-acceptance-" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "small.cfg") << "n = 1000\nm = 100\nd = 20\ntrials = 2\nmobility_rounds = 2\n";
    std::ofstream(dir / "full.cfg") << "trials = 2\n";

    std::size_t compared = 0;
    std::size_t identical = 0;
    std::uint64_t bytes = 0;
    auto compare = [&](const std::string& cfg, const std::string& flags, std::vector<std::string> files) {
        for (const char* run : {"a", "b"}) {
            const fs::path out = dir / (cfg + "-" + run);
            if (run_cli("simulate --config " + (dir / (cfg + ".cfg")).string() + " --seed 11 " + flags + " --out " +
                        out.string()) != 0) {
                throw std::runtime_error("simulate exited with an error");
            }
        }
        for (const auto& f : files) {
            const std::string a = testing::slurp((dir / (cfg + "-a") / f).string());
            const std::string b = testing::slurp((dir / (cfg + "-b") / f).string());
            ++compared;
            if (!a.empty() && a == b) ++identical;
            bytes += a.size();
        }
    };
    compare("small", "--transcript", {"rounds.csv", "transcript-0.txt", "transcript-1.txt"});
    compare("full", "", {"rounds.csv"});
    fs::remove_all(dir);
    verdict(7, "simulate determinism", compared == 4 && identical == compared,
            std::to_string(identical) + "/" + std::to_string(compared) +
                " output files byte-identical across two CLI runs (" + std::to_string(bytes) + " bytes compared)");
}

// --- 8 ---------------------------------------------------------------------

void small_instance_oracle() {
    const auto pts = testing::hundred_node_points();
    std::size_t rows_ok = 0;
    std::size_t rows = 0;
    std::size_t edges = 0;
    for (auto mode : {Boundary::torus, Boundary::bounded}) {
        const FieldGeometry f = make_field(150.0, 30.0, mode);
        const Topology t = build_topology(pts, f);
        edges += t.edge_count();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            std::vector<std::uint32_t> brute;
            for (std::size_t j = 0; j < pts.size(); ++j) {
                double dx = std::abs(pts[i].x - pts[j].x);
                double dy = std::abs(pts[i].y - pts[j].y);
                if (mode == Boundary::torus) {
                    dx = std::min(dx, 150.0 - dx);
                    dy = std::min(dy, 150.0 - dy);
                }
                if (i != j && dx * dx + dy * dy <= 900.0) brute.push_back(static_cast<std::uint32_t>(j));
            }
            const auto row = t.neighbors(i);
            ++rows;
            if (std::vector<std::uint32_t>(row.begin(), row.end()) == brute) ++rows_ok;
        }
    }

    Simulation sim = testing::make_sim(testing::five_node_layout());
    const RoundReport r = sim.run_establishment_round();
    std::size_t keys = 0;
    for (NodeId u : sim.regular_ids()) {
        for (NodeId w : sim.neighbors(u)) {
            const auto k = sim.regular(u).key_with(w);
            if (!k) continue;
            if (sim.is_auxiliary(w)) {
                keys += sim.auxiliary(w).session_keys.at(u) == *k ? 1 : 0;
            } else if (u < w) {
                keys += sim.regular(w).key_with(u) == k ? 1 : 0;
            }
        }
    }
    const bool pass = rows_ok == rows && rows == 200 && keys == 10 && r.direct_ok == 6 && r.case2_ok == 4 &&
                      r.supplemental_ok == 0 && r.failed == 0;
    verdict(8, "small-instance oracle", pass,
            "100-node adjacency rows matching brute force " + std::to_string(rows_ok) + "/" + std::to_string(rows) +
                " (torus and bounded, " + std::to_string(edges) + " edges); 5-node fixture keys " +
                std::to_string(keys) + "/10 (" + std::to_string(r.direct_ok) + " Case-1 direct, " +
                std::to_string(r.case2_ok) + " Case-2)");
}

}  // namespace

int main() {
    const auto t0 = Clock::now();
    guarded(1, "formula fidelity", formula_fidelity);
    guarded(2, "static connectivity vs closed form", static_reproduction);
    guarded(3, "connectivity under mobility", mobile_reproduction);
    guarded(4, "closed-form curve ordering", qualitative_claims);
    guarded(5, "node-capture resilience", capture_resilience);
    guarded(6, "protocol properties", protocol_properties);
    guarded(7, "simulate determinism", simulate_determinism);
    guarded(8, "small-instance oracle", small_instance_oracle);
    std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criterion(s) FAILED") << " in "
              << fixed(seconds_since(t0), 1) << " s" << std::endl;
    return failures == 0 ? 0 : 1;
}
