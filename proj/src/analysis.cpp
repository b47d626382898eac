#include "auxkey/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace auxkey {

namespace {

struct Checked {
    double n, m, d, x;
};

Checked check(const ConnectivityParams& p) {
    if (!(p.n >= 0.0) || !(p.m >= 0.0) || !(p.d >= 0.0)) throw InvalidParam("n, m, d must be non-negative");
    const double total = p.m + p.n;
    if (!(total > 0.0)) throw InvalidParam("m + n must be positive");
    if (p.d > total) throw InvalidParam("d must not exceed m + n");
    return {p.n, p.m, p.d, p.d / total};
}

// 1 - (1 - x)^e, evaluated as -expm1(e * log1p(-x)) to keep small-x accuracy.
double one_minus_power(double x, double e) {
    if (e == 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return -std::expm1(e * std::log1p(-x));
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string series_label(double d) {
    return "d=" + std::to_string(static_cast<long long>(std::llround(d)));
}

}  // namespace

double analytic_p_prime(const ConnectivityParams& params) {
    const auto c = check(params);
    return one_minus_power(c.x, c.m);
}

double analytic_p(const ConnectivityParams& params) {
    const auto c = check(params);
    return (c.m + c.n * one_minus_power(c.x, c.m)) / (c.m + c.n);
}

double analytic_p1(const ConnectivityParams& params) {
    const auto c = check(params);
    const double p = (c.m + c.n * one_minus_power(c.x, c.m)) / (c.m + c.n);
    return p + (1.0 - p) * one_minus_power(c.x, c.m * c.d);
}

double empirical_p(const RoundReport& r) {
    const std::uint64_t links = r.reg_reg_pairs + r.reg_aux_pairs;
    if (links == 0) throw NoLinks("no adjacent pairs in round");
    const std::uint64_t secured = r.direct_ok + r.retained + r.case2_ok + r.reg_aux_retained;
    return static_cast<double>(secured) / static_cast<double>(links);
}

double empirical_p_supplemental(const RoundReport& r) {
    const std::uint64_t links = r.reg_reg_pairs + r.reg_aux_pairs;
    if (links == 0) throw NoLinks("no adjacent pairs in round");
    const std::uint64_t secured = r.direct_ok + r.supplemental_ok + r.retained + r.case2_ok + r.reg_aux_retained;
    return static_cast<double>(secured) / static_cast<double>(links);
}

AdversaryKnowledge capture_nodes(const Simulation& sim, std::size_t c, Rng& rng) {
    std::vector<NodeId> pool = sim.regular_ids();
    if (c > pool.size()) {
        throw InvalidParam("cannot capture " + std::to_string(c) + " of " + std::to_string(pool.size()) +
                           " regular nodes");
    }
    AdversaryKnowledge k;
    for (std::size_t i = 0; i < c; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
        const RegularNode& node = sim.regular(pool[i]);
        k.captured.insert(node.id);
        k.learned_master_keys.emplace(node.id, node.master_key);
        for (const auto& [peer, key] : node.pairwise_keys) k.learned_keys[make_pair_key(node.id, peer)] = key;
    }
    return k;
}

ResilienceReport resilience(const AdversaryKnowledge& knowledge, const Simulation& sim) {
    std::unordered_set<KeyMaterial> known;
    for (const auto& [pair, key] : knowledge.learned_keys) known.insert(key);

    // A spared endpoint's master key is never harvested, and SK is never
    // known, so derivation can only succeed through an explicit leak.
    auto derivable = [&](NodeId a, NodeId b) {
        return knowledge.special_key_known || knowledge.learned_master_keys.contains(a) ||
               knowledge.learned_master_keys.contains(b);
    };

    ResilienceReport report;
    report.c = knowledge.captured.size();
    for (const NodeId id : sim.regular_ids()) {
        if (knowledge.captured.contains(id)) continue;
        const RegularNode& node = sim.regular(id);
        for (const auto& [peer, key] : node.pairwise_keys) {
            if (sim.is_regular(peer)) {
                if (peer < id || knowledge.captured.contains(peer)) continue;
                if (sim.regular(peer).key_with(id) != key) continue;
            } else {
                const auto& sessions = sim.auxiliary(peer).session_keys;
                auto it = sessions.find(id);
                if (it == sessions.end() || it->second != key) continue;
            }
            ++report.total_links;
            if (known.contains(key) || derivable(id, peer)) ++report.compromised_links;
        }
    }
    report.fraction = report.total_links == 0
                          ? 0.0
                          : static_cast<double>(report.compromised_links) / static_cast<double>(report.total_links);
    return report;
}

ResilienceReport captured_link_exposure(const AdversaryKnowledge& knowledge, const Simulation& sim) {
    ResilienceReport report;
    report.c = knowledge.captured.size();
    std::set<NodePair> seen;
    for (const NodeId id : knowledge.captured) {
        for (const auto& [peer, key] : sim.regular(id).pairwise_keys) {
            const NodePair pair = make_pair_key(id, peer);
            if (!seen.insert(pair).second) continue;
            ++report.total_links;
            auto it = knowledge.learned_keys.find(pair);
            if (it != knowledge.learned_keys.end() && it->second == key) ++report.compromised_links;
        }
    }
    report.fraction = report.total_links == 0
                          ? 0.0
                          : static_cast<double>(report.compromised_links) / static_cast<double>(report.total_links);
    return report;
}

std::string to_string(Figure f) {
    switch (f) {
        case Figure::fig1: return "fig1";
        case Figure::fig2: return "fig2";
        case Figure::fig3: return "fig3";
        case Figure::fig4: return "fig4";
    }
    return "?";
}

std::string to_string(CurveKind k) { return k == CurveKind::analytic ? "analytic" : "empirical"; }

std::vector<double> default_ratio_grid() {
    std::vector<double> g;
    for (int i = 1; i <= 10; ++i) g.push_back(i / 100.0);
    return g;
}

std::vector<CurvePoint> sweep(const SweepGrid& grid, Figure figure) {
    if (grid.d_values.empty() || grid.ratios.empty()) throw InvalidParam("sweep grid is empty");
    const double n = static_cast<double>(grid.n);
    auto m_for = [&](double ratio) {
        if (!(ratio >= 0.0)) throw InvalidParam("m/n must be non-negative");
        return std::round(ratio * n);
    };

    std::vector<CurvePoint> out;
    if (figure == Figure::fig1 || figure == Figure::fig2) {
        for (double d : grid.d_values) {
            for (double ratio : grid.ratios) {
                const double m = m_for(ratio);
                const ConnectivityParams cp{n, m, d};
                const double y = figure == Figure::fig1 ? analytic_p(cp) : analytic_p1(cp);
                out.push_back({figure, series_label(d), m / n, y, CurveKind::analytic});
            }
        }
        return out;
    }

    const std::size_t rounds = figure == Figure::fig4 ? grid.mobility_rounds : 0;
    std::vector<TrialJob> jobs;
    for (double d : grid.d_values) {
        for (double ratio : grid.ratios) {
            ScenarioParams sp;
            sp.n = grid.n;
            sp.m = static_cast<std::size_t>(m_for(ratio));
            sp.d = static_cast<std::size_t>(std::llround(d));
            sp.rho = grid.rho;
            sp.boundary = grid.boundary;
            sp.hops = grid.hops;
            sp.mobility_rounds = rounds;
            sp.mobility_step_factor = grid.mobility_step_factor;
            sp.seed = grid.seed;
            sp.trials = grid.trials;
            sp.placement = grid.placement;
            sp.validate();
            for (std::size_t t = 0; t < grid.trials; ++t) jobs.push_back({sp, t});
        }
    }
    const auto results = run_trials(jobs);

    std::size_t next = 0;
    for (double d : grid.d_values) {
        for (double ratio : grid.ratios) {
            const double m = m_for(ratio);
            std::vector<std::vector<double>> per_round(rounds + 1);
            for (std::size_t t = 0; t < grid.trials; ++t, ++next) {
                const auto& tr = results[next];
                for (std::size_t r = 0; r <= rounds; ++r) per_round[r].push_back(empirical_p(tr.rounds[r]));
            }
            if (figure == Figure::fig3) {
                out.push_back({figure, series_label(d), m / n, analytic_p({n, m, d}), CurveKind::analytic});
                out.push_back({figure, series_label(d), m / n, mean(per_round[0]), CurveKind::empirical});
            } else {
                for (std::size_t r = 0; r <= rounds; ++r) {
                    out.push_back({figure, series_label(d) + "/round=" + std::to_string(r), m / n,
                                   mean(per_round[r]), CurveKind::empirical});
                }
            }
        }
    }
    return out;
}

StorageAudit storage_audit(const Simulation& sim) {
    StorageAudit a;
    a.regular_min = a.auxiliary_min = std::numeric_limits<std::size_t>::max();
    for (const NodeId id : sim.regular_ids()) {
        const auto& node = sim.regular(id);
        ++a.regular_nodes;
        a.regular_min = std::min(a.regular_min, node.preloaded_secret_count());
        a.regular_max = std::max(a.regular_max, node.preloaded_secret_count());
        a.session_keys += node.pairwise_keys.size();
    }
    for (const NodeId id : sim.auxiliary_ids()) {
        const auto& node = sim.auxiliary(id);
        ++a.auxiliary_nodes;
        a.auxiliary_min = std::min(a.auxiliary_min, node.preloaded_secret_count());
        a.auxiliary_max = std::max(a.auxiliary_max, node.preloaded_secret_count());
        a.session_keys += node.session_keys.size();
    }
    if (a.regular_nodes == 0) a.regular_min = 0;
    if (a.auxiliary_nodes == 0) a.auxiliary_min = 0;
    return a;
}

}  // namespace auxkey
