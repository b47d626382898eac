#pragma once

// Closed-form connectivity, empirical estimators, the node-capture adversary
// and storage audits.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "auxkey/simulation.hpp"

namespace auxkey {

struct NoLinks : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// n regular nodes, m auxiliaries, d mean neighbours per node.
struct ConnectivityParams {
    double n = 0.0;
    double m = 0.0;
    double d = 0.0;
};

/// Probability that a regular responder has an auxiliary in range:
/// p' = 1 - (1 - d/(m+n))^m.
double analytic_p_prime(const ConnectivityParams& params);
/// Direct-phase connectivity over all links: p = (m + n p') / (m + n).
double analytic_p(const ConnectivityParams& params);
/// With one-hop supplemental discovery:
/// p1 = p + (1 - p) (1 - (1 - d/(m+n))^(m d)).
double analytic_p1(const ConnectivityParams& params);

/// Secured links over adjacent (regular, regular) and (regular, auxiliary)
/// pairs, counting only direct-phase Case-1 successes. Throws NoLinks.
double empirical_p(const RoundReport& report);
/// Same accounting with supplemental successes included.
double empirical_p_supplemental(const RoundReport& report);

struct NodePair {
    NodeId a;  // a < b
    NodeId b;
    friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

inline NodePair make_pair_key(NodeId x, NodeId y) { return x < y ? NodePair{x, y} : NodePair{y, x}; }

/// Everything a passive attacker holds after capturing regular nodes.
struct AdversaryKnowledge {
    std::set<NodeId> captured;
    std::map<NodePair, KeyMaterial> learned_keys;
    std::map<NodeId, KeyMaterial> learned_master_keys;
    /// SK is held only by tamper-resistant auxiliaries; capture never yields it.
    bool special_key_known = false;
};

struct ResilienceReport {
    std::size_t c = 0;
    std::uint64_t total_links = 0;
    std::uint64_t compromised_links = 0;
    double fraction = 0.0;
};

/// Samples c distinct regular nodes and copies their stored keys.
AdversaryKnowledge capture_nodes(const Simulation& sim, std::size_t c, Rng& rng);
/// P_e(c): compromised share of keyed links whose endpoints were both spared.
ResilienceReport resilience(const AdversaryKnowledge& knowledge, const Simulation& sim);
/// Keyed links with at least one captured endpoint, all of which are exposed.
/// These are excluded from P_e by definition.
ResilienceReport captured_link_exposure(const AdversaryKnowledge& knowledge, const Simulation& sim);

enum class Figure : std::uint8_t { fig1, fig2, fig3, fig4 };
enum class CurveKind : std::uint8_t { analytic, empirical };

std::string to_string(Figure f);
std::string to_string(CurveKind k);

struct CurvePoint {
    Figure figure = Figure::fig1;
    std::string series;
    double x = 0.0;  // m / n
    double y = 0.0;
    CurveKind kind = CurveKind::analytic;
};

struct SweepGrid {
    std::size_t n = 5000;
    std::vector<double> d_values{20, 40, 60, 80, 100};
    std::vector<double> ratios;  // m / n
    // Simulation-backed figures only.
    double rho = 30.0;
    Boundary boundary = Boundary::torus;
    unsigned hops = 1;
    std::size_t trials = 10;
    std::size_t mobility_rounds = 10;
    double mobility_step_factor = 2.0;
    std::uint64_t seed = 1;
    AuxPlacement placement = AuxPlacement::grid;
};

/// m/n from 0.01 to 0.10 in steps of 0.01.
std::vector<double> default_ratio_grid();

/// fig1: Eq. p per d series. fig2: p1 per d series. fig3: analytic p and
/// trial-mean empirical p from static runs. fig4: trial-mean empirical p per
/// mobility round (series "d=<d>,round=<r>", round 0 is the static layout).
std::vector<CurvePoint> sweep(const SweepGrid& grid, Figure figure);

struct StorageAudit {
    std::size_t regular_nodes = 0;
    std::size_t auxiliary_nodes = 0;
    std::size_t regular_min = 0;
    std::size_t regular_max = 0;
    std::size_t auxiliary_min = 0;
    std::size_t auxiliary_max = 0;
    /// Established keys, tallied apart from the preloaded secrets.
    std::uint64_t session_keys = 0;
};

StorageAudit storage_audit(const Simulation& sim);

}  // namespace auxkey
