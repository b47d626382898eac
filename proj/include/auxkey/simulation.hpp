#pragma once

// Deterministic establishment engine: deploys and provisions a network, runs
// Case-1 / Case-2 handshakes over reliable in-order delivery, moves regular
// nodes between rounds, and reports per-round counts.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "auxkey/netsim.hpp"
#include "auxkey/protocol.hpp"

namespace auxkey {

enum class AuxPlacement : std::uint8_t { grid, uniform };

struct ScenarioParams {
    std::size_t n = 5000;
    std::size_t m = 500;
    std::size_t d = 80;
    double rho = 30.0;
    Boundary boundary = Boundary::torus;
    unsigned hops = 1;
    std::size_t mobility_rounds = 0;
    double mobility_step_factor = 2.0;
    std::uint64_t seed = 1;
    std::size_t trials = 1;
    AuxPlacement placement = AuxPlacement::grid;

    /// Throws InvalidParam on any violated precondition.
    void validate() const;
};

/// What happens to keys already held when a round starts.
enum class Rekey : std::uint8_t {
    missing,  // only adjacent pairs without a key run a handshake
    all,      // session keys are dropped and every adjacent pair re-runs
};

/// Primitive invocations, summed over completed handshakes, per role.
struct RoleOps {
    OpCounts initiator;
    OpCounts responder;
    OpCounts case1_auxiliary;
    OpCounts case2_regular;
    OpCounts case2_auxiliary;
    friend bool operator==(const RoleOps&, const RoleOps&) = default;
};

struct RoundReport {
    std::size_t trial = 0;
    std::size_t round = 0;
    std::uint64_t reg_reg_pairs = 0;
    std::uint64_t reg_aux_pairs = 0;
    // Case 1: attempted == direct_ok + supplemental_ok + failed.
    std::uint64_t attempted = 0;
    std::uint64_t direct_ok = 0;
    std::uint64_t supplemental_ok = 0;
    std::uint64_t failed = 0;
    /// Regular pairs skipped under Rekey::missing because a key already exists.
    std::uint64_t retained = 0;
    std::uint64_t case2_ok = 0;
    std::uint64_t reg_aux_retained = 0;
    std::uint64_t messages = 0;
    RoleOps ops;
    friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

class Simulation {
public:
    /// Random deployment per the scenario, seeded from (seed, trial).
    Simulation(const ScenarioParams& params, std::size_t trial);
    /// Explicit placement. Regular ids are 0..n-1, auxiliary ids follow.
    Simulation(const FieldGeometry& field, std::span<const Point> regular, std::span<const Point> aux,
               std::uint64_t seed, unsigned hops = 1);

    RoundReport run_establishment_round(Rekey rekey = Rekey::missing);
    /// Moves every regular node; auxiliaries stay put.
    void mobility_round();

    NodeId add_regular_node(Point where);
    NodeId add_auxiliary_node(Point where);

    /// Protocol messages are written as `src,dst,round,<hex>` lines.
    void set_transcript(std::ostream* out) { transcript_ = out; }

    const Network& network() const { return net_; }
    const SetupServer& server() const { return server_; }
    std::size_t trial() const { return trial_; }
    std::size_t rounds_run() const { return rounds_run_; }
    double mobility_step() const { return step_; }
    void set_mobility_step(double step) { step_ = step; }

    bool is_regular(NodeId id) const;
    bool is_auxiliary(NodeId id) const;
    RegularNode& regular(NodeId id);
    const RegularNode& regular(NodeId id) const;
    AuxiliaryNode& auxiliary(NodeId id);
    const AuxiliaryNode& auxiliary(NodeId id) const;
    std::vector<NodeId> regular_ids() const;
    std::vector<NodeId> auxiliary_ids() const;
    std::vector<NodeId> neighbors(NodeId id) const { return net_.neighbors(id); }

private:
    Simulation(std::uint64_t seed, std::size_t trial, unsigned hops);
    void populate(std::span<const Point> regular, std::span<const Point> aux);
    template <class Msg>
    void emit(NodeId src, NodeId dst, const Msg& msg) {
        // Building the variant copies ciphertexts; skip it when nobody listens.
        if (transcript_) write_transcript(src, dst, ProtocolMessage(msg));
    }
    void write_transcript(NodeId src, NodeId dst, const ProtocolMessage& msg);
    void run_case1(NodeId u, NodeId v, std::vector<std::optional<std::optional<AuxRoute>>>& routes,
                   RoundReport& report);
    void run_case2(NodeId u, NodeId a, RoundReport& report);

    Rng setup_rng_;
    Rng protocol_rng_;
    Rng mobility_rng_;
    SetupServer server_;
    Network net_;
    std::vector<std::size_t> slot_;  // id -> index into regulars_ or auxes_
    std::vector<RegularNode> regulars_;
    std::vector<AuxiliaryNode> auxes_;
    std::size_t trial_ = 0;
    unsigned hops_ = 1;
    double step_ = 0.0;
    std::size_t rounds_run_ = 0;
    std::ostream* transcript_ = nullptr;
};

struct TrialResult {
    std::size_t trial = 0;
    std::vector<RoundReport> rounds;
};

struct TrialJob {
    ScenarioParams params;
    std::size_t trial = 0;
};

/// Establishment, then each mobility round followed by full re-establishment.
TrialResult run_trial(const ScenarioParams& params, std::size_t trial, std::ostream* transcript = nullptr);

/// Jobs run concurrently (OpenMP); results are returned in job order.
std::vector<TrialResult> run_trials(std::span<const TrialJob> jobs);
/// Serial reference for run_trials.
std::vector<TrialResult> run_trials_serial(std::span<const TrialJob> jobs);
std::vector<TrialJob> make_jobs(const ScenarioParams& params);

}  // namespace auxkey
