#include "auxkey/simulation.hpp"

#include <exception>
#include <ostream>
#include <stdexcept>
#include <string>

namespace auxkey {

namespace {

// Stream ids under the (seed, trial) root.
constexpr std::uint64_t kSetupStream = 1;
constexpr std::uint64_t kProtocolStream = 2;
constexpr std::uint64_t kMobilityStream = 3;
constexpr std::uint64_t kDeployStream = 4;

class OpMeter {
public:
    OpMeter() : start_(thread_op_counts()) {}
    OpCounts take() {
        const OpCounts now = thread_op_counts();
        const OpCounts delta = now - start_;
        start_ = now;
        return delta;
    }

private:
    OpCounts start_;
};

}  // namespace

void ScenarioParams::validate() const {
    if (n < 1) throw InvalidParam("n must be >= 1");
    if (d < 1) throw InvalidParam("d must be >= 1");
    if (d + 1 > n + m) throw InvalidParam("d must not exceed m + n - 1");
    if (!(rho > 0.0)) throw InvalidParam("rho_m must be > 0");
    if (hops > 1) throw InvalidParam("hops must be 0 or 1");
    if (!(mobility_step_factor >= 0.0)) throw InvalidParam("mobility_step_factor must be >= 0");
    if (trials < 1) throw InvalidParam("trials must be >= 1");
}

Simulation::Simulation(std::uint64_t seed, std::size_t trial, unsigned hops)
    : setup_rng_(Rng(seed, trial).derive(kSetupStream)),
      protocol_rng_(Rng(seed, trial).derive(kProtocolStream)),
      mobility_rng_(Rng(seed, trial).derive(kMobilityStream)),
      server_(setup_rng_),
      trial_(trial),
      hops_(hops) {
    if (hops > 1) throw InvalidParam("hops must be 0 or 1");
}

Simulation::Simulation(const ScenarioParams& params, std::size_t trial)
    : Simulation(params.seed, trial, params.hops) {
    params.validate();
    net_.field = compute_field(static_cast<std::int64_t>(params.n), static_cast<std::int64_t>(params.d),
                               params.rho, params.boundary);
    step_ = params.mobility_step_factor * params.rho;
    Rng deploy = Rng(params.seed, trial).derive(kDeployStream);
    const auto regular = deploy_regular(params.n, net_.field, deploy);
    const auto aux = params.placement == AuxPlacement::grid ? deploy_auxiliary(params.m, net_.field, deploy)
                                                            : deploy_auxiliary_uniform(params.m, net_.field, deploy);
    populate(regular, aux);
}

Simulation::Simulation(const FieldGeometry& field, std::span<const Point> regular, std::span<const Point> aux,
                       std::uint64_t seed, unsigned hops)
    : Simulation(seed, 0, hops) {
    net_.field = field;
    step_ = 2.0 * field.rho;
    populate(regular, aux);
}

void Simulation::populate(std::span<const Point> regular, std::span<const Point> aux) {
    for (const auto& p : regular) {
        const NodeId id{net_.size()};
        slot_.push_back(regulars_.size());
        regulars_.push_back(server_.provision_regular(id));
        net_.positions.push_back(p);
        net_.kinds.push_back(NodeKind::regular);
    }
    for (const auto& p : aux) {
        const NodeId id{net_.size()};
        slot_.push_back(auxes_.size());
        auxes_.push_back(server_.provision_auxiliary(id));
        net_.positions.push_back(p);
        net_.kinds.push_back(NodeKind::auxiliary);
    }
    net_.rebuild_topology();
}

NodeId Simulation::add_regular_node(Point where) {
    populate(std::span<const Point>(&where, 1), {});
    return NodeId{net_.size() - 1};
}

NodeId Simulation::add_auxiliary_node(Point where) {
    populate({}, std::span<const Point>(&where, 1));
    return NodeId{net_.size() - 1};
}

bool Simulation::is_regular(NodeId id) const {
    return id.raw < net_.size() && net_.kinds[id.raw] == NodeKind::regular;
}

bool Simulation::is_auxiliary(NodeId id) const {
    return id.raw < net_.size() && net_.kinds[id.raw] == NodeKind::auxiliary;
}

RegularNode& Simulation::regular(NodeId id) {
    if (!is_regular(id)) throw UnknownNode("no regular node " + std::to_string(id.raw));
    return regulars_[slot_[id.raw]];
}

const RegularNode& Simulation::regular(NodeId id) const {
    if (!is_regular(id)) throw UnknownNode("no regular node " + std::to_string(id.raw));
    return regulars_[slot_[id.raw]];
}

AuxiliaryNode& Simulation::auxiliary(NodeId id) {
    if (!is_auxiliary(id)) throw UnknownNode("no auxiliary node " + std::to_string(id.raw));
    return auxes_[slot_[id.raw]];
}

const AuxiliaryNode& Simulation::auxiliary(NodeId id) const {
    if (!is_auxiliary(id)) throw UnknownNode("no auxiliary node " + std::to_string(id.raw));
    return auxes_[slot_[id.raw]];
}

std::vector<NodeId> Simulation::regular_ids() const {
    std::vector<NodeId> out;
    out.reserve(regulars_.size());
    for (const auto& r : regulars_) out.push_back(r.id);
    return out;
}

std::vector<NodeId> Simulation::auxiliary_ids() const {
    std::vector<NodeId> out;
    out.reserve(auxes_.size());
    for (const auto& a : auxes_) out.push_back(a.id);
    return out;
}

void Simulation::write_transcript(NodeId src, NodeId dst, const ProtocolMessage& msg) {
    *transcript_ << src.raw << ',' << dst.raw << ',' << rounds_run_ << ',' << to_hex(encode(msg)) << '\n';
}

void Simulation::mobility_round() {
    for (std::size_t i = 0; i < net_.size(); ++i) {
        if (net_.kinds[i] == NodeKind::regular) {
            net_.positions[i] = move_point(net_.positions[i], net_.field, step_, mobility_rng_);
        }
    }
    net_.rebuild_topology();
}

RoundReport Simulation::run_establishment_round(Rekey rekey) {
    RoundReport report;
    report.trial = trial_;
    report.round = rounds_run_;

    if (rekey == Rekey::all) {
        for (auto& r : regulars_) {
            r.pairwise_keys.clear();
            r.pending.clear();
        }
        for (auto& a : auxes_) a.session_keys.clear();
    }

    // Discovery outcome per responder, resolved on first use this round.
    std::vector<std::optional<std::optional<AuxRoute>>> routes(net_.size());

    for (std::size_t i = 0; i < net_.size(); ++i) {
        if (net_.kinds[i] != NodeKind::regular) continue;
        const NodeId u{i};
        for (auto j : net_.topology.neighbors(i)) {
            const NodeId peer{j};
            const bool keyed = regular(u).pairwise_keys.contains(peer);
            if (net_.is_auxiliary(j)) {
                ++report.reg_aux_pairs;
                if (keyed) {
                    ++report.reg_aux_retained;
                } else {
                    run_case2(u, peer, report);
                }
            } else if (j > i) {
                ++report.reg_reg_pairs;
                if (keyed) {
                    ++report.retained;
                } else {
                    run_case1(u, peer, routes, report);
                }
            }
        }
    }
    ++rounds_run_;
    return report;
}

void Simulation::run_case1(NodeId u, NodeId v, std::vector<std::optional<std::optional<AuxRoute>>>& routes,
                           RoundReport& report) {
    ++report.attempted;
    RegularNode& un = regular(u);
    RegularNode& vn = regular(v);
    OpMeter meter;

    const InitRequest init = initiate(un, v, protocol_rng_);
    OpCounts initiator_ops = meter.take();
    emit(u, v, init);
    ++report.messages;

    auto& cached = routes[v.raw];
    if (!cached) {
        cached = discover_aux(net_, v, 0);
        if (!*cached && hops_ >= 1) {
            // v asks its neighbours; each one that sees an auxiliary answers.
            ++report.messages;
            for (auto w : net_.topology.neighbors(v.raw)) {
                if (net_.is_auxiliary(w)) continue;
                for (auto a : net_.topology.neighbors(w)) {
                    if (net_.is_auxiliary(a)) {
                        ++report.messages;
                        break;
                    }
                }
            }
            cached = discover_aux(net_, v, 1);
        }
    }
    if (!*cached) {
        un.abandon(v);
        ++report.failed;
        return;
    }
    const AuxRoute route = **cached;
    meter.take();

    const AuxRequest request = handle_init(vn, init, protocol_rng_);
    OpCounts responder_ops = meter.take();
    if (route.helper) {
        emit(v, *route.helper, request);
        emit(*route.helper, route.aux, request);
        report.messages += 2;
    } else {
        emit(v, route.aux, request);
        ++report.messages;
    }

    KeyMaterial issued;
    const AuxReply reply = aux_handle(auxiliary(route.aux), request, protocol_rng_, &issued);
    const OpCounts aux_ops = meter.take();
    if (route.helper) {
        emit(route.aux, *route.helper, reply);
        emit(*route.helper, v, reply);
        report.messages += 2;
    } else {
        emit(route.aux, v, reply);
        ++report.messages;
    }

    const ForwardKey forward = responder_handle_reply(vn, reply, u);
    responder_ops += meter.take();
    emit(v, u, forward);
    ++report.messages;

    const KeyMaterial k_u = initiator_handle_forward(un, forward, v);
    initiator_ops += meter.take();

    if (k_u != issued || vn.key_with(u) != issued) {
        throw std::logic_error("handshake endpoints disagree on the pairwise key");
    }
    if (route.hops == 0) {
        ++report.direct_ok;
    } else {
        ++report.supplemental_ok;
    }
    report.ops.initiator += initiator_ops;
    report.ops.responder += responder_ops;
    report.ops.case1_auxiliary += aux_ops;
}

void Simulation::run_case2(NodeId u, NodeId a, RoundReport& report) {
    RegularNode& un = regular(u);
    AuxiliaryNode& an = auxiliary(a);
    OpMeter meter;

    const AuxDirectRequest request = aux_direct_request(un);
    OpCounts regular_ops = meter.take();
    emit(u, a, request);
    const AuxDirectReply reply = aux_direct_handle(an, request, protocol_rng_);
    const OpCounts aux_ops = meter.take();
    emit(a, u, reply);
    aux_direct_complete(un, reply, a);
    regular_ops += meter.take();

    report.messages += 2;
    ++report.case2_ok;
    report.ops.case2_regular += regular_ops;
    report.ops.case2_auxiliary += aux_ops;
}

TrialResult run_trial(const ScenarioParams& params, std::size_t trial, std::ostream* transcript) {
    Simulation sim(params, trial);
    sim.set_transcript(transcript);
    TrialResult result;
    result.trial = trial;
    result.rounds.push_back(sim.run_establishment_round(Rekey::missing));
    for (std::size_t r = 0; r < params.mobility_rounds; ++r) {
        sim.mobility_round();
        result.rounds.push_back(sim.run_establishment_round(Rekey::all));
    }
    return result;
}

std::vector<TrialResult> run_trials(std::span<const TrialJob> jobs) {
    std::vector<TrialResult> out(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(jobs.size()); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        try {
            out[i] = run_trial(jobs[i].params, jobs[i].trial);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

std::vector<TrialResult> run_trials_serial(std::span<const TrialJob> jobs) {
    std::vector<TrialResult> out;
    out.reserve(jobs.size());
    for (const auto& job : jobs) out.push_back(run_trial(job.params, job.trial));
    return out;
}

std::vector<TrialJob> make_jobs(const ScenarioParams& params) {
    std::vector<TrialJob> jobs;
    for (std::size_t t = 0; t < params.trials; ++t) jobs.push_back({params, t});
    return jobs;
}

}  // namespace auxkey
