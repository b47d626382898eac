// Parallel kernels against their serial references.
//
//   ./bench_kernels --benchmark_filter=Topology
//   OMP_NUM_THREADS=8 ./bench_kernels

#include <benchmark/benchmark.h>

#include "auxkey/analysis.hpp"

namespace {

using namespace auxkey;

std::vector<Point> field_points(std::size_t count, const FieldGeometry& field) {
    Rng rng(5);
    return deploy_regular(count, field, rng);
}

void BM_TopologyGrid(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const FieldGeometry field = compute_field(static_cast<std::int64_t>(n), 80, 30.0);
    const auto pts = field_points(n, field);
    for (auto _ : state) benchmark::DoNotOptimize(build_topology(pts, field));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void BM_TopologyReference(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const FieldGeometry field = compute_field(static_cast<std::int64_t>(n), 80, 30.0);
    const auto pts = field_points(n, field);
    for (auto _ : state) benchmark::DoNotOptimize(build_topology_reference(pts, field));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

ScenarioParams small_scenario() {
    ScenarioParams p;
    p.n = 1000;
    p.m = 100;
    p.d = 40;
    p.trials = 4;
    return p;
}

void BM_TrialsParallel(benchmark::State& state) {
    const auto jobs = make_jobs(small_scenario());
    for (auto _ : state) benchmark::DoNotOptimize(run_trials(jobs));
}

void BM_TrialsSerial(benchmark::State& state) {
    const auto jobs = make_jobs(small_scenario());
    for (auto _ : state) benchmark::DoNotOptimize(run_trials_serial(jobs));
}

void BM_Case1Handshake(benchmark::State& state) {
    Rng rng(1);
    SetupServer server(rng);
    RegularNode u = server.provision_regular(NodeId{1});
    RegularNode v = server.provision_regular(NodeId{2});
    const AuxiliaryNode aux = server.provision_auxiliary(NodeId{3});
    for (auto _ : state) {
        const auto req = handle_init(v, initiate(u, v.id, rng), rng);
        const auto fwd = responder_handle_reply(v, aux_handle(aux, req, rng), u.id);
        benchmark::DoNotOptimize(initiator_handle_forward(u, fwd, v.id));
    }
}

}  // namespace

BENCHMARK(BM_TopologyGrid)->Arg(1000)->Arg(5500)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TopologyReference)->Arg(1000)->Arg(5500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Case1Handshake)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
