#include <benchmark/benchmark.h>

#include "hqsim/engine.hpp"
#include "hqsim/metrics.hpp"
#include "hqsim/simulation.hpp"
#include "hqsim/workload.hpp"

using namespace hqsim;

namespace {

// raw event kernel throughput: schedule/dispatch N timer chains
void BM_EngineDispatch(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        EventEngine eng;
        int remaining = n;
        std::function<void(const SimEvent&)> tick = [&](const SimEvent& e) {
            if (--remaining > 0) {
                SimEvent next;
                next.kind = EventKind::PhaseEnd;
                eng.schedule(e.time + 1.0, next, tick);
            }
        };
        SimEvent first;
        first.kind = EventKind::PhaseStart;
        eng.schedule(0.0, first, tick);
        benchmark::DoNotOptimize(eng.run());
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_EngineDispatch)->Arg(1000)->Arg(100000);

std::pair<ClusterConfig, std::vector<JobSpec>> bench_workload(int jobs) {
    ClusterConfig cluster;
    cluster.classical_nodes = 64;
    cluster.qpus = {{QpuTechnologyProfile::fixed("superconducting", 10.0, 0.0), 2}};
    cluster.vqpus_per_qpu = 4;

    WorkloadProfile profile;
    profile.job_count = jobs;
    profile.arrival = ArrivalKind::Poisson;
    profile.rate_per_hour = 120;
    profile.nodes = 8;
    profile.qpu_gres = 1;
    profile.walltime = 7200;
    PhaseTemplate c;
    c.kind = PhaseKind::Classical;
    c.classical_work = Dist::uniform(400, 4000);
    PhaseTemplate q;
    q.kind = PhaseKind::Quantum;
    q.quantum_tasks = Dist::uniform(1, 20);
    q.prep_time = Dist::fixed(5);
    profile.phases = {c, q, c};
    return {cluster, generate(profile)};
}

void BM_Simulate(benchmark::State& state) {
    const auto [cluster, jobs] = bench_workload(static_cast<int>(state.range(0)));
    const auto kind = static_cast<StrategyKind>(state.range(1));
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate(cluster, jobs, kind));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Simulate)
    ->Args({100, static_cast<int>(StrategyKind::Coschedule)})
    ->Args({100, static_cast<int>(StrategyKind::Workflow)})
    ->Args({100, static_cast<int>(StrategyKind::Vqpu)})
    ->Args({100, static_cast<int>(StrategyKind::Malleable)})
    ->Args({1000, static_cast<int>(StrategyKind::Vqpu)});

void BM_Analyze(benchmark::State& state) {
    const auto [cluster, jobs] = bench_workload(static_cast<int>(state.range(0)));
    const auto r = simulate(cluster, jobs, StrategyKind::Vqpu);
    for (auto _ : state) {
        benchmark::DoNotOptimize(analyze(r.trace, cluster));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(r.trace.events.size()));
}
BENCHMARK(BM_Analyze)->Arg(100)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
