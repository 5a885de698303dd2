#pragma once

// Test-only helpers: an independent brute-force trace analyzer (the oracle
// for the streaming metrics), a trace conservation checker, and random
// workload generators. Kept free of any dependency on the streaming analyze()
// implementation.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "hqsim/engine.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/types.hpp"

namespace hqsim::test {

struct NaiveMetrics {
    double node_busy_ns = 0;
    double node_alloc_ns = 0;
    std::vector<double> qpu_busy;
    std::vector<double> qpu_alloc;
};

inline int resource_nodes(const std::string& s) {
    return s.rfind("nodes:", 0) == 0 ? std::atoi(s.c_str() + 6) : -1;
}

inline int resource_qpu(const std::string& s) {
    return s.rfind("qpu:", 0) == 0 ? std::atoi(s.c_str() + 4) : -1;
}

// O(events^2 x jobs) recomputation: for every inter-event interval, rebuild
// each job's node count and compute/idle state from scratch by scanning the
// whole prefix, then integrate. Deliberately naive.
inline NaiveMetrics naive_analyze(const Trace& trace, const ClusterConfig& cluster) {
    NaiveMetrics m;
    const auto& ev = trace.events;
    const size_t nq = static_cast<size_t>(cluster.total_qpus());
    m.qpu_busy.assign(nq, 0.0);
    m.qpu_alloc.assign(nq, 0.0);

    // busy intervals per qpu
    for (size_t q = 0; q < nq; ++q) {
        double start = std::numeric_limits<double>::quiet_NaN();
        for (const auto& e : ev) {
            if (resource_qpu(e.resource_ids) != static_cast<int>(q)) continue;
            if (e.kind == EventKind::QTaskStart) start = e.time;
            if (e.kind == EventKind::QTaskEnd && !std::isnan(start)) {
                m.qpu_busy[q] += e.time - start;
                start = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }

    std::vector<std::string> job_ids;
    for (const auto& e : ev)
        if (e.kind == EventKind::JobSubmit) job_ids.push_back(e.job_id);

    for (size_t i = 0; i + 1 < ev.size(); ++i) {
        const double dt = ev[i + 1].time - ev[i].time;
        if (dt <= 0) continue;
        for (const auto& id : job_ids) {
            int owned = 0;
            bool computing = false;
            for (size_t k = 0; k <= i; ++k) {
                const auto& e = ev[k];
                if (e.job_id != id) continue;
                const int n = resource_nodes(e.resource_ids);
                switch (e.kind) {
                case EventKind::AllocGrant:
                    if (n >= 0) owned += n;
                    break;
                case EventKind::AllocRelease:
                    if (n >= 0) owned -= n;
                    break;
                case EventKind::Shrink: owned -= n; break;
                case EventKind::Expand: owned += n; break;
                case EventKind::PhaseStart:
                case EventKind::QTaskEnd: computing = true; break;
                case EventKind::PhaseEnd:
                case EventKind::QTaskEnqueue:
                case EventKind::JobEnd: computing = false; break;
                default: break;
                }
            }
            m.node_alloc_ns += owned * dt;
            if (computing) m.node_busy_ns += owned * dt;
        }
        for (size_t q = 0; q < nq; ++q) {
            int depth = 0;
            for (size_t k = 0; k <= i; ++k) {
                const auto& e = ev[k];
                if (resource_qpu(e.resource_ids) != static_cast<int>(q)) continue;
                if (e.kind == EventKind::AllocGrant) ++depth;
                if (e.kind == EventKind::AllocRelease) --depth;
            }
            if (depth > 0) m.qpu_alloc[q] += dt;
        }
    }
    return m;
}

struct ConservationResult {
    bool ok = true;
    std::string reason;
};

// node conservation and per-QPU task mutual exclusion at every trace instant
inline ConservationResult check_conservation(const Trace& trace,
                                             const ClusterConfig& cluster) {
    int total_owned = 0;
    std::vector<bool> qpu_busy(static_cast<size_t>(cluster.total_qpus()), false);
    for (const auto& e : trace.events) {
        const int n = resource_nodes(e.resource_ids);
        const int q = resource_qpu(e.resource_ids);
        switch (e.kind) {
        case EventKind::AllocGrant:
            if (n >= 0) total_owned += n;
            break;
        case EventKind::AllocRelease:
            if (n >= 0) total_owned -= n;
            break;
        case EventKind::Shrink: total_owned -= n; break;
        case EventKind::Expand: total_owned += n; break;
        case EventKind::QTaskStart:
            if (q >= 0) {
                if (qpu_busy[static_cast<size_t>(q)])
                    return {false, "overlapping tasks on qpu " + std::to_string(q) +
                                       " at t=" + std::to_string(e.time)};
                qpu_busy[static_cast<size_t>(q)] = true;
            }
            break;
        case EventKind::QTaskEnd:
            if (q >= 0) qpu_busy[static_cast<size_t>(q)] = false;
            break;
        default: break;
        }
        if (total_owned > cluster.classical_nodes)
            return {false, "granted nodes " + std::to_string(total_owned) + " > " +
                               std::to_string(cluster.classical_nodes) + " at t=" +
                               std::to_string(e.time)};
        if (total_owned < 0) return {false, "negative granted node count"};
    }
    return {};
}

// ---------------------------------------------------------------------------
// random workloads (integer-valued parameters so event times stay exact)

struct RandomWorkloadOpts {
    int max_jobs = 6;
    bool single_phase = false;  // single-phase jobs with a matching single request
    int task_duration_s = 0;    // 0: random in [2,10]
    bool tight_walltime = false;
    int vqpus_per_qpu = 1;
};

inline std::pair<ClusterConfig, std::vector<JobSpec>>
random_workload(SplitMix64& rng, const RandomWorkloadOpts& opts = {}) {
    ClusterConfig cluster;
    cluster.classical_nodes = 4 + static_cast<int>(rng.next_below(13));
    const int d = opts.task_duration_s ? opts.task_duration_s
                                       : 2 + static_cast<int>(rng.next_below(9));
    cluster.qpus = {{QpuTechnologyProfile::fixed("fixed-tech", d, 0.0), 1}};
    cluster.vqpus_per_qpu = opts.vqpus_per_qpu;

    const int n_jobs = 1 + static_cast<int>(rng.next_below(
                               static_cast<std::uint64_t>(opts.max_jobs)));
    std::vector<JobSpec> jobs;
    for (int i = 0; i < n_jobs; ++i) {
        JobSpec job;
        job.job_id = "rnd-" + std::to_string(i);
        job.submit_time = static_cast<double>(rng.next_below(30));
        const int nodes = 1 + static_cast<int>(rng.next_below(
                                  static_cast<std::uint64_t>(cluster.classical_nodes)));
        const double wall =
            opts.tight_walltime ? 20.0 + static_cast<double>(rng.next_below(80)) : 1.0e6;

        auto classical_phase = [&]() {
            Phase p;
            p.kind = PhaseKind::Classical;
            p.classical_work = static_cast<double>(nodes) *
                               static_cast<double>(1 + rng.next_below(20));
            return p;
        };
        auto quantum_phase = [&]() {
            Phase p;
            p.kind = PhaseKind::Quantum;
            p.quantum_tasks = 1 + static_cast<int>(rng.next_below(5));
            p.prep_time_per_task = static_cast<double>(rng.next_below(6));
            return p;
        };

        if (opts.single_phase) {
            if (rng.next_below(2) == 0) {
                job.requests = {{0, "classical", nodes, 0, wall}};
                job.phases = {classical_phase()};
            } else {
                job.requests = {{0, "quantum", 0, 1, wall}};
                job.phases = {quantum_phase()};
            }
        } else {
            job.requests = {{0, "classical", nodes, 0, wall}, {1, "quantum", 0, 1, wall}};
            const int n_phases = 1 + static_cast<int>(rng.next_below(4));
            bool quantum = rng.next_below(2) == 0;
            for (int p = 0; p < n_phases; ++p, quantum = !quantum)
                job.phases.push_back(quantum ? quantum_phase() : classical_phase());
        }
        jobs.push_back(std::move(job));
    }
    return {std::move(cluster), std::move(jobs)};
}

} // namespace hqsim::test
