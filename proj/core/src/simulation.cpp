#include "hqsim/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <sstream>

#include "sim_internal.hpp"

namespace hqsim {

Simulation::Simulation(const ClusterConfig& cluster_in, const std::vector<JobSpec>& specs,
                       StrategyKind kind_in, const StrategyParams& params_in,
                       std::uint64_t seed)
    : cluster(cluster_in), params(params_in), kind(kind_in),
      strategy_(make_strategy(kind_in, params_in)), seed_(seed) {
    free_nodes = cluster.classical_nodes;
    for (const auto& [profile, count] : cluster.qpus) {
        const int tech = static_cast<int>(profiles.size());
        profiles.push_back(profile);
        for (int i = 0; i < count; ++i) {
            QpuRuntime q;
            q.tech = tech;
            if (kind == StrategyKind::Vqpu)
                q.lease_owner.assign(static_cast<size_t>(cluster.vqpus_per_qpu), -1);
            qpus.push_back(std::move(q));
        }
    }

    jobs.reserve(specs.size());
    for (size_t i = 0; i < specs.size(); ++i) {
        JobRun job;
        job.spec = &specs[i];
        job.index = static_cast<int>(i);
        job.nodes_target = specs[i].total_nodes();
        job.qpu_need = specs[i].total_qpu_gres();
        job.walltime = specs[i].min_walltime();
        // per-job duration stream so sampled durations do not depend on the
        // strategy or on cross-job event interleaving
        job.rng = SplitMix64(seed + static_cast<std::uint64_t>(i) + 1);
        jobs.push_back(std::move(job));
    }
}

SimResult Simulation::run() {
    for (auto& job : jobs) {
        SimEvent ev;
        ev.kind = EventKind::JobSubmit;
        ev.job_id = job.spec->job_id;
        const int idx = job.index;
        engine.schedule(job.spec->submit_time, std::move(ev),
                        [this, idx](const SimEvent&) { on_submit_event(idx); });
    }
    SimResult result;
    try {
        result.trace = engine.run();
    } catch (const HandlerFaultError& fault) {
        result.trace = fault.partial_trace;
        result.fault = true;
        result.fault_reason = fault.reason;
    }
    return result;
}

void Simulation::mark(EventKind kind_in, const JobRun& job, int phase, std::string resources) {
    SimEvent ev;
    ev.kind = kind_in;
    ev.job_id = job.spec->job_id;
    ev.phase_index = phase;
    ev.resource_ids = std::move(resources);
    engine.schedule(now(), std::move(ev));
}

void Simulation::on_submit_event(int job) {
    JobRun& j = jobs[static_cast<size_t>(job)];
    j.ready_time = now();
    strategy_->on_submit(*this, job);
}

// ---------------------------------------------------------------------------
// gang machinery

void Simulation::gang_submit(JobRun& job) {
    if (in_classical_queue(job)) classical_queue.push_back(job.index);
    if (in_quantum_queue(job)) quantum_queue.push_back(job.index);
}

bool Simulation::heads_everywhere(const JobRun& job) const {
    if (in_classical_queue(job) &&
        (classical_queue.empty() || classical_queue.front() != job.index))
        return false;
    if (in_quantum_queue(job) &&
        (quantum_queue.empty() || quantum_queue.front() != job.index))
        return false;
    return true;
}

bool Simulation::gang_resources_free(const JobRun& job, bool use_leases) const {
    if (job.nodes_target > free_nodes) return false;
    int avail = 0;
    for (const auto& q : qpus) {
        if (use_leases) {
            for (int owner : q.lease_owner)
                if (owner < 0) ++avail;
        } else if (q.exclusive_owner < 0) {
            ++avail;
        }
    }
    return avail >= job.qpu_need;
}

void Simulation::pop_from_queues(const JobRun& job) {
    auto drop = [&](std::deque<int>& q) {
        auto it = std::find(q.begin(), q.end(), job.index);
        if (it != q.end()) q.erase(it);
    };
    drop(classical_queue);
    drop(quantum_queue);
}

void Simulation::gang_grant(JobRun& job, bool use_leases) {
    if (job.nodes_target > 0) {
        free_nodes -= job.nodes_target;
        job.nodes_owned = job.nodes_target;
        mark(EventKind::AllocGrant, job, -1, "nodes:" + std::to_string(job.nodes_target));
    }
    int remaining = job.qpu_need;
    for (size_t qi = 0; qi < qpus.size() && remaining > 0; ++qi) {
        QpuRuntime& q = qpus[qi];
        if (use_leases) {
            for (size_t s = 0; s < q.lease_owner.size() && remaining > 0; ++s) {
                if (q.lease_owner[s] >= 0) continue;
                q.lease_owner[s] = job.index;
                job.leases.emplace_back(static_cast<int>(qi), static_cast<int>(s));
                mark(EventKind::AllocGrant, job, -1,
                     "qpu:" + std::to_string(qi) + "/lease:" + std::to_string(s));
                --remaining;
            }
        } else if (q.exclusive_owner < 0) {
            q.exclusive_owner = job.index;
            job.qpus_owned.push_back(static_cast<int>(qi));
            mark(EventKind::AllocGrant, job, -1, "qpu:" + std::to_string(qi));
            --remaining;
        }
    }
    assert(remaining == 0);
    job.running = true;
    schedule_kill(job, job.walltime);
    start_phase(job, 0);
}

bool Simulation::gang_pass(bool use_leases) {
    for (std::deque<int>* queue : {&classical_queue, &quantum_queue}) {
        if (queue->empty()) continue;
        JobRun& job = jobs[static_cast<size_t>(queue->front())];
        if (!heads_everywhere(job)) continue;
        if (!gang_resources_free(job, use_leases)) continue;
        pop_from_queues(job);
        gang_grant(job, use_leases);
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// phase machinery

void Simulation::schedule_kill(JobRun& job, Seconds wall) {
    job.kill_time = now() + wall;
    SimEvent ev;
    ev.kind = EventKind::JobEnd;
    ev.job_id = job.spec->job_id;
    ev.resource_ids = "walltime-exceeded";
    const int idx = job.index;
    job.kill = engine.schedule(job.kill_time, std::move(ev),
                               [this, idx](const SimEvent&) { on_kill_event(idx); });
    job.kill_pending = true;
}

void Simulation::maybe_cancel_kill(JobRun& job, Seconds completion, bool completes_allocation) {
    if (!completes_allocation || !job.kill_pending) return;
    if (completion <= job.kill_time) {
        engine.cancel(job.kill);
        job.kill_pending = false;
    }
}

void Simulation::start_phase(JobRun& job, int phase) {
    job.phase = phase;
    mark(EventKind::PhaseStart, job, phase, "");
    const Phase& p = job.phase_at(phase);
    const bool completes_allocation =
        kind == StrategyKind::Workflow || phase + 1 == job.phase_count();
    if (p.kind == PhaseKind::Classical) {
        assert(job.nodes_owned > 0);
        job.remaining_work = p.classical_work;
        job.seg_start = now();
        const Seconds end = now() + p.classical_work / job.nodes_owned;
        SimEvent ev;
        ev.kind = EventKind::PhaseEnd;
        ev.job_id = job.spec->job_id;
        ev.phase_index = phase;
        const int idx = job.index;
        job.timer = engine.schedule(end, std::move(ev), [this, idx, phase](const SimEvent&) {
            JobRun& j = jobs[static_cast<size_t>(idx)];
            j.timer_pending = false;
            j.remaining_work = 0;
            strategy_->on_phase_end(*this, idx, phase);
        });
        job.timer_pending = true;
        maybe_cancel_kill(job, end, completes_allocation);
    } else {
        job.task = 0;
        schedule_next_task(job);
    }
}

int Simulation::quantum_phase_component_qpu(const JobRun& job) const {
    if (!job.qpus_owned.empty()) return job.qpus_owned.front();
    assert(!job.leases.empty());
    return job.leases.front().first;
}

void Simulation::schedule_next_task(JobRun& job) {
    const Phase& p = job.phase_at(job.phase);
    if (job.task >= p.quantum_tasks) {
        phase_complete(job);
        return;
    }
    const int qpu = quantum_phase_component_qpu(job);
    SimEvent ev;
    ev.kind = EventKind::QTaskEnqueue;
    ev.job_id = job.spec->job_id;
    ev.phase_index = job.phase;
    ev.resource_ids = "qpu:" + std::to_string(qpu);
    const int idx = job.index;
    job.timer = engine.schedule(now() + p.prep_time_per_task, std::move(ev),
                                [this, idx](const SimEvent&) { on_task_enqueue(idx); });
    job.timer_pending = true;
}

void Simulation::on_task_enqueue(int job_index) {
    JobRun& job = jobs[static_cast<size_t>(job_index)];
    job.timer_pending = false;
    const int qpu = quantum_phase_component_qpu(job);
    if (strategy_->shared_qpu()) {
        // FIFO by enqueue time, ties by job_id
        QpuRuntime& q = qpus[static_cast<size_t>(qpu)];
        PendingTask task{now(), job.index};
        auto pos = q.fifo.end();
        while (pos != q.fifo.begin()) {
            auto prev = std::prev(pos);
            if (prev->enqueue_time < task.enqueue_time) break;
            if (prev->enqueue_time == task.enqueue_time &&
                jobs[static_cast<size_t>(prev->job)].spec->job_id <= job.spec->job_id)
                break;
            pos = prev;
        }
        q.fifo.insert(pos, task);
        pump_qpu(qpu);
    } else {
        // exclusive QPU, tasks of one job are serialized: always idle here
        assert(qpus[static_cast<size_t>(qpu)].running_job < 0);
        start_task(job, qpu);
    }
}

void Simulation::pump_qpu(int qpu) {
    QpuRuntime& q = qpus[static_cast<size_t>(qpu)];
    if (q.running_job >= 0 || q.fifo.empty()) return;
    const int next = q.fifo.front().job;
    q.fifo.erase(q.fifo.begin());
    start_task(jobs[static_cast<size_t>(next)], qpu);
}

Seconds Simulation::next_task_duration(JobRun& job, int qpu) {
    return effective_task_duration(profiles[static_cast<size_t>(qpus[static_cast<size_t>(qpu)].tech)],
                                   job.rng);
}

void Simulation::start_task(JobRun& job, int qpu) {
    QpuRuntime& q = qpus[static_cast<size_t>(qpu)];
    const Seconds duration = next_task_duration(job, qpu);
    mark(EventKind::QTaskStart, job, job.phase, "qpu:" + std::to_string(qpu));
    q.running_job = job.index;
    SimEvent ev;
    ev.kind = EventKind::QTaskEnd;
    ev.job_id = job.spec->job_id;
    ev.phase_index = job.phase;
    ev.resource_ids = "qpu:" + std::to_string(qpu);
    const int idx = job.index;
    const Seconds end = now() + duration;
    job.timer = engine.schedule(end, std::move(ev),
                                [this, idx, qpu](const SimEvent&) { on_task_end(idx, qpu); });
    job.timer_pending = true;
    q.running_handle = job.timer;
    const Phase& p = job.phase_at(job.phase);
    const bool completes_allocation =
        (kind == StrategyKind::Workflow || job.phase + 1 == job.phase_count()) &&
        job.task + 1 == p.quantum_tasks;
    maybe_cancel_kill(job, end, completes_allocation);
}

void Simulation::on_task_end(int job_index, int qpu) {
    JobRun& job = jobs[static_cast<size_t>(job_index)];
    job.timer_pending = false;
    qpus[static_cast<size_t>(qpu)].running_job = -1;
    ++job.task;
    schedule_next_task(job);
    pump_qpu(qpu);
}

void Simulation::phase_complete(JobRun& job) {
    mark(EventKind::PhaseEnd, job, job.phase, "");
    strategy_->on_phase_end(*this, job.index, job.phase);
}

void Simulation::release_all(JobRun& job) {
    if (job.nodes_owned > 0) {
        mark(EventKind::AllocRelease, job, -1, "nodes:" + std::to_string(job.nodes_owned));
        free_nodes += job.nodes_owned;
        job.nodes_owned = 0;
    }
    for (int qi : job.qpus_owned) {
        mark(EventKind::AllocRelease, job, -1, "qpu:" + std::to_string(qi));
        qpus[static_cast<size_t>(qi)].exclusive_owner = -1;
    }
    job.qpus_owned.clear();
    for (auto [qi, slot] : job.leases) {
        mark(EventKind::AllocRelease, job, -1,
             "qpu:" + std::to_string(qi) + "/lease:" + std::to_string(slot));
        qpus[static_cast<size_t>(qi)].lease_owner[static_cast<size_t>(slot)] = -1;
    }
    job.leases.clear();
}

void Simulation::finish_job(JobRun& job) {
    release_all(job);
    if (job.kill_pending) {
        engine.cancel(job.kill);
        job.kill_pending = false;
    }
    mark(EventKind::JobEnd, job, -1, "");
    job.done = true;
    job.running = false;
    strategy_->try_schedule(*this);
}

void Simulation::on_kill_event(int job_index) {
    JobRun& job = jobs[static_cast<size_t>(job_index)];
    job.kill_pending = false;
    if (job.done) return;
    if (job.timer_pending) {
        engine.cancel(job.timer);
        job.timer_pending = false;
    }
    for (size_t qi = 0; qi < qpus.size(); ++qi) {
        QpuRuntime& q = qpus[qi];
        if (q.running_job == job.index) {
            // the running task is aborted at the kill instant; close it in the
            // trace so replay scans see a well-formed start/end pair
            mark(EventKind::QTaskEnd, job, job.phase, "qpu:" + std::to_string(qi));
            q.running_job = -1;
        }
        std::erase_if(q.fifo, [&](const PendingTask& t) { return t.job == job.index; });
    }
    std::erase(expand_queue, job.index);
    pop_from_queues(job);
    job.awaiting_expand = false;
    release_all(job);
    job.killed = true;
    job.done = true;
    job.running = false;
    for (size_t qi = 0; qi < qpus.size(); ++qi) pump_qpu(static_cast<int>(qi));
    strategy_->try_schedule(*this);
}

void Simulation::reschedule_classical_end(JobRun& job) {
    assert(job.phase >= 0 && job.phase_at(job.phase).kind == PhaseKind::Classical);
    if (job.timer_pending) engine.cancel(job.timer);
    const Seconds end = now() + job.remaining_work / job.nodes_owned;
    SimEvent ev;
    ev.kind = EventKind::PhaseEnd;
    ev.job_id = job.spec->job_id;
    ev.phase_index = job.phase;
    const int idx = job.index;
    const int phase = job.phase;
    job.timer = engine.schedule(end, std::move(ev), [this, idx, phase](const SimEvent&) {
        JobRun& j = jobs[static_cast<size_t>(idx)];
        j.timer_pending = false;
        j.remaining_work = 0;
        strategy_->on_phase_end(*this, idx, phase);
    });
    job.timer_pending = true;
    const bool completes_allocation =
        kind == StrategyKind::Workflow || phase + 1 == job.phase_count();
    maybe_cancel_kill(job, end, completes_allocation);
}

// ---------------------------------------------------------------------------
// workflow helpers

int Simulation::step_nodes(const JobRun& job) const { return job.nodes_target; }

Seconds Simulation::component_walltime(const JobRun& job, PhaseKind phase_kind) const {
    const char* partition = phase_kind == PhaseKind::Classical ? "classical" : "quantum";
    for (const auto& r : job.spec->requests)
        if (r.partition == partition) return r.walltime;
    return job.walltime;
}

bool Simulation::step_fits(const JobRun& job) const {
    const Phase& p = job.phase_at(job.pending_phase);
    if (p.kind == PhaseKind::Classical) return step_nodes(job) <= free_nodes;
    int avail = 0;
    for (const auto& q : qpus)
        if (q.exclusive_owner < 0) ++avail;
    return avail >= job.qpu_need;
}

void Simulation::grant_step(JobRun& job) {
    const int phase = job.pending_phase;
    const Phase& p = job.phase_at(phase);
    if (p.kind == PhaseKind::Classical) {
        const int n = step_nodes(job);
        free_nodes -= n;
        job.nodes_owned = n;
        mark(EventKind::AllocGrant, job, phase, "nodes:" + std::to_string(n));
    } else {
        int remaining = job.qpu_need;
        for (size_t qi = 0; qi < qpus.size() && remaining > 0; ++qi) {
            if (qpus[qi].exclusive_owner >= 0) continue;
            qpus[qi].exclusive_owner = job.index;
            job.qpus_owned.push_back(static_cast<int>(qi));
            mark(EventKind::AllocGrant, job, phase, "qpu:" + std::to_string(qi));
            --remaining;
        }
        assert(remaining == 0);
    }
    job.running = true;
    schedule_kill(job, component_walltime(job, p.kind));
    start_phase(job, phase);
}

// Node-level EASY backfill on the classical queue: a queued entry may jump the
// blocked head iff it fits now and either finishes (walltime bound) before the
// head's earliest possible start, or leaves the head's node reservation intact.
bool Simulation::try_backfill_classical() {
    if (classical_queue.size() < 2) return false;
    const bool workflow = kind == StrategyKind::Workflow;
    const JobRun& head = jobs[static_cast<size_t>(classical_queue.front())];
    const int head_need = head.nodes_target;

    // shadow: earliest instant the head's node request is guaranteed to fit,
    // assuming running holders release at their walltime bound
    Seconds shadow = now();
    int free_at_shadow = free_nodes;
    if (head_need > free_nodes) {
        std::vector<std::pair<Seconds, int>> releases;
        for (const auto& j : jobs)
            if (j.running && j.nodes_owned > 0)
                releases.emplace_back(j.kill_time, j.nodes_owned);
        std::sort(releases.begin(), releases.end());
        for (const auto& [at, n] : releases) {
            free_at_shadow += n;
            shadow = at;
            if (free_at_shadow >= head_need) break;
        }
        if (free_at_shadow < head_need) return false; // head can never fit
    }
    const int spare_at_shadow = free_at_shadow - head_need;

    for (size_t i = 1; i < classical_queue.size(); ++i) {
        JobRun& cand = jobs[static_cast<size_t>(classical_queue[i])];
        const bool fits =
            workflow ? step_fits(cand) : gang_resources_free(cand, false);
        if (!fits) continue;
        const Seconds bound =
            workflow ? component_walltime(cand, cand.phase_at(cand.pending_phase).kind)
                     : cand.walltime;
        const int need = workflow ? step_nodes(cand) : cand.nodes_target;
        if (now() + bound > shadow && need > spare_at_shadow) continue;
        pop_from_queues(cand);
        if (workflow)
            grant_step(cand);
        else
            gang_grant(cand, false);
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// malleable helpers

void Simulation::deliver_expansions() {
    std::vector<int> still_waiting;
    for (int idx : expand_queue) {
        JobRun& job = jobs[static_cast<size_t>(idx)];
        if (!job.awaiting_expand) continue;
        const int want = job.nodes_target - job.nodes_owned;
        const int gain = std::min(want, free_nodes);
        if (gain > 0) {
            // close the current constant-node-count work segment
            job.remaining_work =
                std::max(0.0, job.remaining_work - (now() - job.seg_start) * job.nodes_owned);
            job.seg_start = now();
            job.nodes_owned += gain;
            free_nodes -= gain;
            mark(EventKind::Expand, job, job.phase, "nodes:" + std::to_string(gain));
            reschedule_classical_end(job);
        }
        if (job.nodes_owned < job.nodes_target)
            still_waiting.push_back(idx);
        else
            job.awaiting_expand = false;
    }
    expand_queue = std::move(still_waiting);
}

// ---------------------------------------------------------------------------

SimResult simulate(const ClusterConfig& cluster, const std::vector<JobSpec>& jobs,
                   StrategyKind strategy, const StrategyParams& params, std::uint64_t seed) {
    Simulation sim(cluster, jobs, strategy, params, seed);
    return sim.run();
}

std::string dump_trace(const Trace& trace) {
    std::ostringstream out;
    char buf[64];
    for (const auto& e : trace.events) {
        std::snprintf(buf, sizeof(buf), "%.12g", e.time);
        out << buf << '\t' << e.seq << '\t' << to_string(e.kind) << '\t' << e.job_id << '\t'
            << e.phase_index << '\t' << e.resource_ids << '\n';
    }
    return out.str();
}

} // namespace hqsim
