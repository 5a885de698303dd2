#include "hqsim/strategy.hpp"

#include <algorithm>

#include "sim_internal.hpp"

namespace hqsim {
namespace {

// All-or-nothing gang allocation: the job waits until every hetjob component
// is simultaneously satisfiable, then holds nodes plus an exclusive physical
// QPU until completion or walltime kill.
class CoscheduleStrategy : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Coschedule; }

    void on_submit(Simulation& sim, int job) override {
        sim.gang_submit(sim.jobs[static_cast<size_t>(job)]);
        try_schedule(sim);
    }

    void try_schedule(Simulation& sim) override {
        while (sim.gang_pass(false)) {}
    }

    void on_phase_end(Simulation& sim, int job, int phase) override {
        JobRun& j = sim.jobs[static_cast<size_t>(job)];
        if (phase + 1 == j.phase_count())
            sim.finish_job(j);
        else
            sim.start_phase(j, phase + 1);
    }
};

// Each phase is an independently queued step holding only the resources of
// its own kind; between steps the job holds nothing.
class WorkflowStrategy : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Workflow; }

    void on_submit(Simulation& sim, int job) override {
        JobRun& j = sim.jobs[static_cast<size_t>(job)];
        j.pending_phase = 0;
        enqueue_step(sim, j);
        try_schedule(sim);
    }

    void try_schedule(Simulation& sim) override {
        bool progress = true;
        while (progress) {
            progress = false;
            if (!sim.classical_queue.empty()) {
                JobRun& j = sim.jobs[static_cast<size_t>(sim.classical_queue.front())];
                if (sim.step_fits(j)) {
                    sim.classical_queue.pop_front();
                    sim.grant_step(j);
                    progress = true;
                }
            }
            if (!sim.quantum_queue.empty()) {
                JobRun& j = sim.jobs[static_cast<size_t>(sim.quantum_queue.front())];
                if (sim.step_fits(j)) {
                    sim.quantum_queue.pop_front();
                    sim.grant_step(j);
                    progress = true;
                }
            }
            if (!progress && sim.params.backfill) progress = sim.try_backfill_classical();
        }
    }

    void on_phase_end(Simulation& sim, int job, int phase) override {
        JobRun& j = sim.jobs[static_cast<size_t>(job)];
        sim.release_all(j);
        if (j.kill_pending) {
            sim.engine.cancel(j.kill);
            j.kill_pending = false;
        }
        j.running = false;
        j.ready_time = sim.now();
        if (phase + 1 == j.phase_count()) {
            sim.mark(EventKind::JobEnd, j, -1, "");
            j.done = true;
        } else {
            j.pending_phase = phase + 1;
            enqueue_step(sim, j);
        }
        try_schedule(sim);
    }

private:
    static void enqueue_step(Simulation& sim, JobRun& j) {
        if (j.phase_at(j.pending_phase).kind == PhaseKind::Classical)
            sim.classical_queue.push_back(j.index);
        else
            sim.quantum_queue.push_back(j.index);
    }
};

// Like coschedule for the classical nodes, but the quantum component binds a
// VQPU lease; the physical QPU serializes tasks across its leases FIFO.
class VqpuStrategy : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Vqpu; }
    bool shared_qpu() const override { return true; }

    void on_submit(Simulation& sim, int job) override {
        sim.gang_submit(sim.jobs[static_cast<size_t>(job)]);
        try_schedule(sim);
    }

    void try_schedule(Simulation& sim) override {
        while (sim.gang_pass(true)) {}
    }

    void on_phase_end(Simulation& sim, int job, int phase) override {
        JobRun& j = sim.jobs[static_cast<size_t>(job)];
        if (phase + 1 == j.phase_count())
            sim.finish_job(j);
        else
            sim.start_phase(j, phase + 1);
    }
};

// Gang allocation plus dynamic node counts: shrink to `retain` nodes while a
// quantum phase runs, re-expand (possibly gradually) for classical phases.
class MalleableStrategy : public Strategy {
public:
    explicit MalleableStrategy(const StrategyParams& params) : params_(params) {}

    StrategyKind kind() const override { return StrategyKind::Malleable; }

    void on_submit(Simulation& sim, int job) override {
        sim.gang_submit(sim.jobs[static_cast<size_t>(job)]);
        try_schedule(sim);
    }

    void try_schedule(Simulation& sim) override {
        bool progress = true;
        while (progress) {
            progress = false;
            sim.deliver_expansions();
            if (sim.gang_pass(false)) {
                progress = true;
                continue;
            }
            if (sim.params.backfill) progress = sim.try_backfill_classical();
        }
    }

    void on_phase_end(Simulation& sim, int job, int phase) override {
        JobRun& j = sim.jobs[static_cast<size_t>(job)];
        if (phase + 1 == j.phase_count()) {
            if (j.awaiting_expand) {
                std::erase(sim.expand_queue, j.index);
                j.awaiting_expand = false;
            }
            sim.finish_job(j);
            return;
        }
        const PhaseKind next = j.phase_at(phase + 1).kind;
        bool freed = false;
        if (next == PhaseKind::Quantum) {
            if (j.awaiting_expand) {
                std::erase(sim.expand_queue, j.index);
                j.awaiting_expand = false;
            }
            const int retain = std::clamp(params_.retain, 1, j.nodes_target);
            if (j.nodes_owned > retain) {
                const int released = j.nodes_owned - retain;
                j.nodes_owned = retain;
                sim.free_nodes += released;
                sim.mark(EventKind::Shrink, j, phase + 1,
                         "nodes:" + std::to_string(released));
                freed = true;
            }
        } else if (j.phase_at(phase).kind == PhaseKind::Quantum) {
            // re-expand toward the requested node count with whatever is free
            const int want = j.nodes_target - j.nodes_owned;
            const int gain = std::min(want, sim.free_nodes);
            if (gain > 0) {
                j.nodes_owned += gain;
                sim.free_nodes -= gain;
                sim.mark(EventKind::Expand, j, phase + 1, "nodes:" + std::to_string(gain));
            }
            if (j.nodes_owned < j.nodes_target && !j.awaiting_expand) {
                j.awaiting_expand = true;
                sim.expand_queue.push_back(j.index);
            }
        }
        sim.start_phase(j, phase + 1);
        if (freed) try_schedule(sim);
    }

private:
    StrategyParams params_;
};

} // namespace

const char* to_string(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::Coschedule: return "coschedule";
    case StrategyKind::Workflow: return "workflow";
    case StrategyKind::Vqpu: return "vqpu";
    case StrategyKind::Malleable: return "malleable";
    }
    return "?";
}

std::optional<StrategyKind> strategy_from_name(std::string_view name) {
    for (StrategyKind k : {StrategyKind::Coschedule, StrategyKind::Workflow,
                           StrategyKind::Vqpu, StrategyKind::Malleable})
        if (name == to_string(k)) return k;
    return std::nullopt;
}

std::vector<std::string> strategy_names() {
    return {"coschedule", "workflow", "vqpu", "malleable"};
}

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const StrategyParams& params) {
    switch (kind) {
    case StrategyKind::Coschedule: return std::make_unique<CoscheduleStrategy>();
    case StrategyKind::Workflow: return std::make_unique<WorkflowStrategy>();
    case StrategyKind::Vqpu: return std::make_unique<VqpuStrategy>();
    case StrategyKind::Malleable: return std::make_unique<MalleableStrategy>(params);
    }
    return nullptr;
}

} // namespace hqsim
