#pragma once

// Internal simulation state shared between the engine wiring (simulation.cpp)
// and the strategy implementations (strategies.cpp). Not installed.

#include <deque>
#include <limits>
#include <memory>
#include <vector>

#include "hqsim/engine.hpp"
#include "hqsim/rng.hpp"
#include "hqsim/simulation.hpp"
#include "hqsim/strategy.hpp"
#include "hqsim/types.hpp"

namespace hqsim {

inline constexpr Seconds kNever = std::numeric_limits<Seconds>::infinity();

struct PendingTask {
    Seconds enqueue_time = 0;
    int job = -1;
};

struct QpuRuntime {
    int tech = 0;                     // index into Simulation::profiles
    int exclusive_owner = -1;         // job index (coschedule/workflow/malleable)
    int running_job = -1;             // job whose task currently occupies the QPU
    std::uint64_t running_handle = 0; // QTaskEnd handle of the running task
    std::vector<PendingTask> fifo;    // waiting tasks, ordered (enqueue_time, job)
    std::vector<int> lease_owner;     // K slots (vqpu mode), job index or -1
};

struct JobRun {
    const JobSpec* spec = nullptr;
    int index = 0;
    // static, derived from the spec
    int nodes_target = 0;
    int qpu_need = 0;
    Seconds walltime = kNever; // min component walltime (job-level bound)
    // dynamic
    int phase = -1;         // running phase index
    int pending_phase = 0;  // next phase to run (workflow queue entries)
    int task = 0;           // next task index within a quantum phase
    int nodes_owned = 0;
    std::vector<int> qpus_owned;             // exclusive physical QPUs
    std::vector<std::pair<int, int>> leases; // (qpu, slot)
    double remaining_work = 0; // outstanding node-seconds of the current classical phase
    Seconds seg_start = 0;     // start of the current constant-node-count segment
    std::uint64_t timer = 0;   // pending PhaseEnd / QTaskEnqueue / QTaskEnd handle
    bool timer_pending = false;
    std::uint64_t kill = 0; // walltime kill handle
    bool kill_pending = false;
    Seconds kill_time = kNever;
    Seconds ready_time = 0; // step-ready instant (queue wait baseline)
    bool awaiting_expand = false;
    bool running = false;
    bool done = false;
    bool killed = false;
    SplitMix64 rng{0}; // per-job duration stream, strategy-independent

    const Phase& phase_at(int i) const { return spec->phases[static_cast<size_t>(i)]; }
    int phase_count() const { return static_cast<int>(spec->phases.size()); }
};

class Simulation {
public:
    Simulation(const ClusterConfig& cluster, const std::vector<JobSpec>& specs,
               StrategyKind kind, const StrategyParams& params, std::uint64_t seed);

    SimResult run();

    EventEngine engine;
    ClusterConfig cluster;
    StrategyParams params;
    StrategyKind kind;
    std::vector<QpuTechnologyProfile> profiles; // one per physical QPU
    std::vector<QpuRuntime> qpus;
    std::vector<JobRun> jobs;
    int free_nodes = 0;
    std::deque<int> classical_queue, quantum_queue; // waiting job indices, FIFO
    std::vector<int> expand_queue;                  // shrunk jobs awaiting nodes, FIFO

    Seconds now() const { return engine.now(); }

    // trace marker at the current instant
    void mark(EventKind kind, const JobRun& job, int phase, std::string resources);

    // --- gang machinery (coschedule / vqpu / malleable) ---
    bool in_classical_queue(const JobRun& job) const { return job.nodes_target > 0; }
    bool in_quantum_queue(const JobRun& job) const { return job.qpu_need > 0; }
    bool heads_everywhere(const JobRun& job) const;
    bool gang_resources_free(const JobRun& job, bool use_leases) const;
    void pop_from_queues(const JobRun& job);
    void gang_submit(JobRun& job);
    void gang_grant(JobRun& job, bool use_leases);
    bool gang_pass(bool use_leases); // one grant attempt; true if something was granted

    // --- phase machinery ---
    void start_phase(JobRun& job, int phase);
    void schedule_next_task(JobRun& job);
    void start_task(JobRun& job, int qpu);
    void pump_qpu(int qpu);
    void phase_complete(JobRun& job);
    void finish_job(JobRun& job);
    void release_all(JobRun& job);
    void schedule_kill(JobRun& job, Seconds wall);
    void maybe_cancel_kill(JobRun& job, Seconds completion, bool completes_allocation);
    void reschedule_classical_end(JobRun& job); // after a node-count change

    // --- workflow helpers ---
    int step_nodes(const JobRun& job) const; // classical component nodes
    Seconds component_walltime(const JobRun& job, PhaseKind kind) const;
    void grant_step(JobRun& job);
    bool step_fits(const JobRun& job) const;
    bool try_backfill_classical();

    // --- malleable helpers ---
    void deliver_expansions();

    Strategy& strategy() { return *strategy_; }

private:
    std::unique_ptr<Strategy> strategy_;
    std::uint64_t seed_ = 0;

    void on_submit_event(int job);
    void on_kill_event(int job);
    void on_task_enqueue(int job);
    void on_task_end(int job, int qpu);
    Seconds next_task_duration(JobRun& job, int qpu);
    int quantum_phase_component_qpu(const JobRun& job) const;
};

} // namespace hqsim
