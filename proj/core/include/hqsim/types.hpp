#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hqsim/rng.hpp"

namespace hqsim {

using Seconds = double;

// ---------------------------------------------------------------------------
// QPU technology

enum class DurationModel { Fixed, Uniform };

// Per-technology quantum task duration model. calibration_overhead_s is added
// once per task on top of the sampled duration (register calibration on
// neutral-atom machines is the motivating case).
struct QpuTechnologyProfile {
    std::string name;
    DurationModel model = DurationModel::Fixed;
    Seconds min_s = 0; // Fixed uses min_s only
    Seconds max_s = 0;
    Seconds calibration_overhead_s = 0;

    static QpuTechnologyProfile fixed(std::string name, Seconds s, Seconds calib = 0);
    static QpuTechnologyProfile uniform(std::string name, Seconds lo, Seconds hi,
                                        Seconds calib = 0);
    bool valid() const;
};

// sampled duration + calibration overhead; advances rng deterministically
Seconds effective_task_duration(const QpuTechnologyProfile& profile, SplitMix64& rng);

// ---------------------------------------------------------------------------
// Jobs

// One hetjob component. Classical components carry nodes, quantum components
// carry qpu_gres; the other count is zero.
struct ResourceRequest {
    int component_id = 0;
    std::string partition; // "classical" | "quantum"
    int nodes = 0;
    int qpu_gres = 0;
    Seconds walltime = 0;
};

enum class PhaseKind { Classical, Quantum };

struct Phase {
    PhaseKind kind = PhaseKind::Classical;
    double classical_work = 0;     // node-seconds; duration on n nodes = work / n
    int quantum_tasks = 0;         // quantum phases only
    Seconds prep_time_per_task = 0; // classical prep preceding each task submission
};

struct JobSpec {
    std::string job_id;
    Seconds submit_time = 0;
    std::vector<ResourceRequest> requests; // hetjob components, ordered
    std::vector<Phase> phases;             // ordered

    int total_nodes() const;
    int total_qpu_gres() const;
    Seconds min_walltime() const;
};

struct ClusterConfig {
    int classical_nodes = 0;
    std::vector<std::pair<QpuTechnologyProfile, int>> qpus;
    int vqpus_per_qpu = 1; // K, used only by the vqpu strategy

    int total_qpus() const;
    int total_vqpus() const;
};

// ---------------------------------------------------------------------------
// Events

enum class EventKind {
    JobSubmit,
    AllocGrant,
    AllocRelease,
    PhaseStart,
    PhaseEnd,
    QTaskEnqueue,
    QTaskStart,
    QTaskEnd,
    Shrink,
    Expand,
    JobEnd,
};

const char* to_string(EventKind kind);
std::optional<EventKind> event_kind_from_string(std::string_view s);

// A dispatched simulation event. Within a trace events are totally ordered by
// (time, seq); seq is assigned at schedule time and unique.
struct SimEvent {
    Seconds time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::JobSubmit;
    std::string job_id;
    int phase_index = -1;
    std::string resource_ids; // "nodes:N", "qpu:I", "qpu:I/lease:S", ...
};

// ---------------------------------------------------------------------------
// Validation

enum class ValidationError { None, Unsatisfiable, MalformedSpec };

struct ValidationResult {
    ValidationError error = ValidationError::None;
    std::string reason;
    int component = -1; // offending request, where applicable

    bool ok() const { return error == ValidationError::None; }
};

ValidationResult validate_cluster(const ClusterConfig& cluster);

// vqpu_leases selects whether quantum requests are checked against the
// physical QPU count or against the lease count (K per QPU).
ValidationResult validate_job(const JobSpec& spec, const ClusterConfig& cluster,
                              bool vqpu_leases = false);

} // namespace hqsim
