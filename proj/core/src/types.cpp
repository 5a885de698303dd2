#include "hqsim/types.hpp"

namespace hqsim {

QpuTechnologyProfile QpuTechnologyProfile::fixed(std::string name, Seconds s, Seconds calib) {
    QpuTechnologyProfile p;
    p.name = std::move(name);
    p.model = DurationModel::Fixed;
    p.min_s = p.max_s = s;
    p.calibration_overhead_s = calib;
    return p;
}

QpuTechnologyProfile QpuTechnologyProfile::uniform(std::string name, Seconds lo, Seconds hi,
                                                   Seconds calib) {
    QpuTechnologyProfile p;
    p.name = std::move(name);
    p.model = DurationModel::Uniform;
    p.min_s = lo;
    p.max_s = hi;
    p.calibration_overhead_s = calib;
    return p;
}

bool QpuTechnologyProfile::valid() const {
    if (calibration_overhead_s < 0) return false;
    if (min_s <= 0) return false;
    if (model == DurationModel::Uniform && max_s < min_s) return false;
    return true;
}

Seconds effective_task_duration(const QpuTechnologyProfile& profile, SplitMix64& rng) {
    Seconds base = profile.min_s;
    if (profile.model == DurationModel::Uniform)
        base = rng.uniform(profile.min_s, profile.max_s);
    return base + profile.calibration_overhead_s;
}

int JobSpec::total_nodes() const {
    int n = 0;
    for (const auto& r : requests) n += r.nodes;
    return n;
}

int JobSpec::total_qpu_gres() const {
    int n = 0;
    for (const auto& r : requests) n += r.qpu_gres;
    return n;
}

Seconds JobSpec::min_walltime() const {
    Seconds w = 0;
    bool first = true;
    for (const auto& r : requests) {
        if (first || r.walltime < w) w = r.walltime;
        first = false;
    }
    return w;
}

int ClusterConfig::total_qpus() const {
    int n = 0;
    for (const auto& [profile, count] : qpus) n += count;
    return n;
}

int ClusterConfig::total_vqpus() const { return total_qpus() * vqpus_per_qpu; }

const char* to_string(EventKind kind) {
    switch (kind) {
    case EventKind::JobSubmit: return "JobSubmit";
    case EventKind::AllocGrant: return "AllocGrant";
    case EventKind::AllocRelease: return "AllocRelease";
    case EventKind::PhaseStart: return "PhaseStart";
    case EventKind::PhaseEnd: return "PhaseEnd";
    case EventKind::QTaskEnqueue: return "QTaskEnqueue";
    case EventKind::QTaskStart: return "QTaskStart";
    case EventKind::QTaskEnd: return "QTaskEnd";
    case EventKind::Shrink: return "Shrink";
    case EventKind::Expand: return "Expand";
    case EventKind::JobEnd: return "JobEnd";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    static const EventKind kinds[] = {
        EventKind::JobSubmit,  EventKind::AllocGrant,   EventKind::AllocRelease,
        EventKind::PhaseStart, EventKind::PhaseEnd,     EventKind::QTaskEnqueue,
        EventKind::QTaskStart, EventKind::QTaskEnd,     EventKind::Shrink,
        EventKind::Expand,     EventKind::JobEnd,
    };
    for (EventKind k : kinds)
        if (s == to_string(k)) return k;
    return std::nullopt;
}

ValidationResult validate_cluster(const ClusterConfig& cluster) {
    if (cluster.classical_nodes <= 0)
        return {ValidationError::MalformedSpec, "cluster must have classical_nodes > 0"};
    if (cluster.qpus.empty())
        return {ValidationError::MalformedSpec, "cluster must have at least one QPU"};
    for (const auto& [profile, count] : cluster.qpus) {
        if (count <= 0)
            return {ValidationError::MalformedSpec, "QPU count must be positive"};
        if (!profile.valid())
            return {ValidationError::MalformedSpec,
                    "invalid QPU technology profile '" + profile.name + "'"};
    }
    if (cluster.vqpus_per_qpu < 1)
        return {ValidationError::MalformedSpec, "vqpus_per_qpu must be >= 1"};
    return {};
}

ValidationResult validate_job(const JobSpec& spec, const ClusterConfig& cluster,
                              bool vqpu_leases) {
    if (spec.job_id.empty())
        return {ValidationError::MalformedSpec, "job_id must not be empty"};
    if (spec.submit_time < 0)
        return {ValidationError::MalformedSpec, "submit_time must be >= 0"};
    if (spec.requests.empty())
        return {ValidationError::MalformedSpec, "job has no resource requests"};
    if (spec.phases.empty())
        return {ValidationError::MalformedSpec, "job has no phases"};

    for (const auto& r : spec.requests) {
        if (r.partition != "classical" && r.partition != "quantum")
            return {ValidationError::MalformedSpec,
                    "unknown partition '" + r.partition + "'", r.component_id};
        if (r.walltime <= 0)
            return {ValidationError::MalformedSpec, "walltime must be > 0", r.component_id};
        if (r.nodes < 0 || r.qpu_gres < 0)
            return {ValidationError::MalformedSpec, "negative resource count", r.component_id};
        if (r.partition == "classical" && r.qpu_gres != 0)
            return {ValidationError::MalformedSpec,
                    "classical component must not request qpu gres", r.component_id};
        if (r.partition == "quantum" && r.nodes != 0)
            return {ValidationError::MalformedSpec,
                    "quantum component must not request nodes", r.component_id};
        if (r.nodes > cluster.classical_nodes)
            return {ValidationError::Unsatisfiable,
                    "requested " + std::to_string(r.nodes) + " nodes, cluster has " +
                        std::to_string(cluster.classical_nodes),
                    r.component_id};
        const int qpu_capacity =
            vqpu_leases ? cluster.total_vqpus() : cluster.total_qpus();
        if (r.qpu_gres > qpu_capacity)
            return {ValidationError::Unsatisfiable,
                    "requested " + std::to_string(r.qpu_gres) + " QPUs, cluster has " +
                        std::to_string(qpu_capacity),
                    r.component_id};
    }

    bool has_classical_phase = false, has_quantum_phase = false;
    for (const auto& p : spec.phases) {
        if (p.kind == PhaseKind::Classical) {
            has_classical_phase = true;
            if (p.classical_work <= 0)
                return {ValidationError::MalformedSpec,
                        "classical phase must have classical_work > 0"};
            if (p.quantum_tasks != 0)
                return {ValidationError::MalformedSpec,
                        "classical phase must not have quantum tasks"};
        } else {
            has_quantum_phase = true;
            if (p.quantum_tasks < 1)
                return {ValidationError::MalformedSpec,
                        "quantum phase must have quantum_tasks >= 1"};
            if (p.classical_work != 0)
                return {ValidationError::MalformedSpec,
                        "quantum phase must not have classical_work"};
        }
        if (p.prep_time_per_task < 0)
            return {ValidationError::MalformedSpec, "prep_time_per_task must be >= 0"};
    }

    // phases need a component able to host them
    if (has_classical_phase && spec.total_nodes() < 1)
        return {ValidationError::MalformedSpec,
                "job has classical phases but no classical nodes requested"};
    if (has_quantum_phase && spec.total_qpu_gres() < 1)
        return {ValidationError::MalformedSpec,
                "job has quantum phases but no qpu gres requested"};

    return {};
}

} // namespace hqsim
