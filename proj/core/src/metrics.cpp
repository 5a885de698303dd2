#include "hqsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace hqsim {
namespace {

struct ResourceRef {
    enum class Kind { None, Nodes, Qpu, Lease } kind = Kind::None;
    int count = 0; // nodes
    int qpu = -1;
};

ResourceRef parse_resource(const std::string& s) {
    ResourceRef ref;
    if (s.rfind("nodes:", 0) == 0) {
        ref.kind = ResourceRef::Kind::Nodes;
        ref.count = std::atoi(s.c_str() + 6);
    } else if (s.rfind("qpu:", 0) == 0) {
        ref.qpu = std::atoi(s.c_str() + 4);
        ref.kind = s.find("/lease:") != std::string::npos ? ResourceRef::Kind::Lease
                                                          : ResourceRef::Kind::Qpu;
    }
    return ref;
}

struct JobScan {
    double submit = 0;
    double start = std::numeric_limits<double>::quiet_NaN();
    double end = std::numeric_limits<double>::quiet_NaN();
    bool killed = false;
    int owned = 0;
    bool computing = false;
    double last_t = 0;
    double busy_ns = 0, alloc_ns = 0;
    int last_started = -1, last_ended = -1;
    int outstanding_enqueues = 0;
    double ready = 0;
    double total_wait = 0;

    void advance(double t) {
        if (computing) busy_ns += owned * (t - last_t);
        alloc_ns += owned * (t - last_t);
        last_t = t;
    }
};

struct QpuScan {
    int depth = 0;
    double last_t = 0;
    double alloc_s = 0;
    double busy_start = std::numeric_limits<double>::quiet_NaN();
    double busy_s = 0;

    void advance(double t) {
        if (depth > 0) alloc_s += t - last_t;
        last_t = t;
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

} // namespace

MetricsReport analyze(const Trace& trace, const ClusterConfig& cluster) {
    if (trace.events.empty()) throw MalformedTraceError("empty trace (no JobSubmit)");
    if (trace.events.front().kind != EventKind::JobSubmit)
        throw MalformedTraceError("trace does not begin with JobSubmit");

    // total (time, seq) order, unique seq
    std::set<std::uint64_t> seqs;
    for (size_t i = 0; i < trace.events.size(); ++i) {
        const auto& e = trace.events[i];
        if (!seqs.insert(e.seq).second)
            throw MalformedTraceError("duplicate seq " + std::to_string(e.seq));
        if (i > 0) {
            const auto& prev = trace.events[i - 1];
            if (e.time < prev.time || (e.time == prev.time && e.seq < prev.seq))
                throw MalformedTraceError("events not ordered by (time, seq)");
        }
    }

    const double first_submit = trace.events.front().time;
    const double last_time = trace.events.back().time;

    std::map<std::string, JobScan> job_scans;
    std::vector<QpuScan> qpu_scans(static_cast<size_t>(cluster.total_qpus()));
    for (auto& q : qpu_scans) q.last_t = first_submit;

    std::vector<double> waits;

    auto qpu_at = [&](int idx) -> QpuScan& {
        if (idx < 0 || idx >= static_cast<int>(qpu_scans.size()))
            throw MalformedTraceError("event references unknown qpu " + std::to_string(idx));
        return qpu_scans[static_cast<size_t>(idx)];
    };

    for (const auto& e : trace.events) {
        const ResourceRef res = parse_resource(e.resource_ids);
        auto it = job_scans.find(e.job_id);
        if (e.kind != EventKind::JobSubmit && it == job_scans.end())
            throw MalformedTraceError("event for unknown job '" + e.job_id + "'");
        switch (e.kind) {
        case EventKind::JobSubmit: {
            JobScan scan;
            scan.submit = e.time;
            scan.last_t = e.time;
            scan.ready = e.time;
            job_scans.emplace(e.job_id, scan);
            break;
        }
        case EventKind::AllocGrant: {
            JobScan& j = it->second;
            if (std::isnan(j.start)) j.start = e.time;
            if (res.kind == ResourceRef::Kind::Nodes) {
                j.advance(e.time);
                j.owned += res.count;
            } else if (res.kind != ResourceRef::Kind::None) {
                QpuScan& q = qpu_at(res.qpu);
                q.advance(e.time);
                ++q.depth;
            }
            break;
        }
        case EventKind::AllocRelease: {
            JobScan& j = it->second;
            if (res.kind == ResourceRef::Kind::Nodes) {
                if (res.count > j.owned)
                    throw MalformedTraceError("release of more nodes than granted for '" +
                                              e.job_id + "'");
                j.advance(e.time);
                j.owned -= res.count;
            } else if (res.kind != ResourceRef::Kind::None) {
                QpuScan& q = qpu_at(res.qpu);
                if (q.depth <= 0)
                    throw MalformedTraceError("AllocRelease without matching AllocGrant");
                q.advance(e.time);
                --q.depth;
            }
            break;
        }
        case EventKind::PhaseStart: {
            JobScan& j = it->second;
            if (e.phase_index != j.last_started + 1 || j.last_ended != e.phase_index - 1)
                throw MalformedTraceError("out-of-order PhaseStart for '" + e.job_id + "'");
            j.last_started = e.phase_index;
            j.advance(e.time);
            j.computing = true;
            const double wait = std::max(0.0, e.time - j.ready);
            waits.push_back(wait);
            j.total_wait += wait;
            break;
        }
        case EventKind::PhaseEnd: {
            JobScan& j = it->second;
            if (e.phase_index != j.last_started || j.last_ended != e.phase_index - 1)
                throw MalformedTraceError("out-of-order PhaseEnd for '" + e.job_id + "'");
            j.last_ended = e.phase_index;
            j.advance(e.time);
            j.computing = false;
            j.ready = e.time;
            break;
        }
        case EventKind::QTaskEnqueue: {
            JobScan& j = it->second;
            j.advance(e.time);
            j.computing = false;
            ++j.outstanding_enqueues;
            break;
        }
        case EventKind::QTaskStart: {
            JobScan& j = it->second;
            if (j.outstanding_enqueues <= 0)
                throw MalformedTraceError("QTaskStart without QTaskEnqueue for '" +
                                          e.job_id + "'");
            --j.outstanding_enqueues;
            QpuScan& q = qpu_at(res.qpu);
            if (!std::isnan(q.busy_start))
                throw MalformedTraceError("overlapping tasks on qpu " +
                                          std::to_string(res.qpu));
            q.busy_start = e.time;
            break;
        }
        case EventKind::QTaskEnd: {
            QpuScan& q = qpu_at(res.qpu);
            if (std::isnan(q.busy_start))
                throw MalformedTraceError("QTaskEnd without QTaskStart on qpu " +
                                          std::to_string(res.qpu));
            q.busy_s += e.time - q.busy_start;
            q.busy_start = std::numeric_limits<double>::quiet_NaN();
            JobScan& j = it->second;
            j.advance(e.time);
            j.computing = true;
            break;
        }
        case EventKind::Shrink: {
            JobScan& j = it->second;
            if (res.count > j.owned)
                throw MalformedTraceError("shrink below zero nodes for '" + e.job_id + "'");
            j.advance(e.time);
            j.owned -= res.count;
            break;
        }
        case EventKind::Expand: {
            JobScan& j = it->second;
            j.advance(e.time);
            j.owned += res.count;
            break;
        }
        case EventKind::JobEnd: {
            JobScan& j = it->second;
            const bool killed = e.resource_ids == "walltime-exceeded";
            if (!killed && j.last_ended != j.last_started)
                throw MalformedTraceError("JobEnd before final PhaseEnd for '" + e.job_id +
                                          "'");
            j.advance(e.time);
            j.computing = false;
            j.end = e.time;
            j.killed = killed;
            break;
        }
        }
    }

    MetricsReport report;
    report.makespan = last_time - first_submit;

    for (auto& [id, j] : job_scans) {
        j.advance(last_time);
        report.node_busy_ns += j.busy_ns;
        report.node_allocated_ns += j.alloc_ns;
        JobMetrics row;
        row.job_id = id;
        row.submit = j.submit;
        row.start = j.start;
        row.end = j.end;
        row.turnaround = j.end - j.submit;
        row.total_queue_wait = j.total_wait;
        row.killed = j.killed;
        report.jobs.push_back(std::move(row));
    }

    for (auto& q : qpu_scans) {
        q.advance(last_time);
        QpuMetrics m;
        m.busy_s = q.busy_s;
        m.allocated_s = q.alloc_s;
        m.util_window = report.makespan > 0 ? q.busy_s / report.makespan : 0;
        m.util_allocated = q.alloc_s > 0 ? q.busy_s / q.alloc_s : 0;
        report.qpu_busy_total += m.busy_s;
        report.qpu_allocated_total += m.allocated_s;
        report.qpu.push_back(m);
    }
    const double qpu_window = report.makespan * static_cast<double>(qpu_scans.size());
    report.qpu_utilization_window = qpu_window > 0 ? report.qpu_busy_total / qpu_window : 0;
    report.qpu_utilization_allocated =
        report.qpu_allocated_total > 0 ? report.qpu_busy_total / report.qpu_allocated_total
                                       : 0;
    const double node_window = report.makespan * cluster.classical_nodes;
    report.node_utilization = node_window > 0 ? report.node_busy_ns / node_window : 0;
    report.node_idle_allocated = report.node_allocated_ns - report.node_busy_ns;
    report.node_idle_allocated_fraction =
        report.node_allocated_ns > 0 ? report.node_idle_allocated / report.node_allocated_ns
                                     : 0;
    if (!waits.empty()) {
        double sum = 0;
        for (double w : waits) {
            sum += w;
            report.max_wait = std::max(report.max_wait, w);
        }
        report.mean_wait = sum / static_cast<double>(waits.size());
    }
    return report;
}

ComparisonTable compare(const std::vector<std::pair<std::string, MetricsReport>>& reports) {
    if (reports.size() < 2)
        throw MismatchedWorkloadError("compare requires at least two reports");
    auto signature = [](const MetricsReport& r) {
        std::vector<std::pair<std::string, double>> sig;
        for (const auto& j : r.jobs) sig.emplace_back(j.job_id, j.submit);
        std::sort(sig.begin(), sig.end());
        return sig;
    };
    const auto base_sig = signature(reports.front().second);
    for (const auto& [name, r] : reports)
        if (signature(r) != base_sig)
            throw MismatchedWorkloadError("reports cover different workloads");

    ComparisonTable table;
    const MetricsReport& base = reports.front().second;
    const double qpu_idle = 1.0 - base.qpu_utilization_allocated;
    table.imbalance = base.node_idle_allocated_fraction >= qpu_idle ? "classical-starved"
                                                                    : "quantum-starved";
    for (const auto& [name, r] : reports) {
        ComparisonRow row;
        row.strategy = name;
        row.report = r;
        row.d_qpu_utilization = r.qpu_utilization_allocated - base.qpu_utilization_allocated;
        row.d_node_utilization = r.node_utilization - base.node_utilization;
        row.d_node_idle_allocated = r.node_idle_allocated - base.node_idle_allocated;
        row.d_makespan = r.makespan - base.makespan;
        row.d_mean_wait = r.mean_wait - base.mean_wait;
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string jobs_csv(const std::string& strategy, const MetricsReport& report) {
    std::ostringstream out;
    out << "job_id,strategy,submit,start,end,turnaround,total_queue_wait\n";
    for (const auto& j : report.jobs)
        out << j.job_id << ',' << strategy << ',' << fmt(j.submit) << ',' << fmt(j.start)
            << ',' << fmt(j.end) << ',' << fmt(j.turnaround) << ','
            << fmt(j.total_queue_wait) << '\n';
    return out.str();
}

std::string summary_csv_header() {
    return "strategy,qpu_utilization,node_utilization,node_idle_allocated,makespan,"
           "mean_wait,max_wait\n";
}

std::string summary_csv_row(const std::string& strategy, const MetricsReport& report) {
    std::ostringstream out;
    out << strategy << ',' << fmt(report.qpu_utilization_allocated) << ','
        << fmt(report.node_utilization) << ',' << fmt(report.node_idle_allocated) << ','
        << fmt(report.makespan) << ',' << fmt(report.mean_wait) << ','
        << fmt(report.max_wait) << '\n';
    return out.str();
}

} // namespace hqsim
