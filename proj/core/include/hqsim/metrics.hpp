#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hqsim/engine.hpp"
#include "hqsim/types.hpp"

namespace hqsim {

class MalformedTraceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MismatchedWorkloadError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QpuMetrics {
    double busy_s = 0;         // sum of task execution intervals
    double allocated_s = 0;    // union of exclusive/lease allocation intervals
    double util_window = 0;    // busy / makespan
    double util_allocated = 0; // busy / allocated (0 when never allocated)
};

struct JobMetrics {
    std::string job_id;
    double submit = 0;
    double start = 0; // first allocation grant
    double end = 0;
    double turnaround = 0;
    double total_queue_wait = 0; // sum of per-step waits
    bool killed = false;
};

struct MetricsReport {
    std::vector<QpuMetrics> qpu;
    double qpu_busy_total = 0;
    double qpu_allocated_total = 0;
    double qpu_utilization_window = 0;    // aggregate busy / (num_qpus * makespan)
    double qpu_utilization_allocated = 0; // aggregate busy / aggregate allocated
    double node_busy_ns = 0;              // node-seconds actually computing
    double node_allocated_ns = 0;         // node-seconds held
    double node_utilization = 0;          // busy / (classical_nodes * makespan)
    double node_idle_allocated = 0;       // allocated - busy node-seconds
    double node_idle_allocated_fraction = 0;
    double makespan = 0; // first JobSubmit to last event
    double mean_wait = 0;
    double max_wait = 0;
    std::vector<JobMetrics> jobs;
};

// Single linear replay scan over the trace, independent of strategy
// internals. Checks per-job event causality and per-QPU mutual exclusion;
// throws MalformedTraceError on violations.
MetricsReport analyze(const Trace& trace, const ClusterConfig& cluster);

struct ComparisonRow {
    std::string strategy;
    MetricsReport report;
    // deltas vs the first (baseline) row
    double d_qpu_utilization = 0;
    double d_node_utilization = 0;
    double d_node_idle_allocated = 0;
    double d_makespan = 0;
    double d_mean_wait = 0;
};

struct ComparisonTable {
    std::vector<ComparisonRow> rows;
    std::string imbalance; // "quantum-starved" | "classical-starved", from baseline
};

// Requires >= 2 reports over the same workload (same job ids and submit
// times); throws MismatchedWorkloadError otherwise.
ComparisonTable compare(const std::vector<std::pair<std::string, MetricsReport>>& reports);

// CSV export. One row per job plus a summary record per report.
std::string jobs_csv(const std::string& strategy, const MetricsReport& report);
std::string summary_csv_header();
std::string summary_csv_row(const std::string& strategy, const MetricsReport& report);

} // namespace hqsim
