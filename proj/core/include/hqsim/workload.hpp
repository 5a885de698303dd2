#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hqsim/rng.hpp"
#include "hqsim/types.hpp"

namespace hqsim {

class InvalidProfileError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Scalar parameter distribution for workload templates.
struct Dist {
    enum class Kind { Fixed, Uniform } kind = Kind::Fixed;
    double a = 0, b = 0; // Fixed uses a

    static Dist fixed(double v) { return {Kind::Fixed, v, v}; }
    static Dist uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
    double sample(SplitMix64& rng) const;
    int sample_count(SplitMix64& rng) const; // rounded, floored at 1
};

struct PhaseTemplate {
    PhaseKind kind = PhaseKind::Classical;
    Dist classical_work = Dist::fixed(0); // node-seconds
    Dist quantum_tasks = Dist::fixed(1);
    Dist prep_time = Dist::fixed(0);
};

enum class ArrivalKind { AllAtZero, Poisson };

struct WorkloadProfile {
    int job_count = 0;
    ArrivalKind arrival = ArrivalKind::AllAtZero;
    double rate_per_hour = 0; // Poisson only
    std::vector<PhaseTemplate> phases;
    int nodes = 1;     // classical component size
    int qpu_gres = 0;  // quantum component size (0 = no quantum component)
    Seconds walltime = 3600;
    std::string technology = "superconducting";
    std::uint64_t seed = 0;
};

// Deterministic: same (profile, seed) always yields the identical job list,
// submit times sorted ascending. Throws InvalidProfileError.
std::vector<JobSpec> generate(const WorkloadProfile& profile);

// Built-in duration profiles. The two §-anchored technologies are
// superconducting (fixed 10 s) and neutral-atoms (fixed 1500 s + 300 s
// calibration); everything else is a configurable placeholder.
QpuTechnologyProfile default_technology_profile(const std::string& name);

// The canonical single-job imbalance scenario: a 10-node / 1-QPU cluster with
// 1 h walltimes. tech is "superconducting" or "neutral-atoms".
std::pair<ClusterConfig, std::vector<JobSpec>> paper_scenario(const std::string& tech);

// JSON-lines workload exchange format, one JobSpec per line.
std::string save_workload(const std::vector<JobSpec>& jobs);
std::vector<JobSpec> load_workload(const std::string& text); // throws InvalidProfileError

} // namespace hqsim
