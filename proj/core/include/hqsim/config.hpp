#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hqsim/strategy.hpp"
#include "hqsim/types.hpp"
#include "hqsim/workload.hpp"

namespace hqsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class WorkloadSource { Profile, File, Hetjob };

struct OutputConfig {
    std::string format = "csv"; // "csv" | "json"
    std::string directory;      // empty: no files written
    bool trace = false;
};

// A full scenario: cluster, exactly one workload source, strategy, output.
struct ScenarioConfig {
    ClusterConfig cluster;
    WorkloadSource source = WorkloadSource::Profile;
    WorkloadProfile profile;
    std::string workload_path; // File / Hetjob sources
    StrategyKind strategy = StrategyKind::Coschedule;
    StrategyParams params;
    std::uint64_t seed = 0;
    OutputConfig output;
};

// Loads a JSON scenario config (sections: cluster, workload, strategy,
// output) and applies `--set section.key=value` overrides before
// materializing. Throws ConfigError on any schema violation.
ScenarioConfig load_scenario(const std::string& path,
                             const std::vector<std::string>& overrides = {});

ScenarioConfig scenario_from_json_text(const std::string& text,
                                       const std::vector<std::string>& overrides = {});

// Materializes the scenario's job list (profile generation, workload file, or
// hetjob script). Throws ConfigError / InvalidProfileError.
std::vector<JobSpec> build_workload(const ScenarioConfig& config);

} // namespace hqsim
