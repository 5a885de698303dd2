#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hqsim/engine.hpp"
#include "hqsim/strategy.hpp"
#include "hqsim/types.hpp"

namespace hqsim {

struct SimResult {
    Trace trace;
    bool fault = false;
    std::string fault_reason;
};

// Runs one deterministic simulation of `jobs` on `cluster` under the given
// strategy. Jobs must already pass validate_job. Identical inputs produce
// bit-identical traces. Task durations are sampled from per-job SplitMix64
// streams derived from `seed`, so they do not depend on the strategy.
SimResult simulate(const ClusterConfig& cluster, const std::vector<JobSpec>& jobs,
                   StrategyKind strategy, const StrategyParams& params = {},
                   std::uint64_t seed = 0);

// One event per line, tab-separated: time, seq, kind, job_id, phase_index,
// resource_ids.
std::string dump_trace(const Trace& trace);

} // namespace hqsim
