#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hqsim {

enum class StrategyKind {
    Coschedule, // all-or-nothing gang allocation, exclusive QPU
    Workflow,   // per-step independent queuing
    Vqpu,       // classical nodes held, QPU shared via leases
    Malleable,  // shrink during quantum phases, re-expand after
};

const char* to_string(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(std::string_view name);
std::vector<std::string> strategy_names();

struct StrategyParams {
    int retain = 1;        // malleable: nodes kept through quantum phases
    bool backfill = false; // EASY backfill on the classical queue (workflow, malleable)
};

class Simulation;

// Allocation policy invoked synchronously by the simulation at job submission,
// at phase boundaries, and whenever resources are released.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual StrategyKind kind() const = 0;

    // place the job in the wait queue(s)
    virtual void on_submit(Simulation& sim, int job) = 0;
    // grant pass over the wait queues; must be a no-op when nothing fits
    virtual void try_schedule(Simulation& sim) = 0;
    // transition after phase `phase` of `job` completed
    virtual void on_phase_end(Simulation& sim, int job, int phase) = 0;
    // whether quantum tasks go through the per-QPU FIFO (lease sharing)
    virtual bool shared_qpu() const { return false; }
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const StrategyParams& params);

} // namespace hqsim
