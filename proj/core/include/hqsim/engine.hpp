#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hqsim/types.hpp"

namespace hqsim {

// Dispatched event log. Append-only, sorted by (time, seq).
struct Trace {
    std::vector<SimEvent> events;
    Seconds horizon = 0; // final clock value
};

class TimeInPastError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A handler threw; dispatch aborts and the partial trace is attached.
class HandlerFaultError : public std::runtime_error {
public:
    HandlerFaultError(SimEvent ev, const std::string& reason, Trace partial)
        : std::runtime_error("handler fault at event seq " + std::to_string(ev.seq) +
                             ": " + reason),
          event(std::move(ev)), reason(reason), partial_trace(std::move(partial)) {}

    SimEvent event;
    std::string reason;
    Trace partial_trace;
};

// Deterministic single-threaded discrete-event kernel. Events are dispatched
// in (time, seq) order; seq is assigned at schedule time so ties reflect the
// causal scheduling order. An event may carry a callback; events without one
// are plain trace markers (or are handled by the fallback handler of run()).
class EventEngine {
public:
    using Callback = std::function<void(const SimEvent&)>;

    // Returns a handle usable with cancel(). Throws TimeInPastError if
    // at < now().
    std::uint64_t schedule(Seconds at, SimEvent ev, Callback cb = {});

    // True iff the event was still pending and is now removed.
    bool cancel(std::uint64_t handle);

    // Dispatches until the queue is empty. Each dispatched event is appended
    // to the trace before its callback runs, so handlers observe a trace that
    // includes the event being handled.
    Trace run(const Callback& fallback = {});

    Seconds now() const { return clock_; }
    std::uint64_t scheduled_count() const { return scheduled_; }
    std::uint64_t dispatched_count() const { return dispatched_; }
    std::uint64_t cancelled_count() const { return cancelled_; }

private:
    struct Pending {
        SimEvent ev;
        Callback cb;
    };

    std::map<std::pair<Seconds, std::uint64_t>, Pending> pending_;
    std::unordered_map<std::uint64_t, Seconds> handle_time_;
    Seconds clock_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t scheduled_ = 0, dispatched_ = 0, cancelled_ = 0;
};

} // namespace hqsim
