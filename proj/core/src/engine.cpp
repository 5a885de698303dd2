#include "hqsim/engine.hpp"

namespace hqsim {

std::uint64_t EventEngine::schedule(Seconds at, SimEvent ev, Callback cb) {
    if (at < clock_)
        throw TimeInPastError("schedule at t=" + std::to_string(at) +
                              " before current clock t=" + std::to_string(clock_));
    const std::uint64_t seq = next_seq_++;
    ev.time = at;
    ev.seq = seq;
    pending_.emplace(std::make_pair(at, seq), Pending{std::move(ev), std::move(cb)});
    handle_time_.emplace(seq, at);
    ++scheduled_;
    return seq;
}

bool EventEngine::cancel(std::uint64_t handle) {
    auto it = handle_time_.find(handle);
    if (it == handle_time_.end()) return false;
    pending_.erase({it->second, handle});
    handle_time_.erase(it);
    ++cancelled_;
    return true;
}

Trace EventEngine::run(const Callback& fallback) {
    Trace trace;
    while (!pending_.empty()) {
        auto it = pending_.begin();
        Pending pending = std::move(it->second);
        pending_.erase(it);
        handle_time_.erase(pending.ev.seq);
        clock_ = pending.ev.time;
        ++dispatched_;
        trace.events.push_back(pending.ev);
        trace.horizon = clock_;
        const Callback& cb = pending.cb ? pending.cb : fallback;
        if (cb) {
            try {
                cb(pending.ev);
            } catch (const std::exception& e) {
                throw HandlerFaultError(pending.ev, e.what(), std::move(trace));
            }
        }
    }
    return trace;
}

} // namespace hqsim
