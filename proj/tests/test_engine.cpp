#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "hqsim/engine.hpp"

using namespace hqsim;

namespace {

SimEvent marker(EventKind kind, const std::string& job = "j") {
    SimEvent e;
    e.kind = kind;
    e.job_id = job;
    return e;
}

} // namespace

TEST_CASE("events dispatch in time order") {
    EventEngine eng;
    std::vector<double> seen;
    auto record = [&](const SimEvent& e) { seen.push_back(e.time); };
    eng.schedule(5.0, marker(EventKind::PhaseEnd), record);
    eng.schedule(1.0, marker(EventKind::PhaseStart), record);
    eng.schedule(3.0, marker(EventKind::QTaskStart), record);
    const Trace t = eng.run();
    CHECK(seen == std::vector<double>{1.0, 3.0, 5.0});
    CHECK(t.horizon == 5.0);
    REQUIRE(t.events.size() == 3);
    CHECK(t.events[0].kind == EventKind::PhaseStart);
}

TEST_CASE("ties break by scheduling order (seq)") {
    EventEngine eng;
    std::vector<std::string> seen;
    for (const char* id : {"a", "b", "c"})
        eng.schedule(2.0, marker(EventKind::JobSubmit, id),
                     [&](const SimEvent& e) { seen.push_back(e.job_id); });
    eng.run();
    CHECK(seen == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("seq values are unique and ascending in the trace") {
    EventEngine eng;
    for (int i = 0; i < 50; ++i)
        eng.schedule(static_cast<double>(i % 7), marker(EventKind::JobSubmit));
    const Trace t = eng.run();
    REQUIRE(t.events.size() == 50);
    for (size_t i = 1; i < t.events.size(); ++i) {
        const bool time_ok = t.events[i - 1].time < t.events[i].time ||
                             (t.events[i - 1].time == t.events[i].time &&
                              t.events[i - 1].seq < t.events[i].seq);
        CHECK(time_ok);
    }
}

TEST_CASE("handlers can schedule at the current instant but not in the past") {
    EventEngine eng;
    bool chained = false;
    eng.schedule(4.0, marker(EventKind::PhaseStart), [&](const SimEvent&) {
        eng.schedule(4.0, marker(EventKind::PhaseEnd),
                     [&](const SimEvent&) { chained = true; });
        CHECK_THROWS_AS(eng.schedule(3.9, marker(EventKind::PhaseEnd)), TimeInPastError);
    });
    const Trace t = eng.run();
    CHECK(chained);
    CHECK(t.events.size() == 2);
}

TEST_CASE("cancel removes a pending event exactly once") {
    EventEngine eng;
    bool fired = false;
    const auto h = eng.schedule(1.0, marker(EventKind::JobEnd),
                                [&](const SimEvent&) { fired = true; });
    CHECK(eng.cancel(h));
    CHECK_FALSE(eng.cancel(h)); // already gone
    const Trace t = eng.run();
    CHECK_FALSE(fired);
    CHECK(t.events.empty());
    CHECK(eng.cancelled_count() == 1);
}

TEST_CASE("cancel of an already-dispatched event returns false") {
    EventEngine eng;
    const auto h = eng.schedule(1.0, marker(EventKind::JobEnd));
    eng.run();
    CHECK_FALSE(eng.cancel(h));
}

TEST_CASE("no lost events: scheduled = dispatched + cancelled") {
    EventEngine eng;
    std::vector<std::uint64_t> handles;
    for (int i = 0; i < 100; ++i)
        handles.push_back(eng.schedule(static_cast<double>(i), marker(EventKind::JobSubmit)));
    for (size_t i = 0; i < handles.size(); i += 3) eng.cancel(handles[i]);
    eng.run();
    CHECK(eng.scheduled_count() == 100);
    CHECK(eng.scheduled_count() == eng.dispatched_count() + eng.cancelled_count());
}

TEST_CASE("fallback handler receives callback-less events") {
    EventEngine eng;
    int fallback_hits = 0;
    eng.schedule(1.0, marker(EventKind::JobSubmit));
    eng.schedule(2.0, marker(EventKind::JobSubmit), [](const SimEvent&) {});
    eng.run([&](const SimEvent&) { ++fallback_hits; });
    CHECK(fallback_hits == 1);
}

TEST_CASE("a throwing handler surfaces as HandlerFaultError with partial trace") {
    EventEngine eng;
    eng.schedule(1.0, marker(EventKind::PhaseStart), [](const SimEvent&) {});
    eng.schedule(2.0, marker(EventKind::PhaseEnd, "bad"), [](const SimEvent&) {
        throw std::runtime_error("boom");
    });
    eng.schedule(3.0, marker(EventKind::JobEnd), [](const SimEvent&) {});
    try {
        eng.run();
        FAIL("expected HandlerFaultError");
    } catch (const HandlerFaultError& e) {
        CHECK(e.reason == "boom");
        CHECK(e.event.job_id == "bad");
        // partial trace contains everything dispatched up to and including the fault
        REQUIRE(e.partial_trace.events.size() == 2);
        CHECK(e.partial_trace.events[1].kind == EventKind::PhaseEnd);
    }
}

TEST_CASE("determinism: same schedule sequence yields identical traces") {
    auto build = [] {
        EventEngine eng;
        for (int i = 0; i < 200; ++i) {
            SimEvent e = marker(EventKind::JobSubmit, "j" + std::to_string(i % 13));
            e.phase_index = i % 5;
            eng.schedule(static_cast<double>((i * 37) % 11), e);
        }
        return eng.run();
    };
    const Trace a = build();
    const Trace b = build();
    REQUIRE(a.events.size() == b.events.size());
    for (size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].time == b.events[i].time);
        CHECK(a.events[i].seq == b.events[i].seq);
        CHECK(a.events[i].job_id == b.events[i].job_id);
    }
}
