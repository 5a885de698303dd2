#include <doctest.h>

#include "hqsim/workload.hpp"

using namespace hqsim;

namespace {

WorkloadProfile sample_profile() {
    WorkloadProfile p;
    p.job_count = 5;
    p.nodes = 4;
    p.qpu_gres = 1;
    p.walltime = 3600;
    PhaseTemplate c;
    c.kind = PhaseKind::Classical;
    c.classical_work = Dist::uniform(100, 500);
    PhaseTemplate q;
    q.kind = PhaseKind::Quantum;
    q.quantum_tasks = Dist::uniform(1, 8);
    q.prep_time = Dist::fixed(5);
    p.phases = {c, q};
    p.seed = 11;
    return p;
}

} // namespace

TEST_CASE("generation is deterministic in (profile, seed)") {
    const auto a = generate(sample_profile());
    const auto b = generate(sample_profile());
    REQUIRE(a.size() == 5);
    REQUIRE(b.size() == 5);
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].job_id == b[i].job_id);
        CHECK(a[i].submit_time == b[i].submit_time);
        REQUIRE(a[i].phases.size() == b[i].phases.size());
        for (size_t p = 0; p < a[i].phases.size(); ++p) {
            CHECK(a[i].phases[p].classical_work == b[i].phases[p].classical_work);
            CHECK(a[i].phases[p].quantum_tasks == b[i].phases[p].quantum_tasks);
        }
    }

    auto other = sample_profile();
    other.seed = 12;
    const auto c = generate(other);
    bool differs = false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i].phases[0].classical_work != c[i].phases[0].classical_work) differs = true;
    CHECK(differs);
}

TEST_CASE("generated jobs carry the requested components") {
    const auto jobs = generate(sample_profile());
    for (const auto& j : jobs) {
        REQUIRE(j.requests.size() == 2);
        CHECK(j.requests[0].partition == "classical");
        CHECK(j.requests[0].nodes == 4);
        CHECK(j.requests[1].partition == "quantum");
        CHECK(j.requests[1].qpu_gres == 1);
        CHECK(j.min_walltime() == 3600.0);
        REQUIRE(j.phases.size() == 2);
        CHECK(j.phases[0].classical_work >= 100);
        CHECK(j.phases[0].classical_work <= 500);
        CHECK(j.phases[1].quantum_tasks >= 1);
        CHECK(j.phases[1].quantum_tasks <= 8);
    }
}

TEST_CASE("all-at-zero arrivals submit at t=0, poisson arrivals ascend") {
    const auto zero = generate(sample_profile());
    for (const auto& j : zero) CHECK(j.submit_time == 0.0);

    auto p = sample_profile();
    p.arrival = ArrivalKind::Poisson;
    p.rate_per_hour = 30;
    p.job_count = 50;
    const auto jobs = generate(p);
    REQUIRE(jobs.size() == 50);
    CHECK(jobs[0].submit_time > 0.0);
    for (size_t i = 1; i < jobs.size(); ++i)
        CHECK(jobs[i].submit_time >= jobs[i - 1].submit_time);
    const auto again = generate(p);
    for (size_t i = 0; i < jobs.size(); ++i)
        CHECK(jobs[i].submit_time == again[i].submit_time);
}

TEST_CASE("invalid profiles are rejected") {
    auto p = sample_profile();
    p.phases.clear();
    CHECK_THROWS_AS(generate(p), InvalidProfileError);

    p = sample_profile();
    p.arrival = ArrivalKind::Poisson;
    p.rate_per_hour = 0;
    CHECK_THROWS_AS(generate(p), InvalidProfileError);

    p = sample_profile();
    p.walltime = 0;
    CHECK_THROWS_AS(generate(p), InvalidProfileError);

    p = sample_profile();
    p.nodes = 0;
    p.qpu_gres = 0;
    CHECK_THROWS_AS(generate(p), InvalidProfileError);
}

TEST_CASE("built-in technology profiles") {
    const auto sc = default_technology_profile("superconducting");
    CHECK(sc.model == DurationModel::Fixed);
    CHECK(sc.min_s == 10.0);
    CHECK(sc.calibration_overhead_s == 0.0);

    const auto na = default_technology_profile("neutral-atoms");
    CHECK(na.min_s == 1500.0);
    CHECK(na.calibration_overhead_s == 300.0);

    CHECK_THROWS_AS(default_technology_profile("abacus"), InvalidProfileError);
}

TEST_CASE("canonical scenarios have the documented shape") {
    const auto [cluster, jobs] = paper_scenario("superconducting");
    CHECK(cluster.classical_nodes == 10);
    CHECK(cluster.total_qpus() == 1);
    REQUIRE(jobs.size() == 1);
    REQUIRE(jobs[0].phases.size() == 1);
    CHECK(jobs[0].phases[0].quantum_tasks == 60);
    CHECK(jobs[0].phases[0].prep_time_per_task == 50.0);
    CHECK(jobs[0].requests[0].nodes == 10);
    CHECK(jobs[0].requests[1].qpu_gres == 1);
    CHECK(jobs[0].min_walltime() == 3600.0);

    const auto [cluster2, jobs2] = paper_scenario("neutral-atoms");
    REQUIRE(jobs2.size() == 1);
    REQUIRE(jobs2[0].phases.size() == 3);
    CHECK(jobs2[0].phases[0].classical_work == 9000.0);
    CHECK(jobs2[0].phases[1].quantum_tasks == 1);
    CHECK(jobs2[0].phases[2].classical_work == 9000.0);

    CHECK_THROWS_AS(paper_scenario("trapped-ion"), InvalidProfileError);
}

TEST_CASE("workload save/load round-trips") {
    const auto jobs = generate(sample_profile());
    const auto text = save_workload(jobs);
    const auto back = load_workload(text);
    REQUIRE(back.size() == jobs.size());
    for (size_t i = 0; i < jobs.size(); ++i) {
        CHECK(back[i].job_id == jobs[i].job_id);
        CHECK(back[i].submit_time == jobs[i].submit_time);
        REQUIRE(back[i].requests.size() == jobs[i].requests.size());
        for (size_t r = 0; r < jobs[i].requests.size(); ++r) {
            CHECK(back[i].requests[r].partition == jobs[i].requests[r].partition);
            CHECK(back[i].requests[r].nodes == jobs[i].requests[r].nodes);
            CHECK(back[i].requests[r].walltime == jobs[i].requests[r].walltime);
        }
        REQUIRE(back[i].phases.size() == jobs[i].phases.size());
        for (size_t p = 0; p < jobs[i].phases.size(); ++p) {
            CHECK(back[i].phases[p].kind == jobs[i].phases[p].kind);
            CHECK(back[i].phases[p].classical_work == jobs[i].phases[p].classical_work);
            CHECK(back[i].phases[p].quantum_tasks == jobs[i].phases[p].quantum_tasks);
            CHECK(back[i].phases[p].prep_time_per_task ==
                  jobs[i].phases[p].prep_time_per_task);
        }
    }
}

TEST_CASE("malformed workload lines are rejected with line numbers") {
    CHECK_THROWS_WITH_AS(load_workload("{not json\n"),
                         doctest::Contains("workload line 1"), InvalidProfileError);
    const auto ok = save_workload(generate(sample_profile()));
    CHECK_THROWS_WITH_AS(load_workload(ok + "{\"job_id\": \"x\"}\n"),
                         doctest::Contains("workload line 6"), InvalidProfileError);
}
