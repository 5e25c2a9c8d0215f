#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "support.hpp"
#include "wta/mission.hpp"

using namespace wta;

namespace {

// Interceptor i sits next to target i, far from every other target.
Scenario diagonal_scene(int n) {
    Scenario s;
    for (int i = 1; i <= n; ++i) {
        const double y = 40.0 * i;
        s.interceptors.push_back({i, {{0, y, 0}, {0.5, 0, 0}}, 4.0});
        s.targets.push_back({i, {{30, y, 0}, {-0.2, 0, 0}}, 0.5, {}, std::nullopt});
    }
    s.assets.push_back({1, {-40, 0, 0}, 0.9, 3.0});
    return s;
}

int count_kind(const MissionLog& log, EventKind kind) {
    return static_cast<int>(std::count_if(log.events.begin(), log.events.end(),
                                          [&](const MissionEvent& e) { return e.kind == kind; }));
}

AssignmentRecord record(std::vector<int> z, std::vector<int> live) {
    AssignmentRecord r;
    r.target_of = std::move(z);
    r.live_targets = std::move(live);
    return r;
}

}  // namespace

TEST_CASE("baseline init") {
    const Scenario s = diagonal_scene(4);
    CHECK(baseline_init(s, BaselineMode::hungarian, 0).target_of == std::vector<int>{1, 2, 3, 4});

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = baseline_init(s, BaselineMode::random, seed);
        CHECK(a == baseline_init(s, BaselineMode::random, seed));
        std::vector<int> sorted = a.target_of;
        std::sort(sorted.begin(), sorted.end());
        CHECK(sorted == std::vector<int>{1, 2, 3, 4});
    }
    std::set<std::vector<int>> distinct;
    for (std::uint64_t seed = 0; seed < 50; ++seed) distinct.insert(baseline_init(s, BaselineMode::random, seed).target_of);
    CHECK(distinct.size() > 5);
}

TEST_CASE("run_epoch: head-on pair intercepts at range over closing speed") {
    const Scenario s = test::one_on_one();
    MissionState state = MissionState::initial(s);
    state.assigned = {1};
    const auto events = run_epoch(state, s, 0, 2000, nullptr);
    REQUIRE_FALSE(events.empty());
    CHECK(events[0].kind == EventKind::intercept);
    CHECK(events[0].interceptor_id == 1);
    CHECK(events[0].target_id == 1);
    CHECK(events[0].time == doctest::Approx((100.0 - s.kill_radius) / 1.05).epsilon(1e-6));
    CHECK_FALSE(state.target_live[0]);
    CHECK_FALSE(state.interceptor_live[0]);
}

TEST_CASE("run_epoch: unassigned target breaches its asset") {
    const Scenario s = test::one_on_one();
    MissionState state = MissionState::initial(s);
    const auto events = run_epoch(state, s, 0, 6000, nullptr);
    REQUIRE(events.size() == 1);
    CHECK(events[0].kind == EventKind::asset_breach);
    CHECK(events[0].asset_id == 1);
    // Target starts 120 km out at 0.25 km/s and enters the 5 km zone.
    CHECK(events[0].time == doctest::Approx(115.0 / 0.25).epsilon(1e-9));
}

TEST_CASE("run_epoch: empty range changes nothing") {
    const Scenario s = test::one_on_one();
    MissionState state = MissionState::initial(s);
    state.assigned = {1};
    std::vector<TrajectorySample> samples;
    CHECK(run_epoch(state, s, 10, 10, &samples).empty());
    CHECK(samples.empty());
    CHECK(state.interceptors == MissionState::initial(s).interceptors);
    CHECK(state.targets == MissionState::initial(s).targets);
}

TEST_CASE("count_switches") {
    CHECK(count_switches({record({1, 2}, {1, 2}), record({1, 2}, {1, 2}), record({1, 2}, {1, 2})}) == 0);
    CHECK(count_switches({record({1, 2}, {1, 2}), record({2, 1}, {1, 2})}) == 2);
    // Interceptor 3 is retired at epoch 2 and target 3 is gone by epoch 2.
    const std::vector<AssignmentRecord> h{record({1, 2, 3}, {1, 2, 3}), record({2, 1, 3}, {1, 2, 3}),
                                          record({1, 2, 0}, {1, 2}), record({1, 1, 0}, {1})};
    CHECK(count_switches(h) == 4);
}

TEST_CASE("bundled baseline with the hungarian assigner") {
    const Scenario s = test::paper_baseline();
    const MissionLog log = run_mission(s, {});
    CHECK(log.metrics.targets_intercepted == 10);
    CHECK(log.metrics.assets_breached == 0);
    CHECK(log.metrics.end_time < s.t_final);
    CHECK(log.metrics.fallback_count == 0);

    // Every target appears in exactly one terminal event.
    std::vector<int> terminal(s.targets.size() + 1, 0);
    for (const auto& e : log.events)
        if (e.kind == EventKind::intercept || e.kind == EventKind::asset_breach) ++terminal[e.target_id];
    for (std::size_t k = 1; k <= s.targets.size(); ++k) CHECK(terminal[k] == 1);

    CHECK(log.metrics == compute_metrics(log.events, log.assignment_history, s.targets.size(),
                                         log.metrics.end_time));
    CHECK(log.metrics.total_switches == count_kind(log, EventKind::reassignment));
    for (const auto& r : log.assignment_history) CHECK(r.source == AssignmentSource::classical);
}

TEST_CASE("runs are deterministic") {
    const Scenario s = test::paper_baseline();
    MissionConfig cfg;
    cfg.assigner = AssignerKind::auction;
    CHECK(run_mission(s, cfg) == run_mission(s, cfg));
    cfg.assigner = AssignerKind::random_init;
    cfg.seed = 99;
    CHECK(run_mission(s, cfg) == run_mission(s, cfg));
}

TEST_CASE("echo_hungarian llm reproduces the hungarian history") {
    const Scenario s = test::paper_baseline();
    MissionConfig llm;
    llm.assigner = AssignerKind::llm;
    llm.backend.endpoint_url = "mock://echo_hungarian";
    const MissionLog a = run_mission(s, {});
    const MissionLog b = run_mission(s, llm);
    REQUIRE(a.assignment_history.size() == b.assignment_history.size());
    for (std::size_t h = 0; h < a.assignment_history.size(); ++h) {
        CHECK(a.assignment_history[h].target_of == b.assignment_history[h].target_of);
        CHECK(a.assignment_history[h].objective == b.assignment_history[h].objective);
    }
    CHECK(a.trajectories == b.trajectories);
}

TEST_CASE("malformed llm replies fall back every epoch") {
    const Scenario s = test::paper_baseline();
    MissionConfig cfg;
    cfg.assigner = AssignerKind::llm;
    cfg.backend.endpoint_url = "mock://malformed";
    const MissionLog log = run_mission(s, cfg);
    const int queried = log.metrics.epochs - 1;
    CHECK(log.metrics.fallback_count == queried);
    CHECK(count_kind(log, EventKind::fallback_used) == queried);
    CHECK(log.metrics.targets_intercepted == 10);
}

TEST_CASE("malformed_once_then_valid needs two attempts per epoch") {
    const Scenario s = test::paper_baseline();
    MissionConfig cfg;
    cfg.assigner = AssignerKind::llm;
    cfg.backend.endpoint_url = "mock://malformed_once_then_valid";
    const MissionLog log = run_mission(s, cfg);
    CHECK(log.metrics.fallback_count == 0);
    for (std::size_t h = 1; h < log.assignment_history.size(); ++h) {
        CHECK(log.assignment_history[h].source == AssignmentSource::llm);
        CHECK(log.assignment_history[h].attempts == 2);
    }
}

TEST_CASE("timeout mock records the latency of every attempt") {
    const Scenario s = test::paper_baseline();
    MissionConfig cfg;
    cfg.assigner = AssignerKind::llm;
    cfg.backend.endpoint_url = "mock://timeout";
    cfg.backend.timeout = 1.5;
    const MissionLog log = run_mission(s, cfg);
    CHECK(log.metrics.fallback_count == log.metrics.epochs - 1);
    CHECK(log.metrics.mean_assigner_latency == doctest::Approx(4.5));
}

TEST_CASE("frozen assignment matches a single static epoch") {
    Scenario s = test::paper_baseline();
    s.t_final = 200.0;
    MissionConfig frozen;
    frozen.freeze_assignment = true;
    const MissionLog a = run_mission(s, frozen);
    Scenario single = s;
    single.epoch_dt = s.t_final;
    const MissionLog b = run_mission(single, {});
    CHECK(a.trajectories == b.trajectories);
    CHECK(a.events.size() >= b.events.size());
    CHECK(a.metrics.total_switches == 0);
}

TEST_CASE("switch penalty suppresses reassignment") {
    Scenario s = test::paper_baseline();
    const int free_switches = run_mission(s, {}).metrics.total_switches;
    s.options.switch_penalty = 0.2;
    CHECK(run_mission(s, {}).metrics.total_switches <= free_switches);
    s.options.switch_penalty = 1e3;
    CHECK(run_mission(s, {}).metrics.total_switches == 0);
}

TEST_CASE("horizon shorter than one epoch keeps only Z_0") {
    Scenario s = test::paper_baseline();
    s.t_final = 1.0;
    const MissionLog log = run_mission(s, {});
    CHECK(log.assignment_history.size() == 1);
    CHECK(log.metrics.epochs == 1);
    const double last = log.trajectories.back().time;
    CHECK(last == doctest::Approx(1.0));
}

TEST_CASE("milp respects the coverage option") {
    Scenario s = test::paper_baseline();
    MissionConfig cfg;
    cfg.assigner = AssignerKind::milp;
    const MissionLog a = run_mission(s, cfg);
    CHECK(a.metrics.targets_intercepted == 10);
    for (const auto& r : a.assignment_history) {
        for (int k : r.live_targets) CHECK(std::count(r.target_of.begin(), r.target_of.end(), k) >= 1);
    }
}

TEST_CASE("assigner names") {
    for (auto k : {AssignerKind::hungarian, AssignerKind::milp, AssignerKind::auction, AssignerKind::llm})
        CHECK(assigner_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(assigner_kind_from_string("oracle"));
}
