#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "wta/output.hpp"

using namespace wta;

namespace {

std::size_t count_of(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool close6(double a, double b) { return std::abs(a - b) <= 5e-6 * std::max(1.0, std::abs(b)); }

const MissionLog& baseline_log() {
    static const MissionLog log = run_mission(test::paper_baseline(), {});
    return log;
}

}  // namespace

TEST_CASE("three samples give three rows") {
    MissionLog log;
    for (int n = 0; n < 3; ++n) log.trajectories.push_back({0.1 * n, Side::interceptor, 1, {{n * 0.5, 0, 0}, {5, 0, 0}}, 1});
    const std::string csv = trajectory_csv(log);
    CHECK(count_of(csv, "\n") == 4);
    CHECK(csv.rfind(std::string(kTrajectoryHeader) + "\n", 0) == 0);
    CHECK(csv.find("\n0.1,interceptor,1,0.5,0,0,5,0,0,1\n") != std::string::npos);
}

TEST_CASE("csv round trip at rendered precision") {
    const auto dir = test::scratch_dir("csv");
    const MissionLog& log = baseline_log();
    write_trajectory_csv(log, dir / "t.csv");
    const auto rows = read_trajectory_csv(dir / "t.csv");

    std::vector<TrajectorySample> expected = log.trajectories;
    for (const auto& a : log.assets) expected.push_back({0.0, Side::asset, a.id, {a.position, {}}, 0});
    auto key = [](const TrajectorySample& s) { return std::tuple(s.time, std::string(to_string(s.side)), s.id); };
    std::stable_sort(expected.begin(), expected.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    REQUIRE(rows.size() == expected.size());
    for (std::size_t n = 0; n < rows.size(); ++n) {
        CHECK(close6(rows[n].time, expected[n].time));
        CHECK(rows[n].side == expected[n].side);
        CHECK(rows[n].id == expected[n].id);
        CHECK(close6(rows[n].state.position.x, expected[n].state.position.x));
        CHECK(close6(rows[n].state.position.y, expected[n].state.position.y));
        CHECK(close6(rows[n].state.velocity.x, expected[n].state.velocity.x));
        CHECK(close6(rows[n].state.velocity.y, expected[n].state.velocity.y));
        CHECK(rows[n].assigned_target == expected[n].assigned_target);
    }
    for (std::size_t n = 1; n < rows.size(); ++n) {
        CHECK(std::tuple(rows[n - 1].time, std::string(to_string(rows[n - 1].side)), rows[n - 1].id) <=
              std::tuple(rows[n].time, std::string(to_string(rows[n].side)), rows[n].id));
    }
}

TEST_CASE("every agent has rows until its removal") {
    const MissionLog& log = baseline_log();
    const double dt = test::paper_baseline().sim_dt;
    std::map<std::pair<Side, int>, double> last;
    for (const auto& s : log.trajectories) last[{s.side, s.id}] = std::max(last[{s.side, s.id}], s.time);
    CHECK(last.size() == 20);
    for (const auto& e : log.events) {
        if (e.kind != EventKind::intercept) continue;
        const double removal = std::ceil(e.time / dt - 1e-9) * dt;
        CHECK(last[{Side::target, e.target_id}] == doctest::Approx(removal));
        CHECK(last[{Side::interceptor, e.interceptor_id}] == doctest::Approx(removal));
    }
}

TEST_CASE("metrics file agrees with the event list") {
    const auto dir = test::scratch_dir("metrics");
    const MissionLog& log = baseline_log();
    write_metrics(log, dir / "m.json");
    const auto j = nlohmann::json::parse(slurp(dir / "m.json"));
    CHECK(j["metrics"]["assets_breached"] == 0);
    CHECK(j["metrics"]["targets_intercepted"] == 10);
    int intercepts = 0;
    int reassignments = 0;
    for (const auto& e : j["events"]) {
        if (e["kind"] == "intercept") ++intercepts;
        if (e["kind"] == "reassignment") ++reassignments;
    }
    CHECK(j["metrics"]["targets_intercepted"] == intercepts);
    CHECK(j["metrics"]["total_switches"] == reassignments);
    CHECK(j["events"].size() == log.events.size());
}

TEST_CASE("empty log gives zeroed metrics") {
    const auto j = nlohmann::json::parse(metrics_json(MissionLog{}));
    for (const auto& [name, value] : j["metrics"].items()) CHECK(value == 0);
    CHECK(j["events"].empty());
}

TEST_CASE("fault-injected fallbacks show up in the metrics file") {
    MissionConfig cfg;
    cfg.assigner = AssignerKind::llm;
    cfg.backend.endpoint_url = "mock://malformed";
    const MissionLog log = run_mission(test::paper_baseline(), cfg);
    const auto j = nlohmann::json::parse(metrics_json(log));
    CHECK(j["metrics"]["fallback_count"] == log.metrics.epochs - 1);
}

TEST_CASE("initial plot") {
    const MissionLog& log = baseline_log();
    const std::string svg = render_plot(log, 0.0);
    CHECK(count_of(svg, "class=\"zone\"") == 3);
    CHECK(count_of(svg, "stroke-dasharray=\"6,4\"") == 3);
    CHECK(count_of(svg, "class=\"intended\"") == 10);
    CHECK(count_of(svg, "class=\"interceptor-track\"") == 10);
    CHECK(count_of(svg, "class=\"target-track\"") == 10);
    CHECK(count_of(svg, "class=\"assignment\"") == 10);
    CHECK(count_of(svg, "class=\"intercept\"") == 0);
}

TEST_CASE("final plot is clamped and marks every intercept") {
    const MissionLog& log = baseline_log();
    const std::string end = render_plot(log, log.metrics.end_time);
    CHECK(render_plot(log, 1e6) == end);
    CHECK(count_of(end, "class=\"intercept\"") == 10);
    CHECK(count_of(end, "Successful intercept at T = ") == 10);
    CHECK(count_of(end, "class=\"assignment\"") == 0);
    CHECK(render_plot(log, -5.0) == render_plot(log, 0.0));
}

TEST_CASE("empty log plot has axes and zones only") {
    MissionLog log;
    log.assets = {{1, {0, 0, 0}, 0.9, 5.0}, {2, {20, 0, 0}, 0.4, 3.0}};
    const std::string svg = render_plot(log, 10.0);
    CHECK(count_of(svg, "class=\"zone\"") == 2);
    CHECK(count_of(svg, "<polyline") == 0);
    CHECK(count_of(svg, "class=\"intercept\"") == 0);
}

TEST_CASE("files are written atomically") {
    const auto dir = test::scratch_dir("atomic");
    emit_plot(baseline_log(), 100.0, dir / "p.svg");
    CHECK(std::filesystem::exists(dir / "p.svg"));
    CHECK_FALSE(std::filesystem::exists(dir / "p.svg.tmp"));
    CHECK_THROWS_AS(write_file_atomic("/nonexistent-dir/x/y.txt", "z"), OutputError);
}
