// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "parse_corpus.hpp"
#include "support.hpp"
#include "wta/cli.hpp"
#include "wta/cost.hpp"
#include "wta/dynamics.hpp"
#include "wta/guidance.hpp"
#include "wta/mission.hpp"
#include "wta/solvers.hpp"

using namespace wta;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Verdict solver_optimality() {
    Verdict v;
    const auto start = Clock::now();
    std::mt19937_64 rng(20240601);
    const double eps = 1e-6;
    int instances = 0;
    double worst_exact = 0.0;
    double worst_auction = 0.0;
    for (std::size_t n = 2; n <= 7; ++n) {
        for (int trial = 0; trial < 100; ++trial, ++instances) {
            const Matrix c = test::random_matrix(n, n, rng);
            const double best = brute_force_assignment(c).objective;
            const double h = solve_hungarian(c).objective;
            const double m = solve_milp(c).objective;
            const double a = solve_auction(c, eps).objective;
            worst_exact = std::max({worst_exact, std::abs(h - best), std::abs(m - best)});
            worst_auction = std::max(worst_auction, (a - best) / static_cast<double>(n));
            v.require(std::abs(h - best) <= 1e-9, "hungarian differs from oracle at n=" + std::to_string(n));
            v.require(std::abs(m - best) <= 1e-9, "milp differs from oracle at n=" + std::to_string(n));
            v.require(a <= best + static_cast<double>(n) * eps, "auction outside n*eps at n=" + std::to_string(n));
        }
    }
    const double elapsed = seconds_since(start);
    v.require(elapsed < 10.0, "runtime over 10 s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d instances, max exact gap %.2e, max auction gap/n %.2e, %.2f s", instances,
                  worst_exact, worst_auction, elapsed);
    if (v.pass) v.detail = buf;
    else v.detail += std::string(" (") + buf + ")";
    return v;
}

Verdict png_correctness() {
    Verdict v;
    const auto start = Clock::now();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> pos(-200.0, 200.0);
    std::uniform_real_distribution<double> vel(-1.5, 1.5);
    std::uniform_real_distribution<double> nav(2.0, 6.0);
    int cases = 0;
    double worst_dot = 0.0;
    double worst_mag = 0.0;
    while (cases < 10000) {
        const AgentState i{{pos(rng), pos(rng), pos(rng)}, {vel(rng), vel(rng), vel(rng)}};
        const AgentState t{{pos(rng), pos(rng), pos(rng)}, {vel(rng), vel(rng), vel(rng)}};
        if (norm(i.position - t.position) < 1e-3) continue;
        const auto rk = relative_kinematics(i, t);
        if (norm(rk.los_rate) < 1e-12) continue;
        const double n = nav(rng);
        const Vec3 u = png_command_raw(rk, n);
        const double un = norm(u);
        const double dot_ratio = std::abs(dot(u, rk.r_hat)) / un;
        const double expected = n * norm(rk.v) * norm(rk.los_rate);
        const double mag_err = std::abs(un - expected) / expected;
        worst_dot = std::max(worst_dot, dot_ratio);
        worst_mag = std::max(worst_mag, mag_err);
        ++cases;
    }
    const double elapsed = seconds_since(start);
    v.require(worst_dot < 1e-9, "command not orthogonal to LOS");
    v.require(worst_mag < 1e-10, "magnitude differs from N|v||los_rate|");
    v.require(elapsed < 1.0, "runtime over 1 s");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%d geometries, max |u.r|/|u| %.2e, max magnitude rel err %.2e, %.3f s", cases,
                  worst_dot, worst_mag, elapsed);
    v.detail = v.pass ? buf : v.detail + " (" + buf + ")";
    return v;
}

MissionConfig config_for(AssignerKind kind) {
    MissionConfig cfg;
    cfg.assigner = kind;
    if (kind == AssignerKind::llm) cfg.backend.endpoint_url = "mock://echo_hungarian";
    return cfg;
}

Verdict end_to_end() {
    Verdict v;
    const Scenario s = test::paper_baseline();
    v.require(s.interceptors.size() == 10 && s.targets.size() == 10 && s.assets.size() == 3, "scenario shape");
    std::string summary;
    for (auto kind : {AssignerKind::hungarian, AssignerKind::milp, AssignerKind::auction, AssignerKind::llm}) {
        const auto start = Clock::now();
        const MissionLog log = run_mission(s, config_for(kind));
        const double elapsed = seconds_since(start);
        const auto& m = log.metrics;
        const std::string name = to_string(kind);
        v.require(m.targets_intercepted == 10, name + ": " + std::to_string(m.targets_intercepted) + "/10 intercepted");
        v.require(m.assets_breached == 0, name + ": " + std::to_string(m.assets_breached) + " breaches");
        v.require(m.end_time < s.t_final, name + ": mission reached t_final");
        v.require(elapsed < 30.0, name + ": runtime over 30 s");
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s %d/10 end %.0f s (%.2f s)", name.c_str(), m.targets_intercepted, m.end_time,
                      elapsed);
        summary += (summary.empty() ? "" : "; ") + std::string(buf);
    }
    v.detail = v.pass ? summary : v.detail + " (" + summary + ")";
    return v;
}

Verdict protocol_transparency() {
    Verdict v;
    const Scenario s = test::paper_baseline();
    const MissionLog a = run_mission(s, config_for(AssignerKind::hungarian));
    const MissionLog b = run_mission(s, config_for(AssignerKind::llm));
    v.require(a.assignment_history.size() == b.assignment_history.size(), "history lengths differ");
    for (std::size_t h = 0; v.pass && h < a.assignment_history.size(); ++h) {
        const auto& x = a.assignment_history[h];
        const auto& y = b.assignment_history[h];
        v.require(x.epoch == y.epoch && x.time == y.time && x.target_of == y.target_of &&
                      x.live_targets == y.live_targets && x.objective == y.objective,
                  "epoch " + std::to_string(h) + " differs");
        if (h > 0) v.require(y.source == AssignmentSource::llm && y.attempts == 1, "llm epoch not answered first try");
    }
    v.require(a.trajectories == b.trajectories, "trajectories differ");
    v.require(a.events == b.events, "events differ");
    if (v.pass) v.detail = std::to_string(a.assignment_history.size()) + " epochs bit-equal";
    return v;
}

Verdict parsing_and_fallback() {
    Verdict v;
    const auto corpus = test::response_corpus();
    v.require(corpus.size() >= 20, "corpus smaller than 20");
    for (const auto& f : corpus) {
        const ParseResult r = parse_response(f.raw, f.n_agents, f.n_targets);
        bool ok = r.failure == f.failure;
        if (ok && f.failure == ParseFailure::none) ok = r.values == f.values && r.clipped == f.clipped;
        v.require(ok, std::string("fixture '") + f.name + "'");
    }

    // Retry and fallback paths on the initial scene.
    const Scenario s = test::paper_baseline();
    std::vector<LiveAgent> li, lt;
    for (const auto& i : s.interceptors) li.push_back({i.id, i.initial_state});
    for (const auto& t : s.targets) lt.push_back({t.id, t.initial_state});
    const SceneSnapshot snap = build_snapshot(s, li, lt, 1, 2.0, {});
    const Matrix c = surrogate_cost_matrix(snap, s.cost_weights).values;
    BackendConfig cfg;
    MockBackend malformed(MockMode::malformed);
    const auto fb = assign_with_fallback(snap, c, cfg, malformed);
    v.require(fb.source == AssignmentSource::fallback && fb.attempts == 3, "malformed: expected fallback after 3");
    MockBackend once(MockMode::malformed_once_then_valid);
    const auto retry = assign_with_fallback(snap, c, cfg, once);
    v.require(retry.source == AssignmentSource::llm && retry.attempts == 2, "retry: expected llm after 2");
    MockBackend oor(MockMode::out_of_range);
    const auto clip = assign_with_fallback(snap, c, cfg, oor);
    v.require(clip.source == AssignmentSource::llm && clip.clipped, "out_of_range: expected clipped llm answer");

    // Full mission with every reply malformed.
    MissionConfig mc;
    mc.assigner = AssignerKind::llm;
    mc.backend.endpoint_url = "mock://malformed";
    const MissionLog log = run_mission(s, mc);
    int queried = 0;
    for (const auto& r : log.assignment_history) queried += r.source != AssignmentSource::classical;
    v.require(queried == log.metrics.epochs - 1, "every epoch after Z_0 should query the backend");
    v.require(log.metrics.fallback_count == queried, "fallback_count != queried epochs");

    for (const auto& r : log.assignment_history) {
        std::set<int> retired;
        for (const auto& e : log.events)
            if (e.kind == EventKind::intercept && e.time <= r.time + 1e-9) retired.insert(e.interceptor_id);
        std::size_t assigned = 0;
        std::set<int> covered;
        bool ok = true;
        for (std::size_t i = 0; i < r.target_of.size(); ++i) {
            const bool live = retired.count(static_cast<int>(i + 1)) == 0;
            const int k = r.target_of[i];
            if (!live) {
                ok = ok && k == 0;
                continue;
            }
            ++assigned;
            ok = ok && std::find(r.live_targets.begin(), r.live_targets.end(), k) != r.live_targets.end();
            covered.insert(k);
        }
        if (assigned >= r.live_targets.size()) ok = ok && covered.size() == r.live_targets.size();
        v.require(ok, "epoch " + std::to_string(r.epoch) + " violates the assignment constraints");
    }
    if (v.pass) {
        v.detail = std::to_string(corpus.size()) + " fixtures; malformed run: " + std::to_string(queried) +
                   " queried epochs, fallback_count " + std::to_string(log.metrics.fallback_count) +
                   ", all epochs feasible";
    }
    return v;
}

Verdict switching_hysteresis() {
    Verdict v;
    Scenario s = test::paper_baseline();
    auto switches = [&](double penalty) {
        s.options.switch_penalty = penalty;
        return run_mission(s, config_for(AssignerKind::hungarian)).metrics.total_switches;
    };
    const int free = switches(0.0);
    const int light = switches(0.2);
    const int heavy = switches(1e3);
    v.require(light <= free, "penalty 0.2 switched more than penalty 0");
    v.require(heavy == 0, "penalty 1e3 still switched");
    v.detail = "switches: penalty 0 -> " + std::to_string(free) + ", 0.2 -> " + std::to_string(light) +
               ", 1e3 -> " + std::to_string(heavy) + (v.pass ? "" : " (" + v.detail + ")");
    return v;
}

Verdict determinism() {
    Verdict v;
    const auto root = test::scratch_dir("acceptance_determinism");
    for (const char* run : {"a", "b"}) {
        std::ostringstream out, err;
        const int code = run_cli({"run", "--scenario", test::data_path("paper_baseline.json").string(), "--assigner",
                                  "llm", "--backend", "mock://malformed_once_then_valid", "--out",
                                  (root / run).string()},
                                 out, err);
        v.require(code == kExitOk, std::string("run ") + run + " exited " + std::to_string(code) + ": " + err.str());
    }
    const std::string csv = slurp(root / "a" / "trajectory.csv");
    const std::string metrics = slurp(root / "a" / "metrics.json");
    v.require(!csv.empty() && !metrics.empty(), "outputs missing");
    v.require(csv == slurp(root / "b" / "trajectory.csv"), "trajectory.csv differs");
    v.require(metrics == slurp(root / "b" / "metrics.json"), "metrics.json differs");
    if (v.pass) {
        v.detail = "trajectory.csv (" + std::to_string(csv.size()) + " bytes) and metrics.json (" +
                   std::to_string(metrics.size()) + " bytes) byte-identical";
    }
    return v;
}

Verdict dynamics_exactness() {
    Verdict v;
    const auto start = Clock::now();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> p(-500.0, 500.0);
    std::uniform_real_distribution<double> s(-2.0, 2.0);
    std::uniform_real_distribution<double> a(-0.1, 0.1);
    std::uniform_real_distribution<double> h(0.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 10000; ++n) {
        const AgentState x{{p(rng), p(rng), p(rng)}, {s(rng), s(rng), s(rng)}};
        const Vec3 u{a(rng), a(rng), a(rng)};
        double dt = h(rng);
        if (dt == 0.0) dt = 1.0;
        const AgentState got = step_state(x, u, dt);
        const Vec3 p_exact = x.position + x.velocity * dt + u * (0.5 * dt * dt);
        const Vec3 v_exact = x.velocity + u * dt;
        worst = std::max({worst, norm(got.position - p_exact) / std::max(norm(p_exact), 1e-300),
                          norm(got.velocity - v_exact) / std::max(norm(v_exact), 1e-300)});
    }
    const double elapsed = seconds_since(start);
    v.require(worst < 1e-10, "relative error above 1e-10");
    v.require(elapsed < 1.0, "runtime over 1 s");
    char buf[128];
    std::snprintf(buf, sizeof buf, "10000 cases, max rel err %.2e, %.3f s", worst, elapsed);
    v.detail = v.pass ? buf : v.detail + " (" + buf + ")";
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"solver optimality vs brute-force oracle", solver_optimality},
        {"PNG orthogonality and magnitude", png_correctness},
        {"baseline scenario end to end (hungarian, milp, auction, llm+mock)", end_to_end},
        {"protocol transparency (mock echo_hungarian == hungarian)", protocol_transparency},
        {"robust parsing, retry and fallback", parsing_and_fallback},
        {"switching hysteresis", switching_hysteresis},
        {"deterministic outputs", determinism},
        {"dynamics exactness vs closed form", dynamics_exactness},
    };
    int failed = 0;
    for (std::size_t n = 0; n < criteria.size(); ++n) {
        Verdict v;
        try {
            v = criteria[n].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s [%zu] %s: %s\n", v.pass ? "PASS" : "FAIL", n + 1, criteria[n].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
