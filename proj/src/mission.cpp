#include "wta/mission.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <tuple>

#include "wta/cost.hpp"
#include "wta/guidance.hpp"

namespace wta {

const char* to_string(AssignerKind kind) {
    switch (kind) {
        case AssignerKind::hungarian: return "hungarian";
        case AssignerKind::milp: return "milp";
        case AssignerKind::auction: return "auction";
        case AssignerKind::llm: return "llm";
        case AssignerKind::random_init: return "random_init";
    }
    return "unknown";
}

AssignerKind assigner_kind_from_string(const std::string& text) {
    if (text == "hungarian") return AssignerKind::hungarian;
    if (text == "milp") return AssignerKind::milp;
    if (text == "auction") return AssignerKind::auction;
    if (text == "llm") return AssignerKind::llm;
    if (text == "random_init") return AssignerKind::random_init;
    throw std::invalid_argument("unknown assigner '" + text + "'");
}

const char* to_string(Side side) {
    switch (side) {
        case Side::interceptor: return "interceptor";
        case Side::target: return "target";
        case Side::asset: return "asset";
    }
    return "unknown";
}

const char* to_string(EventKind kind) {
    switch (kind) {
        case EventKind::intercept: return "intercept";
        case EventKind::asset_breach: return "asset_breach";
        case EventKind::reassignment: return "reassignment";
        case EventKind::fallback_used: return "fallback_used";
        case EventKind::x_max_violation: return "x_max_violation";
    }
    return "unknown";
}

MissionState MissionState::initial(const Scenario& scenario) {
    MissionState s;
    for (const auto& i : scenario.interceptors) s.interceptors.push_back(i.initial_state);
    for (const auto& t : scenario.targets) s.targets.push_back(t.initial_state);
    s.interceptor_live.assign(s.interceptors.size(), 1);
    s.target_live.assign(s.targets.size(), 1);
    s.assigned.assign(s.interceptors.size(), 0);
    s.interceptor_out_of_bounds.assign(s.interceptors.size(), 0);
    s.target_out_of_bounds.assign(s.targets.size(), 0);
    return s;
}

std::vector<LiveAgent> MissionState::live_interceptors() const {
    std::vector<LiveAgent> out;
    for (std::size_t i = 0; i < interceptors.size(); ++i) {
        if (interceptor_live[i]) out.push_back({static_cast<int>(i) + 1, interceptors[i]});
    }
    return out;
}

std::vector<LiveAgent> MissionState::live_targets() const {
    std::vector<LiveAgent> out;
    for (std::size_t k = 0; k < targets.size(); ++k) {
        if (target_live[k]) out.push_back({static_cast<int>(k) + 1, targets[k]});
    }
    return out;
}

std::size_t MissionState::live_target_count() const {
    return static_cast<std::size_t>(std::count(target_live.begin(), target_live.end(), 1));
}

namespace {

CostOptions cost_options(const Scenario& scenario) {
    return {scenario.options.normalize, scenario.options.threat_sense};
}

// Earliest s in [0,1] where p0 + s*(p1-p0) enters the ball (center, radius).
std::optional<double> entry_fraction(const Vec3& p0, const Vec3& p1, const Vec3& center, double radius) {
    const Vec3 a = p0 - center;
    const Vec3 d = p1 - p0;
    const double c = dot(a, a) - radius * radius;
    if (c <= 0.0) return 0.0;
    const double qa = dot(d, d);
    if (qa == 0.0) return std::nullopt;
    const double qb = 2.0 * dot(a, d);
    const double disc = qb * qb - 4.0 * qa * c;
    if (disc < 0.0) return std::nullopt;
    const double s = (-qb - std::sqrt(disc)) / (2.0 * qa);
    if (s < 0.0 || s > 1.0) return std::nullopt;
    return s;
}

// Closest approach of a linearly interpolated relative position over one step.
std::pair<double, double> closest_approach(const Vec3& r0, const Vec3& r1) {
    const Vec3 d = r1 - r0;
    const double dd = dot(d, d);
    const double s = dd > 0.0 ? std::clamp(-dot(r0, d) / dd, 0.0, 1.0) : 0.0;
    return {s, norm(r0 + d * s)};
}

struct Candidate {
    double time;
    int order;  // intercepts before breaches at equal times
    int interceptor;
    int target;
    int asset;
};

void record_samples(const MissionState& state, const std::vector<char>& interceptor_mask,
                    const std::vector<char>& target_mask, double time,
                    std::vector<TrajectorySample>& out) {
    for (std::size_t i = 0; i < state.interceptors.size(); ++i) {
        if (interceptor_mask[i]) {
            out.push_back({time, Side::interceptor, static_cast<int>(i) + 1, state.interceptors[i],
                           state.assigned[i]});
        }
    }
    for (std::size_t k = 0; k < state.targets.size(); ++k) {
        if (target_mask[k]) out.push_back({time, Side::target, static_cast<int>(k) + 1, state.targets[k], 0});
    }
}

}  // namespace

Assignment baseline_init(const Scenario& scenario, BaselineMode mode, std::uint64_t seed) {
    const MissionState state = MissionState::initial(scenario);
    const auto interceptors = state.live_interceptors();
    const auto targets = state.live_targets();
    const SceneSnapshot snapshot = build_snapshot(scenario, interceptors, targets, 0, 0.0, {});
    const CostMatrix costs = surrogate_cost_matrix(snapshot, scenario.cost_weights, cost_options(scenario));

    if (mode == BaselineMode::hungarian) return solve_hungarian(costs.values);

    std::mt19937_64 rng(seed);
    const int n = static_cast<int>(interceptors.size());
    const int m = static_cast<int>(targets.size());
    std::uniform_int_distribution<int> pick(1, m);
    std::vector<int> z;
    if (snapshot.coverage_active()) {
        for (int k = 1; k <= m; ++k) z.push_back(k);
        while (static_cast<int>(z.size()) < n) z.push_back(pick(rng));
        std::shuffle(z.begin(), z.end(), rng);
    } else {
        for (int i = 0; i < n; ++i) z.push_back(pick(rng));
    }
    return {z, assignment_objective(costs.values, z)};
}

std::vector<MissionEvent> run_epoch(MissionState& state, const Scenario& scenario, long step_begin,
                                    long step_end, std::vector<TrajectorySample>* trajectory) {
    std::vector<MissionEvent> events;
    const double dt = scenario.sim_dt;
    const std::size_t n = state.interceptors.size();
    const std::size_t m = state.targets.size();
    std::vector<Vec3> command(n);
    std::vector<char> guidance_failed(n, 0);

    for (long step = step_begin; step < step_end; ++step) {
        if (state.live_target_count() == 0) break;
        const double t0 = static_cast<double>(step) * dt;
        const double t1 = static_cast<double>(step + 1) * dt;

        // Guidance commands; each interceptor writes only its own slot.
        const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(static) if (n >= 256)
        for (long ii = 0; ii < count; ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            command[i] = Vec3{};
            guidance_failed[i] = 0;
            const int target = state.assigned[i];
            if (!state.interceptor_live[i] || target == 0) continue;
            const auto k = static_cast<std::size_t>(target - 1);
            if (!state.target_live[k]) continue;
            try {
                const RelativeKinematics rk = relative_kinematics(state.interceptors[i], state.targets[k]);
                command[i] = png_command(rk, scenario.interceptors[i].nav_constant, scenario.a_max);
            } catch (const std::exception&) {
                guidance_failed[i] = 1;
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (guidance_failed[i]) {
                throw DynamicsError("guidance failed for interceptor " + std::to_string(i + 1));
            }
        }

        const std::vector<AgentState> before_i = state.interceptors;
        const std::vector<AgentState> before_t = state.targets;
        const std::vector<char> live_i = state.interceptor_live;
        const std::vector<char> live_t = state.target_live;

        for (std::size_t i = 0; i < n; ++i) {
            if (live_i[i]) state.interceptors[i] = step_state(state.interceptors[i], command[i], dt);
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (!live_t[k]) continue;
            const Vec3 u = saturate_accel(scenario.targets[k].maneuver_accel, scenario.a_max);
            state.targets[k] = step_state(state.targets[k], u, dt);
        }

        std::vector<Candidate> candidates;
        for (std::size_t i = 0; i < n; ++i) {
            const int target = state.assigned[i];
            if (!live_i[i] || target == 0 || !live_t[static_cast<std::size_t>(target - 1)]) continue;
            const auto k = static_cast<std::size_t>(target - 1);
            const Vec3 r0 = before_i[i].position - before_t[k].position;
            const Vec3 r1 = state.interceptors[i].position - state.targets[k].position;
            if (closest_approach(r0, r1).second < scenario.kill_radius) {
                // Time stamp is the first entry into the kill radius.
                const double s = entry_fraction(r0, r1, Vec3{}, scenario.kill_radius).value_or(0.0);
                candidates.push_back({t0 + s * dt, 0, static_cast<int>(i) + 1, target, 0});
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (!live_t[k]) continue;
            for (const auto& asset : scenario.assets) {
                const auto s = entry_fraction(before_t[k].position, state.targets[k].position, asset.position,
                                              asset.protection_radius);
                if (s) candidates.push_back({t0 + *s * dt, 1, 0, static_cast<int>(k) + 1, asset.id});
            }
        }
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            return std::tie(a.time, a.order, a.interceptor, a.target, a.asset) <
                   std::tie(b.time, b.order, b.interceptor, b.target, b.asset);
        });
        for (const auto& c : candidates) {
            const auto k = static_cast<std::size_t>(c.target - 1);
            if (!state.target_live[k]) continue;
            if (c.order == 0) {
                const auto i = static_cast<std::size_t>(c.interceptor - 1);
                if (!state.interceptor_live[i]) continue;
                state.interceptor_live[i] = 0;
                state.target_live[k] = 0;
                events.push_back({EventKind::intercept, c.time, c.interceptor, c.target, 0,
                                  "interceptor " + std::to_string(c.interceptor) + " intercepted target " +
                                      std::to_string(c.target)});
            } else {
                state.target_live[k] = 0;
                events.push_back({EventKind::asset_breach, c.time, 0, c.target, c.asset,
                                  "target " + std::to_string(c.target) + " entered protection zone of asset " +
                                      std::to_string(c.asset)});
            }
        }

        for (std::size_t i = 0; i < n; ++i) {
            if (state.interceptor_live[i] && !state.interceptor_out_of_bounds[i] &&
                exceeds_state_bound(state.interceptors[i], scenario.x_max)) {
                state.interceptor_out_of_bounds[i] = 1;
                events.push_back({EventKind::x_max_violation, t1, static_cast<int>(i) + 1, 0, 0,
                                  "interceptor position norm exceeds x_max"});
            }
        }
        for (std::size_t k = 0; k < m; ++k) {
            if (state.target_live[k] && !state.target_out_of_bounds[k] &&
                exceeds_state_bound(state.targets[k], scenario.x_max)) {
                state.target_out_of_bounds[k] = 1;
                events.push_back({EventKind::x_max_violation, t1, 0, static_cast<int>(k) + 1, 0,
                                  "target position norm exceeds x_max"});
            }
        }

        if (trajectory != nullptr) record_samples(state, live_i, live_t, t1, *trajectory);
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const MissionEvent& a, const MissionEvent& b) { return a.time < b.time; });
    return events;
}

namespace {

class MissionRunner {
public:
    MissionRunner(const Scenario& scenario, const MissionConfig& config)
        : scenario_(scenario), config_(config), state_(MissionState::initial(scenario)) {
        if (auto violations = validate_scenario(scenario); !violations.empty()) {
            throw ScenarioError("run_mission: invalid scenario", violations);
        }
        if (config.assigner == AssignerKind::llm) {
            if (config.backend_override != nullptr) {
                backend_ = config.backend_override;
            } else {
                owned_backend_ = make_backend(config.backend);
                backend_ = owned_backend_.get();
            }
            if (config.replay_log) replay_.emplace(*config.replay_log);
        }
    }

    MissionLog run() {
        MissionLog log;
        log.assets = scenario_.assets;
        for (const auto& t : scenario_.targets) {
            log.target_assets.push_back(associate_asset(t.initial_state, t.intended_asset, scenario_.assets));
        }
        const double dt = scenario_.sim_dt;
        const long steps_per_epoch = std::max(1L, std::lround(scenario_.epoch_dt / dt));
        const long total_steps = std::lround(scenario_.t_final / dt);

        std::vector<char> all_i(state_.interceptors.size(), 1);
        std::vector<char> all_t(state_.targets.size(), 1);

        long step = 0;
        int epoch = 0;
        bool first = true;
        while (step < total_steps && state_.live_target_count() > 0) {
            AssignmentRecord record = decide(epoch, static_cast<double>(step) * dt, log.events);
            log.assignment_history.push_back(record);
            if (first) {
                // Initial samples carry Z_0 for the interceptors.
                record_samples(state_, all_i, all_t, 0.0, log.trajectories);
                first = false;
            }
            const long end = std::min(step + steps_per_epoch, total_steps);
            auto events = run_epoch(state_, scenario_, step, end, &log.trajectories);
            log.events.insert(log.events.end(), events.begin(), events.end());
            step = end;
            ++epoch;
        }
        if (first) record_samples(state_, all_i, all_t, 0.0, log.trajectories);

        double end_time = static_cast<double>(step) * dt;
        for (const auto& e : log.events) {
            if (e.kind == EventKind::intercept || e.kind == EventKind::asset_breach) end_time = std::max(end_time, e.time);
        }
        log.metrics = compute_metrics(log.events, log.assignment_history, scenario_.targets.size(), end_time);
        return log;
    }

private:
    AssignmentRecord decide(int epoch, double time, std::vector<MissionEvent>& events) {
        const auto interceptors = state_.live_interceptors();
        const auto targets = state_.live_targets();

        AssignmentRecord record;
        record.epoch = epoch;
        record.time = time;
        for (const auto& t : targets) record.live_targets.push_back(t.id);
        record.target_of.assign(state_.interceptors.size(), 0);

        if (interceptors.empty()) return record;

        std::vector<int> previous;
        if (epoch > 0) {
            for (const auto& a : interceptors) previous.push_back(state_.assigned[static_cast<std::size_t>(a.id - 1)]);
        }
        const SceneSnapshot snapshot = build_snapshot(scenario_, interceptors, targets, epoch, time, previous);

        Assignment local;
        if (epoch == 0) {
            local = initial_assignment(snapshot);
        } else if (config_.freeze_assignment) {
            local = frozen_assignment(snapshot);
        } else {
            local = assign(snapshot, record, events);
        }
        record.objective = local.objective;

        for (std::size_t r = 0; r < interceptors.size(); ++r) {
            const int local_k = local.target_of[r];
            const int target_id = local_k > 0 ? snapshot.target_ids[static_cast<std::size_t>(local_k - 1)] : 0;
            const auto i = static_cast<std::size_t>(interceptors[r].id - 1);
            if (epoch > 0 && state_.assigned[i] != 0 && target_id != 0 && state_.assigned[i] != target_id) {
                events.push_back({EventKind::reassignment, time, interceptors[r].id, target_id, 0,
                                  "target " + std::to_string(state_.assigned[i]) + " -> " + std::to_string(target_id)});
            }
            state_.assigned[i] = target_id;
            record.target_of[i] = target_id;
        }
        return record;
    }

    Assignment initial_assignment(const SceneSnapshot& snapshot) {
        const CostMatrix costs = surrogate_cost_matrix(snapshot, scenario_.cost_weights, cost_options(scenario_));
        const bool random = config_.baseline == BaselineMode::random || config_.assigner == AssignerKind::random_init;
        if (!random) return solve_hungarian(costs.values);
        return baseline_init(scenario_, BaselineMode::random, config_.seed);
    }

    // Keeps each row's previous target; rows whose target is gone coast.
    Assignment frozen_assignment(const SceneSnapshot& snapshot) {
        Assignment z;
        for (std::size_t r = 0; r < snapshot.num_interceptors(); ++r) {
            z.target_of.push_back(snapshot.previous_assignment[r]);
        }
        return z;
    }

    Assignment assign(const SceneSnapshot& snapshot, AssignmentRecord& record, std::vector<MissionEvent>& events) {
        const CostMatrix base = surrogate_cost_matrix(snapshot, scenario_.cost_weights, cost_options(scenario_));
        const CostMatrix costs =
            apply_switch_penalty(base, snapshot.previous_assignment, scenario_.options.switch_penalty);
        const Matrix& c = costs.values;

        switch (config_.assigner) {
            case AssignerKind::hungarian:
            case AssignerKind::random_init:
                return solve_hungarian(c);
            case AssignerKind::milp: {
                MilpConstraints cons;
                cons.coverage_required = scenario_.options.coverage;
                return solve_milp(c, cons);
            }
            case AssignerKind::auction: {
                if (c.square()) return solve_auction(c, config_.eps_final);
                const PaddedProblem padded = pad_rectangular(c, PadMode::dummy_columns);
                const Assignment solved = solve_auction(padded.costs, config_.eps_final);
                std::vector<int> columns;
                for (int k : solved.target_of) columns.push_back(k - 1);
                auto target_of = unpad(padded, columns, c);
                return {target_of, assignment_objective(c, target_of)};
            }
            case AssignerKind::llm: {
                AssignerOutcome outcome = assign_with_fallback(snapshot, c, config_.backend, *backend_);
                if (replay_) replay_->append(snapshot, outcome);
                record.source = outcome.source;
                record.attempts = outcome.attempts;
                record.latency = outcome.latency;
                record.clipped = outcome.clipped;
                if (outcome.source == AssignmentSource::fallback) {
                    std::string why = outcome.failures.empty() ? "" : outcome.failures.back();
                    events.push_back({EventKind::fallback_used, snapshot.time, 0, 0, 0,
                                      "epoch " + std::to_string(snapshot.epoch_index) + ": " + why});
                }
                return outcome.assignment;
            }
        }
        throw std::logic_error("unhandled assigner kind");
    }

    const Scenario& scenario_;
    const MissionConfig& config_;
    MissionState state_;
    std::unique_ptr<ChatBackend> owned_backend_;
    ChatBackend* backend_ = nullptr;
    std::optional<ReplayLog> replay_;
};

}  // namespace

MissionLog run_mission(const Scenario& scenario, const MissionConfig& config) {
    return MissionRunner(scenario, config).run();
}

int count_switches(const std::vector<AssignmentRecord>& history) {
    int switches = 0;
    for (std::size_t h = 1; h < history.size(); ++h) {
        const auto& prev = history[h - 1];
        const auto& cur = history[h];
        const std::size_t n = std::min(prev.target_of.size(), cur.target_of.size());
        for (std::size_t i = 0; i < n; ++i) {
            const int a = prev.target_of[i];
            const int b = cur.target_of[i];
            if (a == 0 || b == 0 || a == b) continue;
            const bool previous_live =
                std::find(cur.live_targets.begin(), cur.live_targets.end(), a) != cur.live_targets.end();
            if (previous_live) ++switches;
        }
    }
    return switches;
}

MissionMetrics compute_metrics(const std::vector<MissionEvent>& events,
                               const std::vector<AssignmentRecord>& history, std::size_t target_count,
                               double end_time) {
    MissionMetrics m;
    double intercept_time_sum = 0.0;
    for (const auto& e : events) {
        if (e.kind == EventKind::intercept) {
            ++m.targets_intercepted;
            intercept_time_sum += e.time;
        } else if (e.kind == EventKind::asset_breach) {
            ++m.assets_breached;
        }
    }
    m.targets_surviving = static_cast<int>(target_count) - m.targets_intercepted - m.assets_breached;
    m.mean_intercept_time = m.targets_intercepted > 0 ? intercept_time_sum / m.targets_intercepted : 0.0;
    m.total_switches = history.empty() ? 0 : count_switches(history);

    double latency_sum = 0.0;
    int queried = 0;
    for (const auto& r : history) {
        if (r.source == AssignmentSource::fallback) ++m.fallback_count;
        if (r.source != AssignmentSource::classical) {
            latency_sum += r.latency;
            ++queried;
        }
    }
    m.mean_assigner_latency = queried > 0 ? latency_sum / queried : 0.0;
    m.epochs = static_cast<int>(history.size());
    m.end_time = end_time;
    return m;
}

}  // namespace wta
