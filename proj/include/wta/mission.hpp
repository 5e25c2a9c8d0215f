#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wta/backend.hpp"
#include "wta/geometry.hpp"
#include "wta/llm_assigner.hpp"
#include "wta/scenario.hpp"
#include "wta/solvers.hpp"

namespace wta {

enum class AssignerKind { hungarian, milp, auction, llm, random_init };
enum class BaselineMode { hungarian, random };

const char* to_string(AssignerKind kind);
AssignerKind assigner_kind_from_string(const std::string& text);

enum class Side { interceptor, target, asset };
const char* to_string(Side side);

enum class EventKind { intercept, asset_breach, reassignment, fallback_used, x_max_violation };
const char* to_string(EventKind kind);

struct MissionEvent {
    EventKind kind = EventKind::intercept;
    double time = 0.0;
    int interceptor_id = 0;  // 0 when not involved
    int target_id = 0;
    int asset_id = 0;
    std::string detail;

    friend bool operator==(const MissionEvent&, const MissionEvent&) = default;
};

struct TrajectorySample {
    double time = 0.0;
    Side side = Side::interceptor;
    int id = 0;
    AgentState state;
    int assigned_target = 0;  // interceptors only, 0 = none

    friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Z_h in original ids: target_of[i] is the target of interceptor i+1, 0 once
/// the interceptor has been retired.
struct AssignmentRecord {
    int epoch = 0;
    double time = 0.0;
    std::vector<int> target_of;
    std::vector<int> live_targets;
    AssignmentSource source = AssignmentSource::classical;
    int attempts = 0;
    double latency = 0.0;
    double objective = 0.0;
    bool clipped = false;

    friend bool operator==(const AssignmentRecord&, const AssignmentRecord&) = default;
};

struct MissionMetrics {
    int targets_intercepted = 0;
    int assets_breached = 0;
    int targets_surviving = 0;
    double mean_intercept_time = 0.0;
    int total_switches = 0;
    int fallback_count = 0;
    double mean_assigner_latency = 0.0;
    int epochs = 0;
    double end_time = 0.0;

    friend bool operator==(const MissionMetrics&, const MissionMetrics&) = default;
};

struct MissionLog {
    std::vector<MissionEvent> events;
    std::vector<TrajectorySample> trajectories;
    std::vector<AssignmentRecord> assignment_history;
    MissionMetrics metrics;
    std::vector<AssetSpec> assets;
    std::vector<int> target_assets;  // associated asset id per target at t = 0

    friend bool operator==(const MissionLog&, const MissionLog&) = default;
};

struct MissionConfig {
    AssignerKind assigner = AssignerKind::hungarian;
    BaselineMode baseline = BaselineMode::hungarian;
    std::uint64_t seed = 0;
    double eps_final = 1e-6;
    BackendConfig backend;
    std::optional<std::filesystem::path> replay_log;
    /// Keep Z_0 for the whole run; retargeting is skipped.
    bool freeze_assignment = false;
    /// Non-owning; replaces the backend built from `backend` when set.
    ChatBackend* backend_override = nullptr;
};

/// Live engagement state; agents are indexed by original id - 1.
struct MissionState {
    std::vector<AgentState> interceptors;
    std::vector<AgentState> targets;
    std::vector<char> interceptor_live;
    std::vector<char> target_live;
    std::vector<int> assigned;  // original target id per interceptor, 0 = none
    std::vector<char> interceptor_out_of_bounds;
    std::vector<char> target_out_of_bounds;

    static MissionState initial(const Scenario& scenario);
    std::vector<LiveAgent> live_interceptors() const;
    std::vector<LiveAgent> live_targets() const;
    std::size_t live_target_count() const;
};

/// Z_0 over the initial scene: Hungarian on the surrogate costs, or a seeded
/// uniformly random feasible assignment.
Assignment baseline_init(const Scenario& scenario, BaselineMode mode, std::uint64_t seed);

/// Propagates sim steps [step_begin, step_end) under the current assignment:
/// PNG for assigned pairs, constant maneuvers for targets, then intercept,
/// breach and state-bound checks. Appends trajectory samples for the end of
/// each step when `trajectory` is non-null.
std::vector<MissionEvent> run_epoch(MissionState& state, const Scenario& scenario, long step_begin,
                                    long step_end, std::vector<TrajectorySample>* trajectory);

MissionLog run_mission(const Scenario& scenario, const MissionConfig& config);

/// Entries changed between consecutive epochs, counting only interceptors that
/// stay live and whose previous target is still live.
int count_switches(const std::vector<AssignmentRecord>& history);

/// Recomputes the metrics from the event list and history.
MissionMetrics compute_metrics(const std::vector<MissionEvent>& events,
                               const std::vector<AssignmentRecord>& history, std::size_t target_count,
                               double end_time);

}  // namespace wta
