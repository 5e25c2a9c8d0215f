#pragma once

#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "wta/dynamics.hpp"
#include "wta/matrix.hpp"
#include "wta/scenario.hpp"

namespace wta {

/// Floor on target-to-asset closing speed (km/s) in the time-to-asset estimate.
inline constexpr double kClosingSpeedFloor = 1e-6;
inline constexpr double kNotClosing = std::numeric_limits<double>::infinity();

/// A live agent: its original scenario id and current state.
struct LiveAgent {
    int id = 0;
    AgentState state;
};

/// Per-epoch engagement data over live agents only. Row/column r maps to the
/// original ids interceptor_ids[r] / target_ids[c].
struct SceneSnapshot {
    int epoch_index = 0;
    double time = 0.0;
    std::vector<int> interceptor_ids;
    std::vector<int> target_ids;
    Matrix distance;        // km
    Matrix closing;         // km/s, positive = closing
    Matrix relative_speed;  // |v_i - v_k|, km/s
    std::vector<double> time_to_asset;  // s, +inf when not closing
    std::vector<double> threat_level;
    std::vector<double> asset_relevance;
    std::vector<int> associated_asset;  // asset id per target column
    std::vector<double> asset_priority;
    /// Previous target per row as a local 1-based column index, 0 when none is live.
    std::vector<int> previous_assignment;
    bool coverage = true;
    std::size_t scenario_interceptors = 0;
    std::size_t scenario_targets = 0;

    std::size_t num_interceptors() const { return interceptor_ids.size(); }
    std::size_t num_targets() const { return target_ids.size(); }
    std::size_t num_assets() const { return asset_priority.size(); }
    /// True once any interceptor or target has left the engagement.
    bool remapped() const {
        return num_interceptors() != scenario_interceptors || num_targets() != scenario_targets;
    }
    /// Whether the coverage condition applies (enabled and N >= N_T).
    bool coverage_active() const { return coverage && num_interceptors() >= num_targets(); }

    friend bool operator==(const SceneSnapshot&, const SceneSnapshot&) = default;
};

/// Entry (i,k) = |p_i - p_k|. Rows are computed in parallel.
Matrix distance_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets);

/// Entry (i,k) = -(r.v)/|r|. Throws CoincidentError when a pair coincides.
Matrix closing_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets);

/// Entry (i,k) = |v_i - v_k|.
Matrix relative_speed_matrix(std::span<const AgentState> interceptors,
                             std::span<const AgentState> targets);

/// Asset a target is heading for: the explicit intended asset when given,
/// otherwise the asset closest to the target's velocity ray.
int associate_asset(const AgentState& target, std::optional<int> intended_asset,
                    std::span<const AssetSpec> assets);

/// Range to the asset over the closing speed toward it; +inf if not closing.
double time_to_asset(const AgentState& target, const AssetSpec& asset);

/// priority * tau_ref / (tau + tau_ref); tends to 0 as tau -> inf.
double asset_relevance(double tau, double priority, double tau_ref);

/// Assembles the scene vector for one decision epoch.
/// previous_target_ids holds, per live interceptor, the original id of its
/// previous target (0 for none). Empty means no previous assignment.
SceneSnapshot build_snapshot(const Scenario& scenario, std::span<const LiveAgent> interceptors,
                             std::span<const LiveAgent> targets, int epoch_index, double time,
                             std::span<const int> previous_target_ids);

const AssetSpec& find_asset(std::span<const AssetSpec> assets, int id);

namespace reference {

// Serial versions of the matrix kernels, kept for testing and benchmarking.
Matrix distance_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets);
Matrix closing_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets);
Matrix relative_speed_matrix(std::span<const AgentState> interceptors,
                             std::span<const AgentState> targets);

}  // namespace reference

}  // namespace wta
