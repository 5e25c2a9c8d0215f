#include "wta/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wta/guidance.hpp"

namespace wta {

namespace {

// Below this many entries the thread fork costs more than the work.
constexpr std::size_t kParallelThreshold = 4096;

double closing_entry(const AgentState& i, const AgentState& k, bool& coincident) {
    const Vec3 r = i.position - k.position;
    const Vec3 v = i.velocity - k.velocity;
    const double range = norm(r);
    if (!(range > kRangeEpsilon)) {
        coincident = true;
        return 0.0;
    }
    return -dot(r, v) / range;
}

template <typename Entry>
Matrix pairwise_parallel(std::span<const AgentState> a, std::span<const AgentState> b, Entry entry) {
    Matrix m(a.size(), b.size());
    const auto rows = static_cast<long>(a.size());
    const std::size_t cols = b.size();
#pragma omp parallel for schedule(static) if (a.size() * b.size() >= kParallelThreshold)
    for (long r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<std::size_t>(r), c) = entry(a[r], b[c]);
    }
    return m;
}

template <typename Entry>
Matrix pairwise_serial(std::span<const AgentState> a, std::span<const AgentState> b, Entry entry) {
    Matrix m(a.size(), b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = entry(a[r], b[c]);
    }
    return m;
}

double distance_entry(const AgentState& i, const AgentState& k) { return norm(i.position - k.position); }
double speed_entry(const AgentState& i, const AgentState& k) { return norm(i.velocity - k.velocity); }

[[noreturn]] void throw_coincident() {
    throw CoincidentError("closing_matrix: an interceptor-target pair coincides");
}

}  // namespace

Matrix distance_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets) {
    return pairwise_parallel(interceptors, targets, distance_entry);
}

Matrix relative_speed_matrix(std::span<const AgentState> interceptors,
                             std::span<const AgentState> targets) {
    return pairwise_parallel(interceptors, targets, speed_entry);
}

Matrix closing_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets) {
    // Exceptions must not escape an OpenMP region; flag per row instead.
    std::vector<char> bad(interceptors.size(), 0);
    Matrix m(interceptors.size(), targets.size());
    const auto rows = static_cast<long>(interceptors.size());
#pragma omp parallel for schedule(static) if (interceptors.size() * targets.size() >= kParallelThreshold)
    for (long r = 0; r < rows; ++r) {
        bool coincident = false;
        for (std::size_t c = 0; c < targets.size(); ++c) {
            m(static_cast<std::size_t>(r), c) = closing_entry(interceptors[r], targets[c], coincident);
        }
        bad[static_cast<std::size_t>(r)] = coincident ? 1 : 0;
    }
    if (std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; })) throw_coincident();
    return m;
}

namespace reference {

Matrix distance_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets) {
    return pairwise_serial(interceptors, targets, distance_entry);
}

Matrix relative_speed_matrix(std::span<const AgentState> interceptors,
                             std::span<const AgentState> targets) {
    return pairwise_serial(interceptors, targets, speed_entry);
}

Matrix closing_matrix(std::span<const AgentState> interceptors, std::span<const AgentState> targets) {
    bool coincident = false;
    Matrix m = pairwise_serial(interceptors, targets, [&](const AgentState& i, const AgentState& k) {
        return closing_entry(i, k, coincident);
    });
    if (coincident) throw_coincident();
    return m;
}

}  // namespace reference

const AssetSpec& find_asset(std::span<const AssetSpec> assets, int id) {
    auto it = std::find_if(assets.begin(), assets.end(), [id](const AssetSpec& a) { return a.id == id; });
    if (it == assets.end()) throw std::out_of_range("unknown asset id " + std::to_string(id));
    return *it;
}

int associate_asset(const AgentState& target, std::optional<int> intended_asset,
                    std::span<const AssetSpec> assets) {
    if (assets.empty()) throw std::invalid_argument("associate_asset: no assets");
    if (intended_asset) return find_asset(assets, *intended_asset).id;

    const double speed = norm(target.velocity);
    const Vec3 heading = speed > 0.0 ? target.velocity * (1.0 / speed) : Vec3{};

    constexpr double kTie = 1e-9;
    int best_id = 0;
    double best_perp = 0.0;
    double best_dist = 0.0;
    for (const auto& asset : assets) {
        const Vec3 d = asset.position - target.position;
        const double dist = norm(d);
        double perp = dist;  // zero velocity or asset behind the ray origin
        if (speed > 0.0) {
            const double along = dot(d, heading);
            if (along > 0.0) perp = norm(d - heading * along);
        }
        const bool better = best_id == 0 || perp < best_perp - kTie ||
                            (std::abs(perp - best_perp) <= kTie &&
                             (dist < best_dist - kTie ||
                              (std::abs(dist - best_dist) <= kTie && asset.id < best_id)));
        if (better) {
            best_id = asset.id;
            best_perp = perp;
            best_dist = dist;
        }
    }
    return best_id;
}

double time_to_asset(const AgentState& target, const AssetSpec& asset) {
    const Vec3 r = target.position - asset.position;
    const double range = norm(r);
    if (!(range > kRangeEpsilon)) return 0.0;
    const double closing = -dot(r, target.velocity) / range;
    if (closing <= 0.0) return kNotClosing;
    return range / std::max(closing, kClosingSpeedFloor);
}

double asset_relevance(double tau, double priority, double tau_ref) {
    if (std::isinf(tau)) return 0.0;
    return priority * tau_ref / (tau + tau_ref);
}

SceneSnapshot build_snapshot(const Scenario& scenario, std::span<const LiveAgent> interceptors,
                             std::span<const LiveAgent> targets, int epoch_index, double time,
                             std::span<const int> previous_target_ids) {
    if (!previous_target_ids.empty() && previous_target_ids.size() != interceptors.size()) {
        throw std::invalid_argument("build_snapshot: previous assignment length mismatch");
    }
    SceneSnapshot s;
    s.epoch_index = epoch_index;
    s.time = time;
    s.coverage = scenario.options.coverage;
    s.scenario_interceptors = scenario.interceptors.size();
    s.scenario_targets = scenario.targets.size();

    std::vector<AgentState> is;
    std::vector<AgentState> ts;
    for (const auto& a : interceptors) {
        s.interceptor_ids.push_back(a.id);
        is.push_back(a.state);
    }
    for (const auto& t : targets) {
        s.target_ids.push_back(t.id);
        ts.push_back(t.state);
    }

    s.distance = distance_matrix(is, ts);
    s.closing = closing_matrix(is, ts);
    s.relative_speed = relative_speed_matrix(is, ts);

    for (const auto& a : scenario.assets) s.asset_priority.push_back(a.priority);

    for (const auto& t : targets) {
        auto spec_it = std::find_if(scenario.targets.begin(), scenario.targets.end(),
                                    [&](const TargetSpec& ts_) { return ts_.id == t.id; });
        if (spec_it == scenario.targets.end()) {
            throw std::invalid_argument("build_snapshot: unknown target id " + std::to_string(t.id));
        }
        const TargetSpec& spec = *spec_it;
        const int asset_id = associate_asset(t.state, spec.intended_asset, scenario.assets);
        const AssetSpec& asset = find_asset(scenario.assets, asset_id);
        const double tau = time_to_asset(t.state, asset);
        s.associated_asset.push_back(asset_id);
        s.time_to_asset.push_back(tau);
        s.threat_level.push_back(spec.threat_level);
        s.asset_relevance.push_back(asset_relevance(tau, asset.priority, scenario.options.tau_ref));
    }

    s.previous_assignment.assign(interceptors.size(), 0);
    for (std::size_t r = 0; r < previous_target_ids.size(); ++r) {
        auto it = std::find(s.target_ids.begin(), s.target_ids.end(), previous_target_ids[r]);
        if (it != s.target_ids.end()) {
            s.previous_assignment[r] = static_cast<int>(it - s.target_ids.begin()) + 1;
        }
    }
    return s;
}

}  // namespace wta
