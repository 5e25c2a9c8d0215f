#include "wta/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace wta {

namespace {

constexpr std::size_t kParallelThreshold = 4096;

double target_term(double metric, ThreatSense sense) {
    return sense == ThreatSense::inverted ? 1.0 - metric : metric;
}

SceneSnapshot prepared(const SceneSnapshot& snapshot, const CostOptions& options) {
    return options.normalize ? normalize_metrics(snapshot) : snapshot;
}

}  // namespace

void normalize_range(std::span<double> values) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const bool any_finite = lo <= hi;
    const double span = any_finite ? hi - lo : 0.0;
    for (double& v : values) {
        if (!std::isfinite(v)) {
            v = v > 0.0 ? 1.0 : 0.0;
        } else if (span > 0.0) {
            v = (v - lo) / span;
        } else {
            v = 0.0;
        }
    }
}

SceneSnapshot normalize_metrics(const SceneSnapshot& snapshot) {
    SceneSnapshot out = snapshot;
    normalize_range(out.distance.data());
    normalize_range(out.closing.data());
    normalize_range(out.relative_speed.data());
    normalize_range(out.time_to_asset);
    normalize_range(out.threat_level);
    normalize_range(out.asset_relevance);
    return out;
}

CostMatrix surrogate_cost_matrix(const SceneSnapshot& snapshot, const CostWeights& w,
                                 const CostOptions& options) {
    const SceneSnapshot s = prepared(snapshot, options);
    const std::size_t rows = s.num_interceptors();
    const std::size_t cols = s.num_targets();

    std::vector<double> theta_term(cols);
    std::vector<double> psi_term(cols);
    for (std::size_t k = 0; k < cols; ++k) {
        theta_term[k] = w.w_theta * target_term(s.threat_level[k], options.threat_sense);
        psi_term[k] = w.w_psi * target_term(s.asset_relevance[k], options.threat_sense);
    }

    CostMatrix cm{Matrix(rows, cols), w, options.normalize};
    const auto nrows = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
    for (long r = 0; r < nrows; ++r) {
        const auto i = static_cast<std::size_t>(r);
        for (std::size_t k = 0; k < cols; ++k) {
            cm.values(i, k) = w.w_d * s.distance(i, k) + w.w_v * s.relative_speed(i, k) + theta_term[k] +
                             psi_term[k];
        }
    }
    return cm;
}

namespace reference {

CostMatrix surrogate_cost_matrix(const SceneSnapshot& snapshot, const CostWeights& w,
                                 const CostOptions& options) {
    const SceneSnapshot s = prepared(snapshot, options);
    CostMatrix cm{Matrix(s.num_interceptors(), s.num_targets()), w, options.normalize};
    for (std::size_t i = 0; i < s.num_interceptors(); ++i) {
        for (std::size_t k = 0; k < s.num_targets(); ++k) {
            cm.values(i, k) = w.w_d * s.distance(i, k) + w.w_v * s.relative_speed(i, k) +
                              w.w_theta * target_term(s.threat_level[k], options.threat_sense) +
                              w.w_psi * target_term(s.asset_relevance[k], options.threat_sense);
        }
    }
    return cm;
}

}  // namespace reference

CostMatrix apply_switch_penalty(const CostMatrix& cm, std::span<const int> previous_assignment,
                                double penalty) {
    if (!(penalty >= 0.0)) throw std::invalid_argument("switch penalty must be >= 0");
    CostMatrix out = cm;
    if (penalty == 0.0 || previous_assignment.empty()) return out;
    if (previous_assignment.size() != cm.values.rows()) {
        throw std::invalid_argument("previous assignment length does not match cost rows");
    }
    for (std::size_t i = 0; i < out.values.rows(); ++i) {
        const int prev = previous_assignment[i];
        if (prev == 0) continue;
        for (std::size_t k = 0; k < out.values.cols(); ++k) {
            if (static_cast<int>(k) + 1 != prev) out.values(i, k) += penalty;
        }
    }
    return out;
}

}  // namespace wta
