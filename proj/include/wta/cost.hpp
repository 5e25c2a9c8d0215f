#pragma once

#include <span>

#include "wta/geometry.hpp"
#include "wta/matrix.hpp"
#include "wta/scenario.hpp"

namespace wta {

/// Pairwise engagement costs c_ik, lower = preferred.
struct CostMatrix {
    Matrix values;
    CostWeights weights_used;
    bool normalized = false;
};

struct CostOptions {
    bool normalize = true;
    ThreatSense threat_sense = ThreatSense::inverted;
};

/// Min-max rescales each metric (distance, closing, relative speed, time to
/// asset, threat, relevance) onto [0,1]. Constant metrics map to 0; infinite
/// entries are rescaled over the finite ones and saturate at 1.
SceneSnapshot normalize_metrics(const SceneSnapshot& snapshot);

/// In-place min-max rescale of one metric; exposed for reuse in tests.
void normalize_range(std::span<double> values);

/// c_ik = w_d |r_ik| + w_v |v_ik| + w_theta theta_k + w_psi psi_k. Under
/// ThreatSense::inverted the last two terms use (1 - metric) so that high
/// threat and relevance lower the cost.
CostMatrix surrogate_cost_matrix(const SceneSnapshot& snapshot, const CostWeights& w,
                                 const CostOptions& options = {});

/// Adds penalty to every entry off the previous assignment. Rows whose
/// previous entry is 0 (none) are left untouched.
CostMatrix apply_switch_penalty(const CostMatrix& cm, std::span<const int> previous_assignment,
                                double penalty);

namespace reference {

CostMatrix surrogate_cost_matrix(const SceneSnapshot& snapshot, const CostWeights& w,
                                 const CostOptions& options = {});

}  // namespace reference

}  // namespace wta
