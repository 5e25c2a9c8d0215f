#pragma once

#include <functional>
#include <optional>

#include "wta/solvers.hpp"

namespace wta::detail {

/// Solver over a masked cost matrix; returns nullopt when infeasible.
using ExactSolver = std::function<std::optional<Assignment>(const Matrix&)>;

/// Cost that marks an entry as forbidden for lexicographic refinement.
double forbidden_cost(const Matrix& costs);

/// Turns any exact solver into one that returns the lexicographically
/// smallest target_of among optima, by fixing rows in order and re-solving
/// with the other entries of the row forbidden.
Assignment lexicographic_refine(const Matrix& costs, const ExactSolver& solve);

}  // namespace wta::detail
