#include <algorithm>
#include <limits>

#include "refine.hpp"
#include "wta/solvers.hpp"

namespace wta {

namespace detail {

std::vector<int> hungarian_columns(const Matrix& a) {
    // Shortest augmenting path form of Kuhn-Munkres with potentials u, v.
    // Indices are 1-based internally; column 0 is the virtual source.
    const std::size_t n = a.rows();
    const std::size_t m = a.cols();
    if (n > m) throw SolverError("hungarian: more rows than columns");
    const double inf = std::numeric_limits<double>::infinity();

    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<std::size_t> owner(m + 1, 0);  // row matched to column j
    std::vector<std::size_t> way(m + 1, 0);

    for (std::size_t i = 1; i <= n; ++i) {
        owner[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = owner[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (owner[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> column_of_row(n, -1);
    for (std::size_t j = 1; j <= m; ++j) {
        if (owner[j] != 0) column_of_row[owner[j] - 1] = static_cast<int>(j - 1);
    }
    return column_of_row;
}

double forbidden_cost(const Matrix& costs) {
    return 4.0 * static_cast<double>(costs.rows() + costs.cols() + 1) * (costs.max_abs() + 1.0);
}

Assignment lexicographic_refine(const Matrix& costs, const ExactSolver& solve) {
    auto first = solve(costs);
    if (!first) throw InfeasibleError("no feasible assignment", {});
    const double optimum = first->objective;
    const double tol = tie_tolerance(optimum);
    const double big = forbidden_cost(costs);

    Matrix fixed = costs;
    Assignment best = *first;
    for (std::size_t i = 0; i < costs.rows(); ++i) {
        for (std::size_t k = 0; k < costs.cols(); ++k) {
            if (fixed(i, k) >= big) continue;
            if (static_cast<int>(k) + 1 == best.target_of[i]) break;  // already the smallest feasible
            Matrix trial = fixed;
            for (std::size_t c = 0; c < costs.cols(); ++c) {
                if (c != k) trial(i, c) = big;
            }
            auto candidate = solve(trial);
            if (!candidate) continue;
            bool clean = true;
            for (std::size_t r = 0; r < costs.rows() && clean; ++r) {
                clean = trial(r, static_cast<std::size_t>(candidate->target_of[r] - 1)) < big;
            }
            const double value = assignment_objective(costs, candidate->target_of);
            if (clean && value <= optimum + tol) {
                best = Assignment{candidate->target_of, value};
                break;
            }
        }
        // Pin row i to its chosen target for the remaining rows.
        const auto keep = static_cast<std::size_t>(best.target_of[i] - 1);
        for (std::size_t c = 0; c < costs.cols(); ++c) {
            if (c != keep) fixed(i, c) = big;
        }
    }
    best.objective = assignment_objective(costs, best.target_of);
    return best;
}

}  // namespace detail

namespace {

Assignment hungarian_once(const Matrix& costs) {
    if (costs.rows() == costs.cols()) {
        auto cols = detail::hungarian_columns(costs);
        std::vector<int> target_of(cols.size());
        for (std::size_t i = 0; i < cols.size(); ++i) target_of[i] = cols[i] + 1;
        return {target_of, assignment_objective(costs, target_of)};
    }
    const PaddedProblem padded = pad_rectangular(costs, PadMode::dummy_columns);
    auto target_of = unpad(padded, detail::hungarian_columns(padded.costs), costs);
    return {target_of, assignment_objective(costs, target_of)};
}

}  // namespace

Assignment solve_hungarian(const Matrix& costs) {
    if (costs.empty()) throw SolverError("solve_hungarian: empty cost matrix");
    if (!costs.all_finite()) throw SolverError("solve_hungarian: non-finite cost entry");
    return detail::lexicographic_refine(
        costs, [](const Matrix& m) -> std::optional<Assignment> { return hungarian_once(m); });
}

}  // namespace wta
