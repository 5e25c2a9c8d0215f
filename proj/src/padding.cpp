#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wta/solvers.hpp"

namespace wta {

namespace {

int cheapest_column(std::span<const double> row) {
    return static_cast<int>(std::min_element(row.begin(), row.end()) - row.begin());
}

// Larger than the cost difference between any two assignments of the matrix.
double dominating_cost(const Matrix& costs) {
    return 4.0 * static_cast<double>(costs.rows() + costs.cols() + 1) * (costs.max_abs() + 1.0);
}

}  // namespace

double tie_tolerance(double objective) { return 1e-9 * (1.0 + std::abs(objective)); }

double assignment_objective(const Matrix& costs, const std::vector<int>& target_of) {
    double total = 0.0;
    for (std::size_t i = 0; i < target_of.size(); ++i) {
        total += costs(i, static_cast<std::size_t>(target_of[i] - 1));
    }
    return total;
}

PaddedProblem pad_rectangular(const Matrix& costs, PadMode mode,
                              const std::optional<std::vector<int>>& capacities) {
    const std::size_t n = costs.rows();
    const std::size_t m = costs.cols();
    if (n == m) throw SolverError("pad_rectangular: no padding needed for a square matrix");
    if (n == 0 || m == 0) throw SolverError("pad_rectangular: empty cost matrix");
    if (capacities && capacities->size() != m) {
        throw SolverError("pad_rectangular: capacity vector length does not match targets");
    }

    PaddedProblem p;
    p.original_rows = n;
    p.original_cols = m;

    if (n < m) {
        // Dummy interceptors: every target may stay unengaged at zero cost.
        p.costs = Matrix(m, m, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            std::copy(costs.row(i).begin(), costs.row(i).end(), p.costs.row(i).begin());
        }
        p.row_origin.resize(m, -1);
        std::iota(p.row_origin.begin(), p.row_origin.begin() + static_cast<long>(n), 0);
        p.col_origin.resize(m);
        std::iota(p.col_origin.begin(), p.col_origin.end(), 0);
        return p;
    }

    const std::size_t surplus = n - m;
    if (capacities) {
        const long total = std::accumulate(capacities->begin(), capacities->end(), 0L);
        if (total < static_cast<long>(n)) {
            throw InfeasibleError("pad_rectangular: capacities host " + std::to_string(total) +
                                      " interceptors, need " + std::to_string(n),
                                  {"max_per_target"});
        }
        if (std::any_of(capacities->begin(), capacities->end(), [](int c) { return c < 1; })) {
            throw InfeasibleError("pad_rectangular: a target has capacity < 1 under coverage",
                                  {"max_per_target", "coverage"});
        }
    }

    if (mode == PadMode::dummy_columns && !capacities) {
        // One surplus column per extra interceptor, priced at the row minimum.
        p.costs = Matrix(n, n);
        p.row_origin.resize(n);
        std::iota(p.row_origin.begin(), p.row_origin.end(), 0);
        p.col_origin.resize(n, -1);
        std::iota(p.col_origin.begin(), p.col_origin.begin() + static_cast<long>(m), 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto src = costs.row(i);
            std::copy(src.begin(), src.end(), p.costs.row(i).begin());
            const double best = *std::min_element(src.begin(), src.end());
            for (std::size_t c = m; c < n; ++c) p.costs(i, c) = best;
        }
        return p;
    }

    // Explicit copies: target k gets min(cap_k, surplus + 1) columns. The first
    // copy of each target is primary; dummy rows pay a dominating cost for
    // primaries so real interceptors must cover every target.
    std::vector<int> copies(m);
    for (std::size_t k = 0; k < m; ++k) {
        const int cap = capacities ? (*capacities)[k] : static_cast<int>(surplus + 1);
        copies[k] = std::min(cap, static_cast<int>(surplus + 1));
    }
    std::vector<int> col_target;
    std::vector<char> primary;
    for (std::size_t k = 0; k < m; ++k) {
        for (int c = 0; c < copies[k]; ++c) {
            col_target.push_back(static_cast<int>(k));
            primary.push_back(c == 0 ? 1 : 0);
        }
    }
    const std::size_t width = col_target.size();
    if (width < n) {
        throw InfeasibleError("pad_rectangular: capacities cannot host every interceptor",
                              {"max_per_target"});
    }
    const double big = dominating_cost(costs);
    p.costs = Matrix(width, width, 0.0);
    p.row_origin.assign(width, -1);
    for (std::size_t i = 0; i < n; ++i) {
        p.row_origin[i] = static_cast<int>(i);
        for (std::size_t c = 0; c < width; ++c) {
            p.costs(i, c) = costs(i, static_cast<std::size_t>(col_target[c]));
        }
    }
    for (std::size_t i = n; i < width; ++i) {
        for (std::size_t c = 0; c < width; ++c) p.costs(i, c) = primary[c] ? big : 0.0;
    }
    p.col_origin = col_target;
    return p;
}

std::vector<int> unpad(const PaddedProblem& padded, const std::vector<int>& column_of_row,
                       const Matrix& original) {
    std::vector<int> target_of(padded.original_rows, 0);
    for (std::size_t r = 0; r < column_of_row.size(); ++r) {
        const int row = padded.row_origin[r];
        if (row < 0) continue;
        const int col = padded.col_origin[static_cast<std::size_t>(column_of_row[r])];
        const int target = col >= 0 ? col : cheapest_column(original.row(static_cast<std::size_t>(row)));
        target_of[static_cast<std::size_t>(row)] = target + 1;
    }
    return target_of;
}

}  // namespace wta
