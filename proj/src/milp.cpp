#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "refine.hpp"
#include "wta/solvers.hpp"

namespace wta {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Problem {
    const Matrix& costs;
    std::size_t rows;
    std::size_t cols;
    bool coverage;                // effective: requested and rows >= cols
    std::vector<int> capacity;    // per target, large when unconstrained
    std::vector<char> forbidden;  // rows * cols
    bool capacitated;

    bool allowed(std::size_t i, std::size_t k) const { return !forbidden[i * cols + k]; }
};

struct Node {
    std::vector<int> fixed;  // column per row or -1
    std::vector<int> load;   // fixed interceptors per target
    double fixed_cost = 0.0;
};

struct Relaxation {
    bool feasible = false;
    double bound = kInf;
    std::vector<int> column_of_row;  // full solution (fixed + relaxed rows)
};

// Lower bound over the unfixed rows: coverage of still-uncovered targets is
// kept, capacities are dropped. Solved exactly with the assignment kernel.
Relaxation relax(const Problem& p, const Node& node) {
    Relaxation out;
    out.column_of_row = node.fixed;

    std::vector<std::size_t> free_rows;
    for (std::size_t i = 0; i < p.rows; ++i) {
        if (node.fixed[i] < 0) free_rows.push_back(i);
    }
    auto usable = [&](std::size_t i, std::size_t k) {
        return p.allowed(i, k) && node.load[k] < p.capacity[k];
    };

    std::vector<std::size_t> uncovered;
    if (p.coverage) {
        for (std::size_t k = 0; k < p.cols; ++k) {
            if (node.load[k] == 0) uncovered.push_back(k);
        }
    }
    if (uncovered.size() > free_rows.size()) return out;

    // Cheapest usable target per free row.
    std::vector<int> cheapest(p.rows, -1);
    for (std::size_t i : free_rows) {
        double best = kInf;
        for (std::size_t k = 0; k < p.cols; ++k) {
            if (usable(i, k) && p.costs(i, k) < best) {
                best = p.costs(i, k);
                cheapest[i] = static_cast<int>(k);
            }
        }
        if (cheapest[i] < 0) return out;
    }

    double value = 0.0;
    if (uncovered.empty()) {
        for (std::size_t i : free_rows) {
            out.column_of_row[i] = cheapest[i];
            value += p.costs(i, static_cast<std::size_t>(cheapest[i]));
        }
    } else {
        // Rows x (uncovered primaries + surplus columns priced at row minimum).
        const std::size_t n = free_rows.size();
        const double big = detail::forbidden_cost(p.costs);
        Matrix sub(n, n, 0.0);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = free_rows[r];
            for (std::size_t c = 0; c < uncovered.size(); ++c) {
                sub(r, c) = usable(i, uncovered[c]) ? p.costs(i, uncovered[c]) : big;
            }
            for (std::size_t c = uncovered.size(); c < n; ++c) {
                sub(r, c) = p.costs(i, static_cast<std::size_t>(cheapest[i]));
            }
        }
        const auto cols = detail::hungarian_columns(sub);
        for (std::size_t r = 0; r < n; ++r) {
            const std::size_t i = free_rows[r];
            const auto c = static_cast<std::size_t>(cols[r]);
            if (sub(r, c) >= big) return out;
            out.column_of_row[i] = c < uncovered.size() ? static_cast<int>(uncovered[c]) : cheapest[i];
            value += sub(r, c);
        }
    }
    out.feasible = true;
    out.bound = node.fixed_cost + value;
    return out;
}

// First free row whose relaxed target exceeds its capacity, or -1.
int violating_row(const Problem& p, const Node& node, const std::vector<int>& column_of_row) {
    if (!p.capacitated) return -1;
    std::vector<int> load(p.cols, 0);
    for (int c : column_of_row) ++load[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < p.rows; ++i) {
        if (node.fixed[i] >= 0) continue;
        const auto c = static_cast<std::size_t>(column_of_row[i]);
        if (load[c] > p.capacity[c]) return static_cast<int>(i);
    }
    return -1;
}

class BranchAndBound {
public:
    explicit BranchAndBound(const Problem& p) : p_(p) {}

    std::optional<std::vector<int>> run() {
        Node root{std::vector<int>(p_.rows, -1), std::vector<int>(p_.cols, 0), 0.0};
        explore(root);
        return incumbent_;
    }

private:
    void explore(const Node& node) {
        if (++nodes_ > kNodeLimit) throw SolverError("solve_milp: node limit exceeded");
        const Relaxation rx = relax(p_, node);
        if (!rx.feasible) return;
        if (incumbent_ && rx.bound >= best_ - 1e-12 * (1.0 + std::abs(best_))) return;

        const int row = violating_row(p_, node, rx.column_of_row);
        if (row < 0) {
            best_ = rx.bound;
            incumbent_ = rx.column_of_row;
            return;
        }
        const auto i = static_cast<std::size_t>(row);
        std::vector<std::size_t> order;
        for (std::size_t k = 0; k < p_.cols; ++k) {
            if (p_.allowed(i, k) && node.load[k] < p_.capacity[k]) order.push_back(k);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return p_.costs(i, a) < p_.costs(i, b);
        });
        for (std::size_t k : order) {
            Node child = node;
            child.fixed[i] = static_cast<int>(k);
            ++child.load[k];
            child.fixed_cost += p_.costs(i, k);
            explore(child);
        }
    }

    static constexpr long kNodeLimit = 5'000'000;
    const Problem& p_;
    std::optional<std::vector<int>> incumbent_;
    double best_ = kInf;
    long nodes_ = 0;
};

std::vector<std::string> precheck(const Problem& p) {
    std::vector<std::string> binding;
    for (std::size_t i = 0; i < p.rows; ++i) {
        bool any = false;
        for (std::size_t k = 0; k < p.cols && !any; ++k) any = p.allowed(i, k);
        if (!any) binding.push_back("forbidden_pairs: interceptor " + std::to_string(i + 1) + " has no permitted target");
    }
    if (p.capacitated) {
        const long total = std::accumulate(p.capacity.begin(), p.capacity.end(), 0L);
        if (total < static_cast<long>(p.rows)) {
            binding.push_back("max_per_target: total capacity " + std::to_string(total) + " < " +
                              std::to_string(p.rows) + " interceptors");
        }
    }
    if (p.coverage) {
        for (std::size_t k = 0; k < p.cols; ++k) {
            bool any = false;
            for (std::size_t i = 0; i < p.rows && !any; ++i) any = p.allowed(i, k);
            if (!any || p.capacity[k] < 1) {
                binding.push_back("coverage: target " + std::to_string(k + 1) + " cannot be covered");
            }
        }
    }
    return binding;
}

}  // namespace

Assignment solve_milp(const Matrix& costs, const MilpConstraints& cons) {
    if (costs.empty()) throw SolverError("solve_milp: empty cost matrix");
    if (!costs.all_finite()) throw SolverError("solve_milp: non-finite cost entry");
    const std::size_t n = costs.rows();
    const std::size_t m = costs.cols();

    const int unlimited = static_cast<int>(n);
    Problem base{costs, n, m, cons.coverage_required && n >= m, std::vector<int>(m, unlimited),
                 std::vector<char>(n * m, 0), cons.max_per_target.has_value()};
    if (cons.max_per_target) {
        if (cons.max_per_target->size() != m) {
            throw SolverError("solve_milp: capacity vector length does not match targets");
        }
        for (std::size_t k = 0; k < m; ++k) {
            const int cap = (*cons.max_per_target)[k];
            if (cap < 1) throw SolverError("solve_milp: capacities must be >= 1");
            base.capacity[k] = std::min(cap, unlimited);
        }
    }
    for (const auto& [i, k] : cons.forbidden_pairs) {
        if (i < 1 || k < 1 || static_cast<std::size_t>(i) > n || static_cast<std::size_t>(k) > m) {
            throw SolverError("solve_milp: forbidden pair out of range");
        }
        base.forbidden[static_cast<std::size_t>(i - 1) * m + static_cast<std::size_t>(k - 1)] = 1;
    }
    if (auto binding = precheck(base); !binding.empty()) {
        throw InfeasibleError("solve_milp: constraints are infeasible", binding);
    }

    const double big = detail::forbidden_cost(costs);
    auto solve = [&](const Matrix& masked) -> std::optional<Assignment> {
        Problem p = base;
        std::vector<char> forbidden = base.forbidden;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < m; ++k) {
                if (masked(i, k) >= big) forbidden[i * m + k] = 1;
            }
        }
        Problem q{masked, n, m, p.coverage, p.capacity, std::move(forbidden), p.capacitated};
        auto cols = BranchAndBound(q).run();
        if (!cols) return std::nullopt;
        std::vector<int> target_of(n);
        for (std::size_t i = 0; i < n; ++i) target_of[i] = (*cols)[i] + 1;
        return Assignment{target_of, assignment_objective(costs, target_of)};
    };

    if (!solve(costs)) {
        std::vector<std::string> binding;
        if (base.coverage) binding.emplace_back("coverage");
        if (base.capacitated) binding.emplace_back("max_per_target");
        if (!cons.forbidden_pairs.empty()) binding.emplace_back("forbidden_pairs");
        throw InfeasibleError("solve_milp: no assignment satisfies the side constraints jointly", binding);
    }
    return detail::lexicographic_refine(costs, solve);
}

}  // namespace wta
