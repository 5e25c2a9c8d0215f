#include <cmath>
#include <limits>
#include <optional>

#include "wta/solvers.hpp"

namespace wta {

namespace {

class Enumerator {
public:
    Enumerator(const Matrix& costs, const MilpConstraints& cons)
        : costs_(costs),
          n_(costs.rows()),
          m_(costs.cols()),
          coverage_(cons.coverage_required && n_ >= m_),
          cons_(cons),
          load_(m_, 0),
          current_(n_, 0) {}

    // Visits every feasible assignment in lexicographic order of target_of.
    template <typename Visit>
    void enumerate(Visit&& visit) {
        recurse(0, 0.0, visit);
    }

private:
    template <typename Visit>
    void recurse(std::size_t row, double partial, Visit& visit) {
        if (row == n_) {
            visit(current_, partial);
            return;
        }
        const std::size_t rows_left = n_ - row;
        for (std::size_t k = 0; k < m_; ++k) {
            if (cons_.forbidden_pairs.count({static_cast<int>(row) + 1, static_cast<int>(k) + 1})) continue;
            if (cons_.max_per_target && load_[k] >= (*cons_.max_per_target)[k]) continue;
            ++load_[k];
            if (!coverage_ || uncovered() <= rows_left - 1) {
                current_[row] = static_cast<int>(k) + 1;
                recurse(row + 1, partial + costs_(row, k), visit);
            }
            --load_[k];
        }
    }

    std::size_t uncovered() const {
        std::size_t count = 0;
        for (int l : load_) count += l == 0 ? 1 : 0;
        return count;
    }

    const Matrix& costs_;
    std::size_t n_;
    std::size_t m_;
    bool coverage_;
    const MilpConstraints& cons_;
    std::vector<int> load_;
    std::vector<int> current_;
};

}  // namespace

Assignment brute_force_assignment(const Matrix& costs, const MilpConstraints& cons) {
    if (costs.empty()) throw SolverError("brute_force_assignment: empty cost matrix");
    if (costs.rows() > 8) throw SolverError("brute_force_assignment: at most 8 interceptors");
    if (!costs.all_finite()) throw SolverError("brute_force_assignment: non-finite cost entry");
    if (cons.max_per_target && cons.max_per_target->size() != costs.cols()) {
        throw SolverError("brute_force_assignment: capacity vector length does not match targets");
    }

    double optimum = std::numeric_limits<double>::infinity();
    Enumerator(costs, cons).enumerate([&](const std::vector<int>& z, double value) {
        (void)z;
        if (value < optimum) optimum = value;
    });
    if (std::isinf(optimum)) {
        throw InfeasibleError("brute_force_assignment: no feasible assignment", {"enumeration"});
    }

    // Second pass: lexicographically first assignment within the tie tolerance.
    const double limit = optimum + tie_tolerance(optimum);
    std::optional<Assignment> pick;
    Enumerator(costs, cons).enumerate([&](const std::vector<int>& z, double value) {
        if (!pick && value <= limit) pick = Assignment{z, 0.0};
    });
    pick->objective = assignment_objective(costs, pick->target_of);
    return *pick;
}

}  // namespace wta
