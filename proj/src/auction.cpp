#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "wta/solvers.hpp"

namespace wta {

Assignment solve_auction(const Matrix& costs, double eps_final) {
    if (!costs.square() || costs.empty()) {
        throw SolverError("solve_auction: square cost matrix required (pad rectangular input first)");
    }
    if (!(eps_final > 0.0)) throw SolverError("solve_auction: eps_final must be > 0");
    if (!costs.all_finite()) throw SolverError("solve_auction: non-finite cost entry");

    const std::size_t n = costs.rows();
    constexpr long kBidLimit = 50'000'000;
    // Bidders maximize benefit = -cost.
    auto benefit = [&](std::size_t i, std::size_t j) { return -costs(i, j); };

    std::vector<double> price(n, 0.0);
    std::vector<int> object_of(n, -1);
    std::vector<int> owner(n, -1);
    long bids = 0;

    double eps = std::max(costs.max_abs() / 2.0, eps_final);
    while (true) {
        std::fill(object_of.begin(), object_of.end(), -1);
        std::fill(owner.begin(), owner.end(), -1);
        std::deque<std::size_t> unassigned;
        for (std::size_t i = 0; i < n; ++i) unassigned.push_back(i);

        while (!unassigned.empty()) {
            if (++bids > kBidLimit) throw SolverError("solve_auction: bid limit exceeded");
            const std::size_t i = unassigned.front();
            unassigned.pop_front();

            double best = -std::numeric_limits<double>::infinity();
            double second = -std::numeric_limits<double>::infinity();
            std::size_t best_j = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const double value = benefit(i, j) - price[j];
                if (value > best) {
                    second = best;
                    best = value;
                    best_j = j;
                } else if (value > second) {
                    second = value;
                }
            }
            const double increment = n == 1 ? eps : best - second + eps;
            price[best_j] += increment;
            if (owner[best_j] >= 0) {
                object_of[static_cast<std::size_t>(owner[best_j])] = -1;
                unassigned.push_back(static_cast<std::size_t>(owner[best_j]));
            }
            owner[best_j] = static_cast<int>(i);
            object_of[i] = static_cast<int>(best_j);
        }

        if (eps <= eps_final) break;
        eps = std::max(eps / 4.0, eps_final);
    }

    std::vector<int> target_of(n);
    for (std::size_t i = 0; i < n; ++i) target_of[i] = object_of[i] + 1;
    return {target_of, assignment_objective(costs, target_of)};
}

}  // namespace wta
