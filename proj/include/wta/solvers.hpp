#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wta/matrix.hpp"

namespace wta {

/// target_of[i] = k (1-based) assigns interceptor i+1 to target k.
struct Assignment {
    std::vector<int> target_of;
    double objective = 0.0;

    friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Concrete side constraints of the MILP: coverage, per-target capacity and
/// forbidden interceptor-target pairs (1-based ids).
struct MilpConstraints {
    bool coverage_required = true;
    std::optional<std::vector<int>> max_per_target;
    std::set<std::pair<int, int>> forbidden_pairs;
};

class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

/// No assignment satisfies the constraints; binding() names the constraint
/// families involved.
class InfeasibleError : public SolverError {
public:
    InfeasibleError(const std::string& what, std::vector<std::string> binding)
        : SolverError(what), binding_(std::move(binding)) {}
    const std::vector<std::string>& binding() const { return binding_; }

private:
    std::vector<std::string> binding_;
};

enum class PadMode { duplicate_targets, dummy_columns };

/// Square instance derived from a rectangular one, plus the map back.
/// row_origin[r] is the original row or -1 for a dummy row; col_origin[c] is
/// the original column, or -1 for a surplus column that resolves to the
/// cheapest target of whichever row takes it.
struct PaddedProblem {
    Matrix costs;
    std::vector<int> row_origin;
    std::vector<int> col_origin;
    std::size_t original_rows = 0;
    std::size_t original_cols = 0;
};

/// N > N_T: surplus interceptors double up on real targets while every target
/// stays covered. N < N_T: zero-cost dummy interceptors absorb the unengaged
/// targets. Throws SolverError for square input and InfeasibleError when
/// capacities cannot host every interceptor.
PaddedProblem pad_rectangular(const Matrix& costs, PadMode mode,
                              const std::optional<std::vector<int>>& capacities = std::nullopt);

/// Maps a column-per-row solution of the padded problem back to target_of.
std::vector<int> unpad(const PaddedProblem& padded, const std::vector<int>& column_of_row,
                       const Matrix& original);

/// Sum of costs(i, target_of[i]-1).
double assignment_objective(const Matrix& costs, const std::vector<int>& target_of);

/// Minimum-cost assignment. Square input is a perfect matching; rectangular
/// input is padded (surplus interceptors double up, excess targets go
/// unengaged). Among equal-cost optima the lexicographically smallest
/// target_of is returned.
Assignment solve_hungarian(const Matrix& costs);

/// Exact branch and bound over binary z_ik with the concrete side constraints.
Assignment solve_milp(const Matrix& costs, const MilpConstraints& constraints = {});

/// Forward auction with epsilon scaling on a square matrix. The objective is
/// within n * eps_final of the optimum.
Assignment solve_auction(const Matrix& costs, double eps_final = 1e-6);

/// Exhaustive enumeration for n <= 8, used as the test oracle.
Assignment brute_force_assignment(const Matrix& costs, const MilpConstraints& constraints = {});

/// Objective tolerance used to decide ties between optima.
double tie_tolerance(double objective);

namespace detail {

/// Kuhn-Munkres with row/column potentials, rows <= cols. Returns the column
/// assigned to each row.
std::vector<int> hungarian_columns(const Matrix& costs);

}  // namespace detail

}  // namespace wta
