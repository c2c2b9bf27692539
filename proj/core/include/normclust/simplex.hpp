#pragma once

#include <vector>

#include "normclust/rational.hpp"

namespace normclust {

enum class Rel { Le, Eq, Ge };

struct LpRow {
    std::vector<std::pair<int, Rat>> coeffs;  // (variable, coefficient)
    Rel rel = Rel::Le;
    Rat rhs = 0;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat value = 0;
    std::vector<Rat> x;
};

/// Dense exact-rational simplex over variables x >= 0, minimizing c'x.
///
/// Pivoting uses the most-negative reduced cost with a Bland fallback after a
/// degeneracy streak, so it terminates on every input. Supports swapping the
/// objective and re-optimizing from the current basis, which the threshold
/// enumerations rely on.
class SimplexSolver {
public:
    SimplexSolver(int num_vars, std::vector<LpRow> rows);

    LpResult solve(const std::vector<Rat>& objective);

    /// Re-optimizes with a new objective starting from the current (feasible)
    /// basis. Must be called after a successful solve().
    LpResult resolve(const std::vector<Rat>& objective);

private:
    LpResult optimize();
    void install_objective(const std::vector<Rat>& c);
    void pivot(int row, int col);
    LpResult extract() const;

    int n_struct_;
    int n_total_ = 0;
    int m_ = 0;
    std::vector<std::vector<Rat>> tab_;  // m_ rows + objective row; last col = rhs
    std::vector<int> basis_;
    std::vector<Rat> cost_;  // current full objective (structural + slack)
    int first_artificial_ = -1;
    bool feasible_basis_ = false;
};

}  // namespace normclust
