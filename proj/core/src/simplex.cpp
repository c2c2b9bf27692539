#include "normclust/simplex.hpp"

#include <limits>
#include <stdexcept>

namespace normclust {

namespace {
constexpr int kDegenerateStreakLimit = 64;
}

SimplexSolver::SimplexSolver(int num_vars, std::vector<LpRow> rows) : n_struct_(num_vars) {
    m_ = static_cast<int>(rows.size());

    // Normalize to rhs >= 0, count slack and artificial columns.
    int n_slack = 0, n_art = 0;
    for (auto& row : rows) {
        if (row.rhs < 0) {
            for (auto& [v, a] : row.coeffs) a = -a;
            row.rhs = -row.rhs;
            row.rel = row.rel == Rel::Le ? Rel::Ge : (row.rel == Rel::Ge ? Rel::Le : Rel::Eq);
        }
        if (row.rel != Rel::Eq) ++n_slack;
        if (row.rel != Rel::Le) ++n_art;
    }
    first_artificial_ = n_struct_ + n_slack;
    n_total_ = first_artificial_ + n_art;

    tab_.assign(m_ + 1, std::vector<Rat>(n_total_ + 1, Rat(0)));
    basis_.assign(m_, -1);
    int slack_at = n_struct_, art_at = first_artificial_;
    for (int i = 0; i < m_; ++i) {
        for (const auto& [v, a] : rows[i].coeffs) {
            if (v < 0 || v >= n_struct_) throw std::invalid_argument("simplex: bad variable index");
            tab_[i][v] += a;
        }
        tab_[i][n_total_] = rows[i].rhs;
        if (rows[i].rel == Rel::Le) {
            tab_[i][slack_at] = 1;
            basis_[i] = slack_at++;
        } else if (rows[i].rel == Rel::Ge) {
            tab_[i][slack_at++] = -1;
            tab_[i][art_at] = 1;
            basis_[i] = art_at++;
        } else {
            tab_[i][art_at] = 1;
            basis_[i] = art_at++;
        }
    }
}

void SimplexSolver::pivot(int row, int col) {
    const int w = n_total_ + 1;
    Rat inv = 1 / tab_[row][col];
    for (int j = 0; j < w; ++j)
        if (tab_[row][j] != 0) tab_[row][j] *= inv;
    tab_[row][col] = 1;
    for (int i = 0; i <= m_; ++i) {
        if (i == row || tab_[i][col] == 0) continue;
        Rat factor = tab_[i][col];
        for (int j = 0; j < w; ++j)
            if (tab_[row][j] != 0) tab_[i][j] -= factor * tab_[row][j];
        tab_[i][col] = 0;
    }
    basis_[row] = col;
}

void SimplexSolver::install_objective(const std::vector<Rat>& c) {
    cost_.assign(n_total_, Rat(0));
    for (int j = 0; j < static_cast<int>(c.size()) && j < n_struct_; ++j) cost_[j] = c[j];
    // Reduced costs  c_j - c_B * (B^-1 A)_j; last cell holds -objective.
    auto& z = tab_[m_];
    for (int j = 0; j <= n_total_; ++j) z[j] = j < n_total_ ? cost_[j] : Rat(0);
    for (int i = 0; i < m_; ++i) {
        const Rat& cb = cost_[basis_[i]];
        if (cb == 0) continue;
        for (int j = 0; j <= n_total_; ++j)
            if (tab_[i][j] != 0) z[j] -= cb * tab_[i][j];
    }
}

LpResult SimplexSolver::optimize() {
    auto& z = tab_[m_];
    bool bland = false;
    int degenerate_streak = 0;
    for (;;) {
        int col = -1;
        if (bland) {
            for (int j = 0; j < first_artificial_; ++j)
                if (z[j] < 0) {
                    col = j;
                    break;
                }
        } else {
            const Rat* best = nullptr;
            for (int j = 0; j < first_artificial_; ++j)
                if (z[j] < 0 && (best == nullptr || z[j] < *best)) {
                    best = &z[j];
                    col = j;
                }
        }
        if (col < 0) break;  // optimal

        int row = -1;
        Rat best_ratio = 0;
        for (int i = 0; i < m_; ++i) {
            if (tab_[i][col] <= 0) continue;
            Rat ratio = tab_[i][n_total_] / tab_[i][col];
            if (row < 0 || ratio < best_ratio ||
                (ratio == best_ratio && basis_[i] < basis_[row])) {
                row = i;
                best_ratio = ratio;
            }
        }
        if (row < 0) return LpResult{LpStatus::Unbounded, Rat(0), {}};

        if (best_ratio == 0) {
            if (++degenerate_streak > kDegenerateStreakLimit) bland = true;
        } else {
            degenerate_streak = 0;
        }
        pivot(row, col);
    }
    return extract();
}

LpResult SimplexSolver::extract() const {
    LpResult res;
    res.status = LpStatus::Optimal;
    res.value = -tab_[m_][n_total_];
    res.x.assign(n_struct_, Rat(0));
    for (int i = 0; i < m_; ++i)
        if (basis_[i] < n_struct_) res.x[basis_[i]] = tab_[i][n_total_];
    return res;
}

LpResult SimplexSolver::solve(const std::vector<Rat>& objective) {
    if (!feasible_basis_) {
        // Phase 1: drive out the artificials.
        cost_.assign(n_total_, Rat(0));
        for (int j = first_artificial_; j < n_total_; ++j) cost_[j] = 1;
        auto& z = tab_[m_];
        for (int j = 0; j <= n_total_; ++j) z[j] = j >= first_artificial_ && j < n_total_ ? Rat(1) : Rat(0);
        for (int i = 0; i < m_; ++i) {
            if (cost_[basis_[i]] == 0) continue;
            for (int j = 0; j <= n_total_; ++j)
                if (tab_[i][j] != 0) z[j] -= tab_[i][j];
        }
        // Artificials may re-enter during phase 1, so price all columns.
        int saved_first_art = first_artificial_;
        first_artificial_ = n_total_;
        LpResult r1 = optimize();
        first_artificial_ = saved_first_art;
        if (r1.status != LpStatus::Optimal) return r1;
        if (r1.value != 0) return LpResult{LpStatus::Infeasible, r1.value, {}};

        // Remove leftover basic artificials (all at zero): pivot them out, or
        // drop the row when it is redundant.
        for (int i = m_ - 1; i >= 0; --i) {
            if (basis_[i] < first_artificial_) continue;
            int col = -1;
            for (int j = 0; j < first_artificial_ && col < 0; ++j)
                if (tab_[i][j] != 0) col = j;
            if (col >= 0) {
                pivot(i, col);
            } else {
                tab_.erase(tab_.begin() + i);
                basis_.erase(basis_.begin() + i);
                --m_;
            }
        }
        feasible_basis_ = true;
    }
    return resolve(objective);
}

LpResult SimplexSolver::resolve(const std::vector<Rat>& objective) {
    if (!feasible_basis_) throw std::logic_error("simplex: resolve before successful solve");
    install_objective(objective);
    return optimize();
}

}  // namespace normclust
