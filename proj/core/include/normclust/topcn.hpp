#pragma once

#include <optional>
#include <vector>

#include "normclust/lp_seed.hpp"
#include "normclust/metric.hpp"
#include "normclust/occurrence.hpp"
#include "normclust/rng.hpp"
#include "normclust/solution.hpp"

namespace normclust {

struct TopcnConfig {
    Rat c = 1;  // the top-cn parameter, in (0, 1]
    Rat eps = Rat(1, 5);
    double c_prime = 4.0;
    int rounds_per_guess = 32;
    int pipeline_repeats = 4;
    int goodness_retries = 8;
    long guess_budget = 100000;  // pivot LP solves
};

/// k independent client draws, each with probability proportional to its
/// distance to the seed solution S. All-zero distances give an empty R.
std::vector<int> choose_R(const Instance& inst, const std::vector<int>& S, Rng& rng);

/// A guessed pivot multiset with per-pivot radii.
struct PivotGuess {
    std::vector<int> pivots;  // point ids from S (facilities) or R (clients)
    std::vector<Rat> radii;   // 0 or a power of (1+eps)
};

struct PivotLpSolution {
    bool feasible = false;
    PivotGuess guess;
    std::vector<std::vector<int>> balls;           // per pivot: facilities within radius
    std::vector<std::vector<Rat>> y;               // per pivot, aligned with balls
    std::vector<std::vector<std::vector<Rat>>> x;  // pivot x ball position x client
    OccurrenceVector delta;
    Rat ell = 0;  // c * n
    Rat value = 0;
    Rat t = 0;  // minimizing threshold
};

/// Solves the pivot program exactly: one facility per ball, full fractional
/// client coverage, the radius-tying constraint, minimizing the top-cn value
/// of the connection occurrence vector (threshold-enumerated). A value_cap
/// skips thresholds t with (c n) t already past the cap.
PivotLpSolution solve_pivot_lp(const Instance& inst, const PivotGuess& guess, const Rat& c,
                               const Rat& eps,
                               const std::optional<Rat>& value_cap = std::nullopt);

/// Opens one facility per pivot from its y-distribution, assigns every client
/// to the nearest open facility.
Solution round_pivot_lp(const Instance& inst, const PivotLpSolution& sol, Rng& rng);

/// The radius-collapsed vector: each (pivot, facility) column's mass moved to
/// floor(r_p). Dominated by delta with factor (1+eps)/(1-eps).
OccurrenceVector radius_collapse(const PivotLpSolution& sol);

/// Exact expected occurrence vector of the analysis coupling that connects a
/// client directly with probability `direct_prob` x^{(p)}_{ij} and otherwise
/// indirectly at cost d(i,j) + 2 floor(r_p).
OccurrenceVector coupling_expected_occurrence(const Instance& inst, const PivotLpSolution& sol,
                                              const Rat& direct_prob);

/// Test-only taxonomy of optimum clusters against a seed solution S:
/// type 1 when the core is expensive in S, type 2 when the core is cheap in S
/// but expensive around its own center, type 3 otherwise.
std::vector<int> classify_clusters_testonly(const Instance& inst,
                                            const std::vector<int>& opt_open,
                                            const Assignment& opt_assign,
                                            const std::vector<int>& S, const Rat& eps);

/// min{3, 1 + 2/(ec)} + eps approximation for uncapacitated top-cn
/// k-clustering; c <= 1/e routes to the star-subset path.
Solution run_topcn(const Instance& inst, const TopcnConfig& cfg, Rng& rng);

/// True when c <= 1/e (decided by rational brackets around 1/e).
bool routes_to_three_approx(const Rat& c);

}  // namespace normclust
