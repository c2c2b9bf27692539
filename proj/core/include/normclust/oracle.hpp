#pragma once

#include <optional>
#include <string>
#include <vector>

#include "normclust/metric.hpp"
#include "normclust/norms.hpp"
#include "normclust/solution.hpp"

namespace normclust {

struct OracleConfig {
    int max_facilities = 10;
    int max_clients = 14;
    int max_k = 4;
    int ordered_enum_cap = 10;  // full assignment enumeration bound for ordered norms
};

struct ExactResult {
    bool feasible = false;
    Rat opt_value = 0;
    std::vector<int> opt_open_set;
    Assignment opt_assignment;
    long subsets_examined = 0;
};

enum class AssignStatus { Ok, Infeasible, UnsupportedExact };

struct AssignResult {
    AssignStatus status = AssignStatus::Infeasible;
    Assignment assign;
    Rat value = 0;
};

/// True iff a capacity-respecting full assignment over finite edges exists
/// (max-flow check). `max_edge` restricts to edges of length <= max_edge.
bool feasibility(const Instance& inst, const std::vector<int>& open,
                 const std::optional<Rat>& max_edge = std::nullopt);

/// Optimal capacity-respecting assignment for a fixed open set.
///   LInf            threshold search with a matching feasibility check
///   L1 / Lp power   one min-cost flow with edge cost d (resp. d^p)
///   TopL(ell)       min over thresholds t of flow with cost (d-t)^+, + ell*t
///   Ordered         exact only by full enumeration, |C| <= ordered_enum_cap
AssignResult optimal_assignment(const Instance& inst, const std::vector<int>& open,
                                const NormSpec& norm,
                                const std::optional<Rat>& max_edge = std::nullopt,
                                const OracleConfig& cfg = {});

/// Globally optimal solution over all k-subsets of facilities. Deterministic
/// tie-break: lexicographically smallest open set wins.
/// Throws on budget violation; infeasibility is an explicit result.
ExactResult exact_solve(const Instance& inst, const OracleConfig& cfg = {},
                        const std::optional<Rat>& max_edge = std::nullopt);

/// exact_solve restricted to assignments using only edges of length <= L.
ExactResult constrained_oracle(const Instance& inst, const Rat& linf_cap,
                               const OracleConfig& cfg = {});

}  // namespace normclust
