#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "normclust/metric.hpp"
#include "normclust/norms.hpp"

namespace normclust {

/// client -> facility map. Index j covers clients [0, n_clients).
using Assignment = std::vector<int>;

/// Statistics and provenance carried with every solver output.
struct RunRecord {
    std::uint64_t instance_hash = 0;
    std::string algorithm;
    std::string config;
    std::uint64_t seed = 0;
    long guesses_examined = 0;
    long guesses_pruned = 0;
    long guesses_feasible = 0;
    bool truncated = false;  // guess budget exhausted before the stream ended
    bool certified = false;  // budgeted searches: the certificate held
};

/// A feasible solution: open set, capacity-respecting assignment and its
/// exact norm value.
struct Solution {
    bool feasible = false;
    std::string infeasible_reason;
    std::vector<int> open;
    Assignment assign;
    Rat value = 0;
    RunRecord record;
};

CostVector cost_vector(const Instance& inst, const Assignment& assign);

/// Recomputes coverage, capacity usage and the norm value; exact comparison.
struct VerifyReport {
    bool ok = true;
    std::vector<std::string> issues;
};
VerifyReport verify_result(const Instance& inst, const Solution& sol);

std::string solution_to_json(const Instance& inst, const Solution& sol);
Solution solution_from_json(const std::string& text);

}  // namespace normclust
