#pragma once

#include "normclust/topcn.hpp"

namespace normclust {

/// Output of the (L_inf, top-cn) bi-criteria search. Only solutions with
/// linf_value <= 3L are ever returned.
struct BiCriteriaResult {
    bool found = false;
    std::string failure;
    Solution solution;
    Rat linf_value = 0;
    Rat topcn_value = 0;
    Rat linf_ratio = 0;  // linf_value / L
    bool certified = false;
};

/// Top-cn optimization subject to an L_inf budget L with 3L violation:
/// the pivot pipeline with the seed pool augmented by an L_inf-feasible star
/// set and the radius grid capped at L.
BiCriteriaResult run_bicriteria(const Instance& inst, const TopcnConfig& cfg, Rng& rng);

}  // namespace normclust
