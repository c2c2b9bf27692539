#pragma once

#include <string>
#include <vector>

#include "normclust/rng.hpp"

namespace normclust {

struct PropReport {
    std::string name;
    long trials = 0;
    long violations = 0;
    std::vector<std::string> samples;  // first few violating cases
    bool ok() const { return violations == 0; }
};

/// Norm axioms on random vectors: homogeneity, subadditivity, monotonicity,
/// permutation symmetry. Exact except the Lp root (1e-9 on the root).
PropReport prop_norm_axioms(long trials, Rng rng);

/// min over thresholds of the linearized form equals the sort-based top-l.
PropReport prop_topl_linearization(long trials, Rng rng);

/// Both ordered-norm formulas agree: weights times sorted entries vs the
/// weight-difference combination of top-l norms.
PropReport prop_ordered_dual_formula(long trials, Rng rng);

/// occ_top_l is concave over occurrence vectors of equal mass.
PropReport prop_occurrence_concavity(long trials, Rng rng);

/// Domination survives convex combinations.
PropReport prop_domination_convex_combination(long trials, Rng rng);

/// Collapsing grouped mass onto bounded per-group values is dominated.
PropReport prop_domination_averaging(long trials, Rng rng);

/// Any valid coupling is dominated by the monotone coupling.
PropReport prop_oplus_domination(long trials, Rng rng);

/// The mixing bound under enforced preconditions.
PropReport prop_mix_bound(long trials, Rng rng);

/// Systematic rounding: exhaustive outcome enumeration has exact marginals
/// and never exceeds the cardinality cap.
PropReport prop_dependent_rounding_exact(long trials, Rng rng);

/// Monte-Carlo marginal frequencies within 4 sigma.
PropReport prop_dependent_rounding_frequency(long draws, Rng rng);

std::vector<PropReport> run_all_props(long trials, std::uint64_t seed);

}  // namespace normclust
