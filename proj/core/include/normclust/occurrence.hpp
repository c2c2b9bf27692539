#pragma once

#include <array>
#include <utility>
#include <vector>

#include "normclust/norms.hpp"
#include "normclust/rational.hpp"

namespace normclust {

/// Mass-per-distance representation of a cost multiset: a finite map
/// distance -> nonnegative mass. Total mass plays the role of the vector
/// dimension n and may be fractional.
///
/// Kept sorted by distance with strictly positive masses.
class OccurrenceVector {
public:
    OccurrenceVector() = default;
    static OccurrenceVector from_pairs(std::vector<std::pair<Rat, Rat>> pairs);
    static OccurrenceVector point_mass(const Rat& distance, const Rat& mass);

    void add(const Rat& distance, const Rat& mass);
    const std::vector<std::pair<Rat, Rat>>& pairs() const { return entries_; }
    Rat total_mass() const;
    bool empty() const { return entries_.empty(); }

    /// Multiplies every distance by a scalar (masses unchanged).
    OccurrenceVector scale_distances(const Rat& factor) const;

    friend OccurrenceVector operator+(const OccurrenceVector& a, const OccurrenceVector& b);
    OccurrenceVector operator*(const Rat& mass_factor) const;

    bool operator==(const OccurrenceVector&) const = default;

private:
    std::vector<std::pair<Rat, Rat>> entries_;  // ascending distance, mass > 0
};

OccurrenceVector occ_from_vector(const CostVector& v);
CostVector occ_expand_sorted(const OccurrenceVector& d);  // integral masses only

/// Greedy optimum of: maximize sum(distance * alpha) over 0 <= alpha <= masses
/// with |alpha|_1 = ell. Allocates mass to the largest distances first.
Rat occ_top_l(const OccurrenceVector& d, const Rat& ell);

/// Monotone (co-sorted) addition: masses of both vectors are coupled in
/// ascending distance order; coupled masses add their distances.
OccurrenceVector occ_oplus(const OccurrenceVector& a, const OccurrenceVector& b);

/// occ_oplus(d, d): doubles every distance, preserves masses.
OccurrenceVector occ_double(const OccurrenceVector& d);

/// A coupling z between two occurrence vectors: row marginals must equal the
/// first vector, column marginals the second.
struct Coupling {
    // (distance_a, distance_b, mass)
    std::vector<std::array<Rat, 3>> terms;
};

/// Result distance a+b with the coupled mass, for an arbitrary valid coupling.
/// Throws if the marginals do not match exactly.
OccurrenceVector occ_add_by_matching(const OccurrenceVector& a, const OccurrenceVector& b,
                                     const Coupling& z);

Coupling monotone_coupling(const OccurrenceVector& a, const OccurrenceVector& b);

/// True iff occ_top_l(dominated, ell) <= gamma * occ_top_l(dominating, ell)
/// for every real ell in [0, total mass]. Checked at the union of
/// cumulative-mass breakpoints of both vectors, which is complete because
/// occ_top_l is piecewise linear in ell with kinks exactly there.
bool dominates(const OccurrenceVector& dominated, const OccurrenceVector& dominating,
               const Rat& gamma);

struct MixBoundResult {
    Rat lhs;
    Rat rhs;
    bool holds;
};

/// Evaluates occ_top_l((1-alpha) d + alpha (d (+) d'x2), c*n) against
/// (1 + 2 alpha gamma / c) * occ_top_l(d, c*n). Requires c in (1/e, 1],
/// alpha in [0, c], and dominates(d', d, gamma).
MixBoundResult mix_bound_check(const OccurrenceVector& d, const OccurrenceVector& dprime,
                               const Rat& c, const Rat& alpha, const Rat& gamma);

std::string occ_to_json(const OccurrenceVector& d);
OccurrenceVector occ_from_json(const std::string& text);

}  // namespace normclust
