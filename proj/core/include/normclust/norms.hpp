#pragma once

#include <string>
#include <vector>

#include "normclust/rational.hpp"

namespace normclust {

struct Instance;

/// Which monotone symmetric norm to optimize.
struct NormSpec {
    enum Kind { LInf = 0, L1 = 1, Lp = 2, TopL = 3, Ordered = 4 };
    Kind kind = L1;
    int p = 2;                 // Lp, integer p >= 1
    Rat ell = 1;               // TopL, real ell in [0, n]
    std::vector<Rat> weights;  // Ordered, nonincreasing nonnegative

    static NormSpec linf() { return NormSpec{LInf, 2, 1, {}}; }
    static NormSpec l1() { return NormSpec{L1, 2, 1, {}}; }
    static NormSpec lp(int p);
    static NormSpec top(Rat ell);
    static NormSpec ordered(std::vector<Rat> w);

    std::string describe() const;
    bool operator==(const NormSpec&) const = default;
};

NormSpec norm_of_instance(const Instance& inst);
void set_instance_norm(Instance& inst, const NormSpec& spec);
NormSpec norm_spec_from_string(const std::string& text);  // "linf", "topl:2", "lp:3", "ordered:3,1,0"

using CostVector = std::vector<Rat>;

/// Exact norm value. For Lp the returned rational is the p-th power sum;
/// use lp_root for the real root.
Rat eval_norm(const NormSpec& spec, const CostVector& v);
double lp_root(const Rat& power_sum, int p);

/// Sum of the floor(ell) largest entries plus the fractional remainder of the
/// next one.
Rat top_l(const CostVector& v, const Rat& ell);

/// sum_j (v_j - t)^+ + ell*t. Minimizing over t in the entries of v (and 0)
/// recovers top_l exactly.
Rat top_l_via_threshold(const CostVector& v, const Rat& ell, const Rat& t);

Rat ordered_norm(const std::vector<Rat>& weights, const CostVector& v);

}  // namespace normclust
