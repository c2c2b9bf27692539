#pragma once

#include <string>
#include <vector>

#include "normclust/metric.hpp"
#include "normclust/norms.hpp"
#include "normclust/rng.hpp"
#include "normclust/solution.hpp"

namespace normclust {

/// Fractional relaxation of capacitated k-clustering with the threshold
/// objective sum_j (d_av_j - t)^+, solved exactly.
struct FractionalSolution {
    bool feasible = false;
    std::vector<std::vector<Rat>> x;  // facility x client, 0 on unusable edges
    std::vector<Rat> y;               // per facility, in [0,1], sums to k
    std::vector<Rat> d_av;            // per client average connection distance
    Rat objective = 0;
    Rat t = 0;
};

FractionalSolution solve_cp(const Instance& inst, const Rat& t);

/// Same relaxation but minimizing the norm of d_av directly (the norm's
/// threshold form enters the LP as variables, not as an enumeration).
/// Supports LInf, L1, TopL and Ordered.
FractionalSolution solve_cp_norm(const Instance& inst, const NormSpec& norm);

/// Systematic (pivotal) sampling over a fixed order: selects index j iff the
/// unit grid shifted by u01 crosses the prefix-sum of the marginals at j.
/// Pr[j selected] equals marginals[j] exactly and the sample size is always
/// ceil(sum of marginals) or less.
std::vector<int> systematic_sample(const std::vector<Rat>& marginals, const Rat& u01);

/// Every possible outcome of systematic_sample with its exact probability
/// (the randomness space is piecewise constant in u01).
std::vector<std::pair<Rat, std::vector<int>>> systematic_sample_outcomes(
    const std::vector<Rat>& marginals);

/// One star rounding: J with Pr[j in J] = x_col[j] / y_i and |J| <= u_i.
std::vector<int> dependent_round_star(const std::vector<Rat>& x_col, const Rat& y_i, int u_i,
                                      Rng& rng);

struct Star {
    int facility = -1;
    std::vector<int> clients;
};

struct StarSet {
    bool covered = false;
    std::vector<Star> stars;       // pairwise disjoint client sets after dedupe
    std::vector<int> star_of;      // client -> index into stars, or -1
    std::vector<Rat> b;            // client -> distance to its star facility
    long iterations = 0;
    std::vector<int> uncovered;    // clients not covered (if any)
};

struct LpSeedConfig {
    double c_prime = 4.0;  // star-count constant; the analysis only asks for
                           // "sufficiently large"
    int max_retries = -1;  // -1: ceil(log2 n) + 3
};

long star_iteration_count(int k, int n_clients, const Rat& eps, double c_prime);

/// One sampling pass (no retries): star_iteration_count iterations of
/// (draw facility i w.p. y_i/k, round a star), then keep each multiply
/// covered client only in its closest star.
StarSet sample_stars(const Instance& inst, const FractionalSolution& frac, const Rat& eps,
                     const LpSeedConfig& cfg, Rng& rng);

/// Retries sample_stars with fresh randomness until full coverage.
StarSet sample_stars_retrying(const Instance& inst, const FractionalSolution& frac,
                              const Rat& eps, const LpSeedConfig& cfg, Rng& rng);

/// Client j is good iff its kept star satisfies d(i, j) <= d_av_j / (1-eps).
std::vector<bool> check_goodness(const StarSet& stars, const FractionalSolution& frac,
                                 const Rat& eps);

bool all_good(const StarSet& stars, const FractionalSolution& frac, const Rat& eps);

/// Exact certificate: sum_j ((1-eps) b_j - t)^+ <= CP objective at t. Holds
/// whenever every client is good.
bool threshold_certificate(const StarSet& stars, const FractionalSolution& frac, const Rat& eps);

/// Uncapacitated (3+eps)-approximation: sample a good star set for the
/// instance norm, then take the best k-subset of its facilities under
/// nearest-facility assignment.
Solution simple_three_approx(const Instance& inst, const Rat& eps, Rng& rng,
                             const LpSeedConfig& cfg = {});

std::string stars_to_json(const StarSet& s);
StarSet stars_from_json(const std::string& text, int n_clients);

}  // namespace normclust
