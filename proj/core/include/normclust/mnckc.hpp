#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "normclust/lp_seed.hpp"
#include "normclust/metric.hpp"
#include "normclust/norms.hpp"
#include "normclust/oracle.hpp"
#include "normclust/rng.hpp"
#include "normclust/solution.hpp"

namespace normclust {

struct MnckcConfig {
    Rat eps = Rat(1, 5);
    double c_prime = 4.0;    // star iteration constant (lp_seed)
    double c_double = 4.0;   // weighted representative sampling constant
    long color_budget = -1;  // -1: exhaustive when k^|F| small, else ceil(k^k ln n) random
    long guess_budget = 5'000'000;  // outcome combinations per sweep
    int goodness_retries = 8;
    OracleConfig oracle;
};

/// Threshold candidates. Top-l norms guess the single threshold among all
/// distinct facility-client distances; general norms take the whole
/// (1+eps)-power grid at once.
std::vector<Rat> build_threshold_set(const Instance& inst, const Rat& eps);

/// Representatives for one threshold: per-star uniform samples plus clients
/// drawn with probability proportional to ((1-eps) b_j - t)^+.
std::vector<int> choose_R_t(const Instance& inst, const StarSet& stars, const Rat& t,
                            const Rat& eps, double c_double, Rng& rng);

/// One guess of the FPT search: a facility coloring, a type per color,
/// pivots / already-open facilities, and radii.
struct GuessMNC {
    std::vector<int> color;      // facility -> [0, k)
    std::vector<int> type;      // per color: 1, 2 or 3
    std::vector<int> pivot;     // per color: point id (client for type-1, facility for type-2), -1 for type-3
    std::vector<int> opened;    // per color: facility id for type-3, else -1
    std::vector<Rat> radius;    // per color: 0 or a grid power, unused for type-3
};

/// Lazily enumerates the raw guess space for a fixed coloring in a
/// deterministic order; used by the tests that count the stream.
class GuessStream {
public:
    GuessStream(const Instance& inst, std::vector<int> coloring, std::vector<int> S,
                std::vector<int> R, std::vector<Rat> radius_grid);
    std::optional<GuessMNC> next();
    long yielded() const { return yielded_; }

private:
    void advance();
    bool valid_current() const;
    const Instance& inst_;
    std::vector<int> coloring_, S_, R_;
    std::vector<Rat> grid_;  // includes 0
    int k_;
    std::vector<int> type_idx_;    // per color 0..2
    std::vector<int> choice_idx_;  // per color pivot/open index
    std::vector<int> radius_idx_;  // per color radius index
    bool done_ = false;
    long yielded_ = 0;
};

/// Radius grid {0} union powers of (1+eps) spanning the positive distances
/// of the instance (one step above the max is kept so every round-up exists).
std::vector<Rat> radius_grid(const Instance& inst, const Rat& eps);

/// All colorings facility -> [0,k) up to renaming of the colors
/// (restricted growth strings).
std::vector<std::vector<int>> canonical_colorings(int n_facilities, int k);

/// Builds the open set T for a guess exactly per the clustering rules:
/// type-1 opens the max-capacity same-color facility in ball_{F \ S}(p, r);
/// type-3 opens the guessed facility; type-2 opens the pivot unless it
/// collides with a type-3 facility, in which case it falls back to the ball.
/// Returns nullopt when a required ball is empty.
std::optional<std::vector<int>> clustering_with_pivots(const GuessMNC& guess, const Instance& inst,
                                                       const std::vector<int>& S);

/// Best capacity-respecting assignment for a fixed open set: exact flows for
/// top-l / l1 / linf / lp, assignment-finder delegation for ordered norms on
/// larger client sets.
AssignResult best_assignment(const Instance& inst, const std::vector<int>& open,
                             const NormSpec& norm, const Rat& eps, const OracleConfig& cfg = {});

/// The full search: thresholds, per-threshold star seeding, merged facility
/// pool and representatives, guess sweep, exact incumbent.
Solution run_mnckc(const Instance& inst, const MnckcConfig& cfg, Rng& rng);

}  // namespace normclust
