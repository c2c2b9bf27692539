#include "normclust/mnckc.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "normclust/find_assignment.hpp"

namespace normclust {

namespace {

std::vector<Rat> distinct_fc_distances(const Instance& inst) {
    std::vector<Rat> vals;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j) {
            const Dist& d = inst.fc_dist(i, j);
            if (d.finite) vals.push_back(d.value);
        }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    return vals;
}

}  // namespace

std::vector<Rat> build_threshold_set(const Instance& inst, const Rat& eps) {
    const NormSpec norm = norm_of_instance(inst);
    std::vector<Rat> dists = distinct_fc_distances(inst);
    if (norm.kind == NormSpec::TopL || norm.kind == NormSpec::L1 || norm.kind == NormSpec::LInf)
        return dists;  // candidates for the single guessed threshold

    // General norms: round every distance up to a power of 1+eps.
    std::vector<Rat> out;
    for (const auto& d : dists) {
        if (d == 0) {
            out.push_back(d);
            continue;
        }
        Rat p = 1;
        while (p < d) p *= (1 + eps);
        while (p / (1 + eps) >= d) p /= (1 + eps);
        out.push_back(p);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::vector<int>> canonical_colorings(int n_facilities, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(n_facilities, 0);
    std::function<void(int, int)> rec = [&](int pos, int used) {
        if (pos == n_facilities) {
            out.push_back(cur);
            return;
        }
        for (int c = 0; c < std::min(used + 1, k); ++c) {
            cur[pos] = c;
            rec(pos + 1, std::max(used, c + 1));
        }
    };
    rec(0, 0);
    return out;
}

std::vector<Rat> radius_grid(const Instance& inst, const Rat& eps) {
    std::vector<Rat> grid{Rat(0)};
    Rat dmin = 0, dmax = 0;
    bool any = false;
    for (int a = 0; a < inst.total_points(); ++a)
        for (int b = a + 1; b < inst.total_points(); ++b) {
            const Dist& d = inst.space.at(a, b);
            if (!d.finite || d.value == 0) continue;
            if (!any || d.value < dmin) dmin = d.value;
            if (!any || d.value > dmax) dmax = d.value;
            any = true;
        }
    if (!any) return grid;
    // Powers of (1+eps) anchored at the smallest positive distance, one step
    // past the diameter so every round-up stays inside the grid.
    Rat p = dmin;
    while (p / (1 + eps) >= dmin) p /= (1 + eps);
    for (; p < dmax * (1 + eps); p *= (1 + eps)) grid.push_back(p);
    grid.push_back(p);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

std::vector<int> choose_R_t(const Instance& inst, const StarSet& stars, const Rat& t,
                            const Rat& eps, double c_double, Rng& rng) {
    std::set<int> out;
    const double n = std::max(2, inst.n_clients);
    const double kk = std::max(2, inst.k);
    const long m1 = static_cast<long>(std::ceil(2.0 * inst.k / rat_to_double(eps) * std::log(kk * n)));

    Rng rng1 = rng.split("R1");
    for (const auto& star : stars.stars) {
        std::vector<int> pool = star.clients;
        long take = std::min<long>(static_cast<long>(pool.size()), m1);
        for (long s = 0; s < take; ++s) {
            std::size_t pick = s + rng1.next_below(pool.size() - s);
            std::swap(pool[s], pool[pick]);
            out.insert(pool[s]);
        }
    }

    std::vector<Rat> weights(inst.n_clients, Rat(0));
    Rat total = 0;
    for (int j = 0; j < inst.n_clients; ++j) {
        if (stars.star_of[j] < 0) continue;
        Rat w = (1 - eps) * stars.b[j] - t;
        if (w > 0) {
            weights[j] = w;
            total += w;
        }
    }
    if (total > 0) {
        const long m2 = static_cast<long>(
            std::ceil(c_double * inst.k * std::log(n) / rat_to_double(eps * eps)));
        Rng rng2 = rng.split("R2");
        for (long s = 0; s < m2; ++s)
            out.insert(static_cast<int>(rng2.next_weighted(weights, total)));
    }
    return {out.begin(), out.end()};
}

// --- raw guess stream (used by tests; the driver sweeps an equivalent
// collapsed space) ---

GuessStream::GuessStream(const Instance& inst, std::vector<int> coloring, std::vector<int> S,
                         std::vector<int> R, std::vector<Rat> radius_grid)
    : inst_(inst),
      coloring_(std::move(coloring)),
      S_(std::move(S)),
      R_(std::move(R)),
      grid_(std::move(radius_grid)),
      k_(inst.k) {
    type_idx_.assign(k_, 0);
    choice_idx_.assign(k_, 0);
    radius_idx_.assign(k_, 0);
    if (grid_.empty()) grid_.push_back(Rat(0));
    if (!valid_current()) advance();
}

bool GuessStream::valid_current() const {
    for (int c = 0; c < k_; ++c) {
        int type = type_idx_[c] + 1;
        if (type == 1) {
            if (choice_idx_[c] >= static_cast<int>(R_.size())) return false;
        } else if (type == 2) {
            if (choice_idx_[c] >= static_cast<int>(S_.size())) return false;
        } else {
            // type-3 requires a same-color facility in S, radius unused
            int count = 0, want = choice_idx_[c], found = -1;
            for (int f : S_)
                if (coloring_[f] == c && count++ == want) found = f;
            if (found < 0) return false;
            if (radius_idx_[c] != 0) return false;
        }
    }
    return true;
}

void GuessStream::advance() {
    // odometer over (radius, choice, type) per color, least significant first
    while (!done_) {
        int pos = 0;
        for (; pos < 3 * k_; ++pos) {
            int c = pos / 3, field = pos % 3;
            if (field == 0) {
                if (++radius_idx_[c] < static_cast<int>(grid_.size())) break;
                radius_idx_[c] = 0;
            } else if (field == 1) {
                int limit = type_idx_[c] + 1 == 1 ? static_cast<int>(R_.size())
                                                  : static_cast<int>(S_.size());
                if (++choice_idx_[c] < std::max(limit, 1)) break;
                choice_idx_[c] = 0;
            } else {
                if (++type_idx_[c] < 3) break;
                type_idx_[c] = 0;
            }
        }
        if (pos == 3 * k_) {
            done_ = true;
            return;
        }
        if (valid_current()) return;
    }
}

std::optional<GuessMNC> GuessStream::next() {
    if (done_) return std::nullopt;
    GuessMNC g;
    g.color = coloring_;
    g.type.assign(k_, 0);
    g.pivot.assign(k_, -1);
    g.opened.assign(k_, -1);
    g.radius.assign(k_, Rat(0));
    for (int c = 0; c < k_; ++c) {
        g.type[c] = type_idx_[c] + 1;
        if (g.type[c] == 1) {
            g.pivot[c] = R_[choice_idx_[c]];
            g.radius[c] = grid_[radius_idx_[c]];
        } else if (g.type[c] == 2) {
            g.pivot[c] = S_[choice_idx_[c]];
            g.radius[c] = grid_[radius_idx_[c]];
        } else {
            int count = 0;
            for (int f : S_)
                if (coloring_[f] == c && count++ == choice_idx_[c]) g.opened[c] = f;
        }
    }
    ++yielded_;
    advance();
    return g;
}

std::optional<std::vector<int>> clustering_with_pivots(const GuessMNC& guess, const Instance& inst,
                                                       const std::vector<int>& S) {
    std::vector<bool> in_S(inst.n_facilities, false);
    for (int f : S) in_S[f] = true;
    auto ball_argmax = [&](int center, const Rat& radius, int color) -> int {
        int best = -1;
        for (int f = 0; f < inst.n_facilities; ++f) {
            if (in_S[f] || guess.color[f] != color) continue;
            const Dist& d = inst.space.at(f, center);
            if (!d.finite || d.value > radius) continue;
            if (best < 0 || inst.capacities[f] > inst.capacities[best]) best = f;
        }
        return best;
    };

    std::set<int> T;
    const int k = inst.k;
    std::vector<bool> type3_open(inst.n_facilities, false);
    for (int c = 0; c < k; ++c)
        if (guess.type[c] == 3) {
            if (guess.opened[c] < 0) return std::nullopt;
            T.insert(guess.opened[c]);
            type3_open[guess.opened[c]] = true;
        }
    for (int c = 0; c < k; ++c)
        if (guess.type[c] == 1) {
            int q = ball_argmax(guess.pivot[c], guess.radius[c], c);
            if (q < 0) return std::nullopt;
            T.insert(q);
        }
    for (int c = 0; c < k; ++c)
        if (guess.type[c] == 2) {
            int p = guess.pivot[c];
            if (!type3_open[p]) {
                T.insert(p);
            } else {
                int g = ball_argmax(p, guess.radius[c], c);
                if (g < 0) return std::nullopt;
                T.insert(g);
            }
        }
    return std::vector<int>(T.begin(), T.end());
}

AssignResult best_assignment(const Instance& inst, const std::vector<int>& open,
                             const NormSpec& norm, const Rat& eps, const OracleConfig& cfg) {
    if (norm.kind == NormSpec::Ordered && inst.n_clients > cfg.ordered_enum_cap)
        return find_assignment(inst, open, eps);
    return optimal_assignment(inst, open, norm, std::nullopt, cfg);
}

// ---------------------------------------------------------------------------
// The guess sweep. Per coloring and type vector, each color has a small set
// of reachable outcomes (facility opened for it). The sweep enumerates
// products of those outcomes; distinct open sets are evaluated once.
// ---------------------------------------------------------------------------

namespace {

struct SweepStats {
    long examined = 0;
    long pruned = 0;
    long feasible = 0;
    bool truncated = false;
};

struct Incumbent {
    Solution best;

    void offer(const Instance& eval_inst, const std::vector<int>& open, const NormSpec& norm,
               const Rat& eps, const OracleConfig& cfg, SweepStats& stats) {
        AssignResult ar = best_assignment(eval_inst, open, norm, eps, cfg);
        if (ar.status != AssignStatus::Ok) return;
        // every candidate must cover all clients within the capacities
        std::vector<int> load(eval_inst.n_facilities, 0);
        for (int j = 0; j < eval_inst.n_clients; ++j) {
            int i = ar.assign[j];
            if (i < 0 || std::find(open.begin(), open.end(), i) == open.end())
                throw std::logic_error("mnckc: candidate assignment left the open set");
            if (++load[i] > eval_inst.capacities[i])
                throw std::logic_error("mnckc: candidate assignment breaks a capacity");
        }
        ++stats.feasible;
        if (!best.feasible || ar.value < best.value) {
            best.feasible = true;
            best.open = open;
            best.assign = ar.assign;
            best.value = ar.value;
        }
    }
};

// Sorted facilities of F \ S by distance from a center, with the ball-change
// radii from the grid (smallest grid radius reaching each distinct ball).
struct BallSchedule {
    std::vector<int> members;            // facilities ordered by distance
    std::vector<std::pair<int, Rat>> steps;  // (prefix length, radius)
};

BallSchedule ball_schedule(const Instance& inst, int center, const std::vector<bool>& in_S,
                           const std::vector<Rat>& grid) {
    BallSchedule out;
    std::vector<std::pair<Rat, int>> by_dist;
    for (int f = 0; f < inst.n_facilities; ++f) {
        if (in_S[f]) continue;
        const Dist& d = inst.space.at(f, center);
        if (d.finite) by_dist.push_back({d.value, f});
    }
    std::sort(by_dist.begin(), by_dist.end());
    for (auto& [d, f] : by_dist) out.members.push_back(f);
    int last_len = -1;
    for (const auto& r : grid) {
        int len = 0;
        while (len < static_cast<int>(by_dist.size()) && by_dist[len].first <= r) ++len;
        if (len != last_len && len > 0) {
            out.steps.push_back({len, r});
            last_len = len;
        }
    }
    return out;
}

// Reachable opened facility per (center, ball step, color): argmax capacity.
int prefix_argmax(const Instance& inst, const BallSchedule& sched, int prefix, int color,
                  const std::vector<int>& coloring) {
    int best = -1;
    for (int idx = 0; idx < prefix; ++idx) {
        int f = sched.members[idx];
        if (coloring[f] != color) continue;
        if (best < 0 || inst.capacities[f] > inst.capacities[best]) best = f;
    }
    return best;
}

struct ColorOptions {
    std::vector<int> type1;                              // distinct openable facilities
    std::vector<std::pair<int, std::vector<int>>> type2; // (pivot p, collision fallbacks)
    std::vector<int> type3;                              // same-color facilities of S
};

void enumerate_colorings(int nf, int k, long budget, int n_points, Rng& rng,
                         std::vector<std::vector<int>>& out) {
    out.clear();
    double raw = std::pow(static_cast<double>(k), nf);
    if (k == 1 || raw <= 2048) {
        out = canonical_colorings(nf, k);
    } else {
        // random colorings, repeated till a separating one exists w.h.p.
        long count = static_cast<long>(
            std::ceil(std::pow(static_cast<double>(k), k) * std::log(std::max(2, n_points))));
        if (budget >= 0) count = std::min(count, budget);
        std::set<std::vector<int>> seen;
        Rng crng = rng.split("colorings");
        for (long s = 0; s < count; ++s) {
            std::vector<int> col(nf);
            for (int f = 0; f < nf; ++f) col[f] = static_cast<int>(crng.next_below(k));
            if (seen.insert(col).second) out.push_back(col);
        }
    }
}

void sweep_guesses(const Instance& run_inst, const Instance& eval_inst,
                   const std::vector<int>& S, const std::vector<int>& R, const MnckcConfig& cfg,
                   Rng& rng, Incumbent& inc, SweepStats& stats,
                   std::unordered_set<std::uint64_t>& seen_T) {
    const int k = run_inst.k;
    const NormSpec norm = norm_of_instance(eval_inst);
    std::vector<bool> in_S(run_inst.n_facilities, false);
    for (int f : S) in_S[f] = true;
    std::vector<Rat> grid = radius_grid(run_inst, cfg.eps);

    // Ball schedules for every possible center (representatives and S).
    std::map<int, BallSchedule> schedules;
    for (int p : R) schedules.emplace(p, ball_schedule(run_inst, p, in_S, grid));
    for (int p : S) schedules.emplace(p, ball_schedule(run_inst, p, in_S, grid));

    std::vector<std::vector<int>> colorings;
    enumerate_colorings(run_inst.n_facilities, k, cfg.color_budget, run_inst.total_points(), rng,
                        colorings);

    auto encode = [](const std::vector<int>& T) {
        std::uint64_t key = 0;
        for (int f : T) key |= 1ULL << f;
        return key;
    };

    for (const auto& coloring : colorings) {
        if (stats.truncated) return;
        // Per-color reachable outcomes.
        std::vector<ColorOptions> opts(k);
        for (int c = 0; c < k; ++c) {
            std::set<int> t1;
            for (int p : R)
                for (const auto& [len, r] : schedules.at(p).steps) {
                    int q = prefix_argmax(run_inst, schedules.at(p), len, c, coloring);
                    if (q >= 0) t1.insert(q);
                }
            opts[c].type1.assign(t1.begin(), t1.end());
            for (int p : S) {
                std::set<int> fb;
                for (const auto& [len, r] : schedules.at(p).steps) {
                    int q = prefix_argmax(run_inst, schedules.at(p), len, c, coloring);
                    if (q >= 0) fb.insert(q);
                }
                opts[c].type2.push_back({p, {fb.begin(), fb.end()}});
            }
            for (int f : S)
                if (coloring[f] == c) opts[c].type3.push_back(f);
        }

        std::vector<int> types(k, 1);
        for (;;) {
            // enumerate outcomes for this type vector; type-3 colors first so
            // type-2 collision handling sees the opened facilities
            std::vector<int> order3, order1, order2;
            bool possible = true;
            for (int c = 0; c < k; ++c) {
                if (types[c] == 3) {
                    if (opts[c].type3.empty()) possible = false;
                    order3.push_back(c);
                } else if (types[c] == 1) {
                    if (opts[c].type1.empty()) possible = false;
                    order1.push_back(c);
                } else {
                    if (opts[c].type2.empty()) possible = false;
                    order2.push_back(c);
                }
            }
            if (!possible) ++stats.pruned;
            if (possible) {
                std::vector<int> order = order3;
                order.insert(order.end(), order1.begin(), order1.end());
                order.insert(order.end(), order2.begin(), order2.end());
                std::vector<int> opened;
                std::vector<bool> type3_open(run_inst.n_facilities, false);

                std::function<void(std::size_t)> rec = [&](std::size_t pos) {
                    if (stats.truncated) return;
                    if (pos == order.size()) {
                        ++stats.examined;
                        if (stats.examined > cfg.guess_budget) {
                            stats.truncated = true;
                            return;
                        }
                        std::vector<int> T = opened;
                        std::sort(T.begin(), T.end());
                        T.erase(std::unique(T.begin(), T.end()), T.end());
                        if (seen_T.insert(encode(T)).second)
                            inc.offer(eval_inst, T, norm, cfg.eps, cfg.oracle, stats);
                        else
                            ++stats.pruned;
                        return;
                    }
                    int c = order[pos];
                    if (types[c] == 3) {
                        for (int f : opts[c].type3) {
                            opened.push_back(f);
                            type3_open[f] = true;
                            rec(pos + 1);
                            type3_open[f] = false;
                            opened.pop_back();
                        }
                    } else if (types[c] == 1) {
                        for (int q : opts[c].type1) {
                            opened.push_back(q);
                            rec(pos + 1);
                            opened.pop_back();
                        }
                    } else {
                        for (const auto& [p, fallbacks] : opts[c].type2) {
                            if (!type3_open[p]) {
                                opened.push_back(p);
                                rec(pos + 1);
                                opened.pop_back();
                            } else {
                                for (int g : fallbacks) {
                                    opened.push_back(g);
                                    rec(pos + 1);
                                    opened.pop_back();
                                }
                            }
                        }
                    }
                };
                rec(0);
            }
            // next type vector
            int c = 0;
            while (c < k && types[c] == 3) types[c++] = 1;
            if (c == k) break;
            ++types[c];
        }
    }
}

struct SeedOutcome {
    std::vector<int> S;
    std::vector<int> R;
};

// Solve the relaxation at threshold t and sample a certified star set
// (coverage retries always; goodness retries while the budget lasts).
std::optional<SeedOutcome> seed_at_threshold(const Instance& run_inst, const Rat& t,
                                             const MnckcConfig& cfg, Rng& rng) {
    FractionalSolution frac = solve_cp(run_inst, t);
    if (!frac.feasible) return std::nullopt;
    LpSeedConfig seed_cfg;
    seed_cfg.c_prime = cfg.c_prime;
    StarSet stars;
    bool good = false;
    for (int attempt = 0; attempt <= cfg.goodness_retries && !good; ++attempt) {
        Rng sub = rng.split("seed", attempt);
        StarSet candidate = sample_stars_retrying(run_inst, frac, cfg.eps, seed_cfg, sub);
        if (!candidate.covered) continue;
        if (attempt == 0 || !stars.covered) stars = candidate;
        if (all_good(candidate, frac, cfg.eps)) {
            stars = candidate;
            good = true;
        }
    }
    if (!stars.covered) return std::nullopt;
    SeedOutcome out;
    std::set<int> sset;
    for (const auto& star : stars.stars) sset.insert(star.facility);
    out.S.assign(sset.begin(), sset.end());
    Rng rrng = rng.split("repr");
    out.R = choose_R_t(run_inst, stars, t, cfg.eps, cfg.c_double, rrng);
    return out;
}

Instance scaled_for_center(const Instance& inst, const Rat& L) {
    // ceil(d / L) keeps the triangle inequality and turns the guessed optimum
    // into distance 1.
    Instance out = inst;
    for (auto& d : out.space.d)
        if (d.finite) d.value = Rat(rat_ceil(d.value / L));
    set_instance_norm(out, NormSpec::top(Rat(1)));
    return out;
}

std::vector<int> top_capacity_subset(const Instance& inst) {
    std::vector<int> ids(inst.n_facilities);
    for (int i = 0; i < inst.n_facilities; ++i) ids[i] = i;
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (inst.capacities[a] != inst.capacities[b])
            return inst.capacities[a] > inst.capacities[b];
        return a < b;
    });
    ids.resize(inst.k);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

Solution run_mnckc(const Instance& inst, const MnckcConfig& cfg, Rng& rng) {
    const NormSpec norm = norm_of_instance(inst);
    SweepStats stats;
    Incumbent inc;
    std::unordered_set<std::uint64_t> seen_T;

    // Cheap initial incumbent: the k largest capacities.
    inc.offer(inst, top_capacity_subset(inst), norm, cfg.eps, cfg.oracle, stats);

    auto merged_seed_sweep = [&](const Instance& run_inst, const std::vector<Rat>& thresholds,
                                 const std::string& label) {
        std::set<int> S_all;
        std::set<int> R_all;
        bool any = false;
        for (std::size_t idx = 0; idx < thresholds.size(); ++idx) {
            Rng trng = rng.split(label + "-t", idx);
            auto seeded = seed_at_threshold(run_inst, thresholds[idx], cfg, trng);
            if (!seeded) continue;
            any = true;
            S_all.insert(seeded->S.begin(), seeded->S.end());
            for (int j : seeded->R) R_all.insert(run_inst.client_point(j));
        }
        if (!any) return;
        std::vector<int> S(S_all.begin(), S_all.end());
        std::vector<int> R(R_all.begin(), R_all.end());
        Rng srng = rng.split(label + "-sweep");
        sweep_guesses(run_inst, inst, S, R, cfg, srng, inc, stats, seen_T);
    };

    if (norm.kind == NormSpec::LInf) {
        // Guess the optimum value L, scale so it becomes 1, and search with
        // the single threshold t = 1. Integer scaled values turn the
        // (3 + O(eps)) bound into an exact 3.
        std::vector<Rat> cands = distinct_fc_distances(inst);
        for (const auto& L : cands) {
            if (L == 0) {
                if (feasibility(inst, top_capacity_subset(inst), Rat(0)))
                    inc.offer(inst, top_capacity_subset(inst), norm, cfg.eps, cfg.oracle, stats);
                continue;
            }
            if (inc.best.feasible && L >= inc.best.value) break;  // true optimum <= incumbent
            std::vector<int> all(inst.n_facilities);
            for (int i = 0; i < inst.n_facilities; ++i) all[i] = i;
            if (!feasibility(inst, all, L)) continue;  // optimum exceeds L
            Instance scaled = scaled_for_center(inst, L);
            merged_seed_sweep(scaled, {Rat(1)}, "linf-L" + rat_to_string(L));
        }
    } else if (norm.kind == NormSpec::TopL || norm.kind == NormSpec::L1) {
        Rat ell = norm.kind == NormSpec::L1 ? Rat(inst.n_clients) : norm.ell;
        std::vector<Rat> cands = build_threshold_set(inst, cfg.eps);
        std::vector<Rat> selected;
        for (const auto& t : cands) {
            if (ell > 0 && inc.best.feasible && ell * t >= inc.best.value) {
                ++stats.pruned;
                continue;
            }
            selected.push_back(t);
        }
        merged_seed_sweep(inst, selected, "topl");
    } else {
        merged_seed_sweep(inst, build_threshold_set(inst, cfg.eps), "general");
    }

    Solution out = inc.best;
    if (!out.feasible && out.infeasible_reason.empty())
        out.infeasible_reason = "no capacity-respecting candidate found";
    out.record.algorithm = "mnckc";
    out.record.instance_hash = instance_hash(inst);
    out.record.guesses_examined = stats.examined;
    out.record.guesses_pruned = stats.pruned;
    out.record.guesses_feasible = stats.feasible;
    out.record.truncated = stats.truncated;
    return out;
}

}  // namespace normclust
