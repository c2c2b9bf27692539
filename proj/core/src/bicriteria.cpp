#include "normclust/bicriteria.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "normclust/mnckc.hpp"

namespace normclust {

namespace {

Instance prune_over_budget(const Instance& inst, const Rat& L) {
    // facility-client edges above the budget become unusable
    Instance out = inst;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j) {
            const Dist& d = inst.fc_dist(i, j);
            if (d.finite && d.value > L) {
                out.space.at(i, inst.client_point(j)) = Dist::inf();
                out.space.at(inst.client_point(j), i) = Dist::inf();
            }
        }
    return out;
}

struct Candidate {
    Solution sol;
    Rat linf;
    Rat topcn;
};

}  // namespace

BiCriteriaResult run_bicriteria(const Instance& inst, const TopcnConfig& cfg, Rng& rng) {
    BiCriteriaResult out;
    if (!inst.linf_budget) {
        out.failure = "no linf budget on the instance";
        return out;
    }
    if (!inst.uncapacitated()) {
        out.failure = "capacities must be unbounded";
        return out;
    }
    const Rat L = *inst.linf_budget;
    const Rat ell = cfg.c * inst.n_clients;
    Instance run = inst;
    set_instance_norm(run, NormSpec::top(ell));

    auto evaluate = [&](std::vector<int> open) -> std::optional<Candidate> {
        std::sort(open.begin(), open.end());
        open.erase(std::unique(open.begin(), open.end()), open.end());
        Assignment assign(inst.n_clients, -1);
        for (int j = 0; j < inst.n_clients; ++j) {
            for (int i : open) {
                const Dist& d = inst.fc_dist(i, j);
                if (!d.finite) continue;
                if (assign[j] < 0 || d.value < inst.fc_dist(assign[j], j).value) assign[j] = i;
            }
            if (assign[j] < 0) return std::nullopt;
        }
        Candidate cand;
        cand.sol.feasible = true;
        cand.sol.open = std::move(open);
        cand.sol.assign = std::move(assign);
        CostVector costs = cost_vector(inst, cand.sol.assign);
        cand.linf = eval_norm(NormSpec::linf(), costs);
        cand.topcn = top_l(costs, ell);
        cand.sol.value = cand.topcn;
        return cand;
    };

    std::optional<Candidate> best;
    auto offer = [&](const std::optional<Candidate>& cand) {
        if (!cand) return;
        if (cand->linf > 3 * L) return;  // not certified, discard
        if (!best || cand->topcn < best->topcn) best = cand;
    };

    // L_inf seed: stars on the budget-pruned instance cover every client
    // within L by construction.
    Instance pruned = prune_over_budget(run, L);
    FractionalSolution linf_frac = solve_cp(pruned, L);
    if (!linf_frac.feasible) {
        out.failure = "instance infeasible at the linf budget";
        return out;
    }
    LpSeedConfig seed_cfg;
    seed_cfg.c_prime = cfg.c_prime;
    Rng linf_rng = rng.split("linf-seed");
    StarSet linf_stars = sample_stars_retrying(pruned, linf_frac, cfg.eps, seed_cfg, linf_rng);
    if (!linf_stars.covered) {
        out.failure = "linf star sampling failed to cover all clients";
        return out;
    }
    std::set<int> S_linf;
    for (const auto& star : linf_stars.stars) S_linf.insert(star.facility);

    long examined = 0, pruned_count = 0, feasible_count = 0, lp_count = 0;
    bool truncated = false;
    std::set<std::vector<std::pair<int, Rat>>> seen_guess;
    std::vector<int> all_f(inst.n_facilities);
    for (int i = 0; i < inst.n_facilities; ++i) all_f[i] = i;

    for (int rep = 0; rep < cfg.pipeline_repeats && !truncated; ++rep) {
        Rng rep_rng = rng.split("rep", rep);
        // top-cn seed on the full instance
        FractionalSolution frac = solve_cp_norm(run, NormSpec::top(ell));
        if (!frac.feasible) break;
        StarSet stars;
        for (int attempt = 0; attempt <= cfg.goodness_retries; ++attempt) {
            Rng srng = rep_rng.split("stars", attempt);
            StarSet cand = sample_stars_retrying(run, frac, cfg.eps, seed_cfg, srng);
            if (!cand.covered) continue;
            stars = cand;
            if (all_good(cand, frac, cfg.eps)) break;
        }
        if (!stars.covered) continue;
        std::set<int> sset = S_linf;
        for (const auto& star : stars.stars) sset.insert(star.facility);
        std::vector<int> S(sset.begin(), sset.end());

        // star-subset candidates (they are the whole path when c <= 1/e)
        {
            std::vector<int> subset;
            std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
                if (left == 0) {
                    offer(evaluate(subset));
                    return;
                }
                for (std::size_t s = from; s < S.size(); ++s) {
                    if (S.size() - s < static_cast<std::size_t>(left)) break;
                    subset.push_back(S[s]);
                    rec(s + 1, left - 1);
                    subset.pop_back();
                }
            };
            rec(0, std::min<int>(inst.k, static_cast<int>(S.size())));
        }
        if (routes_to_three_approx(cfg.c)) continue;

        Rng crng = rep_rng.split("R");
        std::vector<int> R_clients = choose_R(run, S, crng);
        std::vector<int> pool = S;
        for (int j : R_clients) pool.push_back(run.client_point(j));
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.empty()) continue;

        // radius options capped at the budget
        std::vector<Rat> grid_all = radius_grid(run, cfg.eps);
        std::vector<Rat> grid;
        for (const auto& r : grid_all)
            if (r <= L) grid.push_back(r);
        std::map<int, std::vector<Rat>> radius_options;
        for (int p : pool) {
            std::vector<Rat> opts;
            std::size_t last = 0;
            for (const auto& r : grid) {
                std::size_t size = ball(run.space, all_f, p, r).size();
                if (size != last && size > 0) {
                    opts.push_back(r);
                    last = size;
                }
            }
            radius_options[p] = std::move(opts);
        }

        std::vector<int> chosen(inst.k, 0);
        std::function<void(int, int)> enum_pivots = [&](int pos, int from) {
            if (truncated) return;
            if (pos < inst.k) {
                for (int s = from; s < static_cast<int>(pool.size()); ++s) {
                    chosen[pos] = s;
                    enum_pivots(pos + 1, s);
                    if (truncated) return;
                }
                return;
            }
            std::vector<const std::vector<Rat>*> opts(inst.k);
            for (int p = 0; p < inst.k; ++p) {
                opts[p] = &radius_options[pool[chosen[p]]];
                if (opts[p]->empty()) return;
            }
            std::vector<std::size_t> ridx(inst.k, 0);
            for (;;) {
                ++examined;
                PivotGuess guess;
                for (int p = 0; p < inst.k; ++p) {
                    guess.pivots.push_back(pool[chosen[p]]);
                    guess.radii.push_back((*opts[p])[ridx[p]]);
                }
                std::vector<std::pair<int, Rat>> key;
                for (int p = 0; p < inst.k; ++p) key.push_back({guess.pivots[p], guess.radii[p]});
                std::sort(key.begin(), key.end());
                if (seen_guess.insert(key).second) {
                    if (++lp_count > cfg.guess_budget) {
                        truncated = true;
                        return;
                    }
                    std::optional<Rat> cap;
                    if (best) cap = best->topcn;
                    PivotLpSolution lp = solve_pivot_lp(run, guess, cfg.c, cfg.eps, cap);
                    if (lp.feasible) {
                        ++feasible_count;
                        Rng rrng = rep_rng.split("round", examined);
                        for (int round = 0; round < cfg.rounds_per_guess; ++round) {
                            std::vector<int> open;
                            for (std::size_t p = 0; p < lp.balls.size(); ++p) {
                                std::size_t pick = rrng.next_weighted(lp.y[p], Rat(1));
                                open.push_back(lp.balls[p][pick]);
                            }
                            offer(evaluate(open));
                        }
                    } else {
                        ++pruned_count;
                    }
                }
                int p2 = 0;
                for (; p2 < inst.k; ++p2) {
                    if (++ridx[p2] < opts[p2]->size()) break;
                    ridx[p2] = 0;
                }
                if (p2 == inst.k) break;
            }
        };
        enum_pivots(0, 0);
    }

    if (!best) {
        out.failure = "no certified solution within budget";
        return out;
    }
    out.found = true;
    out.solution = best->sol;
    out.linf_value = best->linf;
    out.topcn_value = best->topcn;
    out.linf_ratio = L > 0 ? best->linf / L : Rat(0);
    out.certified = best->linf <= 3 * L;
    out.solution.record.algorithm = "bicriteria";
    out.solution.record.instance_hash = instance_hash(inst);
    out.solution.record.guesses_examined = examined;
    out.solution.record.guesses_pruned = pruned_count;
    out.solution.record.guesses_feasible = feasible_count;
    out.solution.record.truncated = truncated;
    out.solution.record.certified = out.certified;
    return out;
}

}  // namespace normclust
