#include "normclust/topcn.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "normclust/mnckc.hpp"
#include "normclust/simplex.hpp"

namespace normclust {

namespace {

// 1/e bracketed from below: kInvELower < 1/e.
const Rat kInvELower = rat_from_string("36787944117144232/100000000000000000");

Solution evaluate_open_set(const Instance& inst, std::vector<int> open, const Rat& ell) {
    Solution sol;
    std::sort(open.begin(), open.end());
    open.erase(std::unique(open.begin(), open.end()), open.end());
    Assignment assign(inst.n_clients, -1);
    for (int j = 0; j < inst.n_clients; ++j) {
        for (int i : open) {
            const Dist& d = inst.fc_dist(i, j);
            if (!d.finite) continue;
            if (assign[j] < 0 || d.value < inst.fc_dist(assign[j], j).value) assign[j] = i;
        }
        if (assign[j] < 0) return sol;
    }
    sol.feasible = true;
    sol.open = std::move(open);
    sol.assign = std::move(assign);
    sol.value = top_l(cost_vector(inst, sol.assign), ell);
    return sol;
}

}  // namespace

bool routes_to_three_approx(const Rat& c) { return c <= kInvELower; }

std::vector<int> choose_R(const Instance& inst, const std::vector<int>& S, Rng& rng) {
    std::vector<Rat> weights(inst.n_clients, Rat(0));
    Rat total = 0;
    for (int j = 0; j < inst.n_clients; ++j) {
        bool finite = false;
        Rat best = 0;
        for (int i : S) {
            const Dist& d = inst.fc_dist(i, j);
            if (!d.finite) continue;
            if (!finite || d.value < best) best = d.value;
            finite = true;
        }
        if (!finite) throw std::invalid_argument("choose_R: client unreachable from S");
        weights[j] = best;
        total += best;
    }
    std::vector<int> out;
    if (total == 0) return out;  // every client already at distance zero
    std::set<int> seen;
    for (int draw = 0; draw < inst.k; ++draw)
        seen.insert(static_cast<int>(rng.next_weighted(weights, total)));
    out.assign(seen.begin(), seen.end());
    return out;
}

PivotLpSolution solve_pivot_lp(const Instance& inst, const PivotGuess& guess, const Rat& c,
                               const Rat& eps, const std::optional<Rat>& value_cap) {
    PivotLpSolution sol;
    sol.guess = guess;
    sol.ell = c * inst.n_clients;
    const int k = static_cast<int>(guess.pivots.size());
    const int nc = inst.n_clients;

    std::vector<int> all_f(inst.n_facilities);
    for (int i = 0; i < inst.n_facilities; ++i) all_f[i] = i;
    sol.balls.resize(k);
    for (int p = 0; p < k; ++p) {
        sol.balls[p] = ball(inst.space, all_f, guess.pivots[p], guess.radii[p]);
        if (sol.balls[p].empty()) return sol;  // infeasible guess
    }

    // variables: y^(p)_i then x^(p)_i_j
    std::vector<std::vector<int>> yvar(k);
    std::vector<std::vector<std::vector<int>>> xvar(k);
    int nv = 0;
    for (int p = 0; p < k; ++p) {
        yvar[p].resize(sol.balls[p].size());
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b) yvar[p][b] = nv++;
    }
    for (int p = 0; p < k; ++p) {
        xvar[p].assign(sol.balls[p].size(), std::vector<int>(nc, -1));
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
            for (int j = 0; j < nc; ++j)
                if (inst.fc_dist(sol.balls[p][b], j).finite) xvar[p][b][j] = nv++;
    }

    std::vector<LpRow> rows;
    for (int p = 0; p < k; ++p) {  // open one facility per ball
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = 1;
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
            row.coeffs.push_back({yvar[p][b], Rat(1)});
        rows.push_back(std::move(row));
    }
    for (int p = 0; p < k; ++p)  // connect only to open copies
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
            for (int j = 0; j < nc; ++j)
                if (xvar[p][b][j] >= 0) {
                    LpRow row;
                    row.rel = Rel::Le;
                    row.rhs = 0;
                    row.coeffs = {{xvar[p][b][j], Rat(1)}, {yvar[p][b], Rat(-1)}};
                    rows.push_back(std::move(row));
                }
    for (int j = 0; j < nc; ++j) {  // full fractional coverage
        LpRow row;
        row.rel = Rel::Eq;
        row.rhs = 1;
        for (int p = 0; p < k; ++p)
            for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
                if (xvar[p][b][j] >= 0) row.coeffs.push_back({xvar[p][b][j], Rat(1)});
        rows.push_back(std::move(row));
    }
    // radius tying: (1+eps)/(1-eps) sum_j d(i,j) x >= r_p sum_j x per (p, i),
    // written in <= form so the slack basis starts feasible
    const Rat tie = (1 + eps) / (1 - eps);
    for (int p = 0; p < k; ++p)
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b) {
            LpRow row;
            row.rel = Rel::Le;
            row.rhs = 0;
            for (int j = 0; j < nc; ++j)
                if (xvar[p][b][j] >= 0)
                    row.coeffs.push_back(
                        {xvar[p][b][j],
                         guess.radii[p] - tie * inst.fc_dist(sol.balls[p][b], j).value});
            rows.push_back(std::move(row));
        }

    // threshold grid; coarsened to (1+eps) powers when it grows large
    std::set<Rat> tset{Rat(0)};
    if (sol.ell < nc) {  // at ell = n the zero threshold is already optimal
        for (int p = 0; p < k; ++p)
            for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
                for (int j = 0; j < nc; ++j)
                    if (xvar[p][b][j] >= 0) tset.insert(inst.fc_dist(sol.balls[p][b], j).value);
    }
    std::vector<Rat> thresholds(tset.begin(), tset.end());
    if (thresholds.size() > 64) {
        std::set<Rat> coarse{Rat(0)};
        Rat dmax = *tset.rbegin();
        Rat dmin = 0;
        for (const auto& v : tset)
            if (v > 0) {
                dmin = v;
                break;
            }
        if (dmin > 0)
            for (Rat p = dmin; p < dmax * (1 + eps); p *= (1 + eps)) coarse.insert(p);
        thresholds.assign(coarse.begin(), coarse.end());
    }
    if (value_cap) {  // ell * t alone already exceeds the cap
        std::vector<Rat> kept;
        for (const auto& t : thresholds)
            if (!(sol.ell * t >= *value_cap)) kept.push_back(t);
        thresholds = std::move(kept);
        if (thresholds.empty()) return sol;
    }

    SimplexSolver solver(nv, rows);
    bool first = true;
    for (const auto& t : thresholds) {
        std::vector<Rat> obj(nv, Rat(0));
        for (int p = 0; p < k; ++p)
            for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
                for (int j = 0; j < nc; ++j)
                    if (xvar[p][b][j] >= 0) {
                        const Rat& d = inst.fc_dist(sol.balls[p][b], j).value;
                        if (d > t) obj[xvar[p][b][j]] = d - t;
                    }
        LpResult res = first ? solver.solve(obj) : solver.resolve(obj);
        if (res.status != LpStatus::Optimal) return sol;
        first = false;
        Rat value = res.value + sol.ell * t;
        if (!sol.feasible || value < sol.value) {
            sol.feasible = true;
            sol.value = value;
            sol.t = t;
            sol.y.assign(k, {});
            sol.x.assign(k, {});
            for (int p = 0; p < k; ++p) {
                sol.y[p].resize(sol.balls[p].size());
                sol.x[p].assign(sol.balls[p].size(), std::vector<Rat>(nc, Rat(0)));
                for (std::size_t b = 0; b < sol.balls[p].size(); ++b) {
                    sol.y[p][b] = res.x[yvar[p][b]];
                    for (int j = 0; j < nc; ++j)
                        if (xvar[p][b][j] >= 0) sol.x[p][b][j] = res.x[xvar[p][b][j]];
                }
            }
        }
    }
    if (sol.feasible) {
        sol.delta = OccurrenceVector();
        for (int p = 0; p < k; ++p)
            for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
                for (int j = 0; j < nc; ++j)
                    if (sol.x[p][b][j] != 0)
                        sol.delta.add(inst.fc_dist(sol.balls[p][b], j).value, sol.x[p][b][j]);
    }
    return sol;
}

Solution round_pivot_lp(const Instance& inst, const PivotLpSolution& sol, Rng& rng) {
    if (!sol.feasible) throw std::invalid_argument("round_pivot_lp: infeasible program");
    std::vector<int> open;
    for (std::size_t p = 0; p < sol.balls.size(); ++p) {
        std::size_t pick = rng.next_weighted(sol.y[p], Rat(1));
        open.push_back(sol.balls[p][pick]);
    }
    return evaluate_open_set(inst, open, sol.ell);
}

OccurrenceVector radius_collapse(const PivotLpSolution& sol) {
    OccurrenceVector out;
    for (std::size_t p = 0; p < sol.balls.size(); ++p) {
        Rat floored(rat_floor(sol.guess.radii[p]));
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b) {
            Rat mass = 0;
            for (const auto& v : sol.x[p][b]) mass += v;
            if (mass > 0) out.add(floored, mass);
        }
    }
    return out;
}

OccurrenceVector coupling_expected_occurrence(const Instance& inst, const PivotLpSolution& sol,
                                              const Rat& direct_prob) {
    OccurrenceVector out;
    const Rat indirect = 1 - direct_prob;
    for (std::size_t p = 0; p < sol.balls.size(); ++p) {
        Rat shift = 2 * Rat(rat_floor(sol.guess.radii[p]));
        for (std::size_t b = 0; b < sol.balls[p].size(); ++b)
            for (std::size_t j = 0; j < sol.x[p][b].size(); ++j) {
                const Rat& mass = sol.x[p][b][j];
                if (mass == 0) continue;
                const Rat& d = inst.fc_dist(sol.balls[p][b], static_cast<int>(j)).value;
                out.add(d, direct_prob * mass);
                out.add(d + shift, indirect * mass);
            }
    }
    return out;
}

std::vector<int> classify_clusters_testonly(const Instance& inst,
                                            const std::vector<int>& opt_open,
                                            const Assignment& opt_assign,
                                            const std::vector<int>& S, const Rat& eps) {
    Rat s_l1 = 0;
    std::vector<Rat> d_to_S(inst.n_clients);
    for (int j = 0; j < inst.n_clients; ++j) {
        bool finite = false;
        Rat best = 0;
        for (int i : S) {
            const Dist& d = inst.fc_dist(i, j);
            if (!d.finite) continue;
            if (!finite || d.value < best) best = d.value;
            finite = true;
        }
        if (!finite) throw std::invalid_argument("classify_clusters: client unreachable from S");
        d_to_S[j] = best;
        s_l1 += best;
    }
    const Rat t1 = eps * eps * eps / inst.k * s_l1;
    const Rat t2 = eps * eps / inst.k * s_l1;

    std::vector<int> types;
    for (int i : opt_open) {
        std::vector<int> J;
        for (int j = 0; j < inst.n_clients; ++j)
            if (opt_assign[j] == i) J.push_back(j);
        if (J.empty()) {
            types.push_back(3);
            continue;
        }
        std::stable_sort(J.begin(), J.end(), [&](int a, int b) {
            return inst.fc_dist(i, a).value < inst.fc_dist(i, b).value;
        });
        auto core_size = static_cast<std::size_t>(
            rat_ceil(eps * Rat(static_cast<long>(J.size()))).get_si());
        core_size = std::min(std::max<std::size_t>(core_size, 1), J.size());
        Rat core_in_S = 0, core_to_center = 0;
        for (std::size_t s = 0; s < core_size; ++s) {
            core_in_S += d_to_S[J[s]];
            core_to_center += inst.fc_dist(i, J[s]).value;
        }
        if (core_in_S >= t1)
            types.push_back(1);
        else if (core_to_center >= t2)
            types.push_back(2);
        else
            types.push_back(3);
    }
    return types;
}

Solution run_topcn(const Instance& inst, const TopcnConfig& cfg, Rng& rng) {
    if (!(cfg.c > 0 && cfg.c <= 1))
        throw std::invalid_argument("run_topcn: c must be in (0, 1]");
    if (!inst.uncapacitated())
        throw std::invalid_argument("run_topcn: capacities must be unbounded");
    const Rat ell = cfg.c * inst.n_clients;
    Instance run = inst;
    set_instance_norm(run, NormSpec::top(ell));

    if (routes_to_three_approx(cfg.c)) {
        LpSeedConfig seed_cfg;
        seed_cfg.c_prime = cfg.c_prime;
        Rng sub = rng.split("three-approx");
        Solution out = simple_three_approx(run, cfg.eps, sub, seed_cfg);
        out.value = out.feasible ? top_l(cost_vector(inst, out.assign), ell) : Rat(0);
        out.record.algorithm = "topcn";
        out.record.instance_hash = instance_hash(inst);
        return out;
    }

    Solution incumbent;
    long lp_count = 0;
    bool truncated = false;
    long examined = 0, pruned = 0, feasible_count = 0;
    std::vector<int> all_f(run.n_facilities);
    for (int i = 0; i < run.n_facilities; ++i) all_f[i] = i;
    // identical (pivot, radius) guesses across repeats solve the same program
    std::set<std::vector<std::pair<int, Rat>>> seen_guess;

    auto offer = [&](const Solution& cand) {
        if (cand.feasible && (!incumbent.feasible || cand.value < incumbent.value))
            incumbent = cand;
    };

    for (int rep = 0; rep < cfg.pipeline_repeats && !truncated; ++rep) {
        Rng rep_rng = rng.split("rep", rep);
        FractionalSolution frac = solve_cp_norm(run, NormSpec::top(ell));
        if (!frac.feasible) break;
        LpSeedConfig seed_cfg;
        seed_cfg.c_prime = cfg.c_prime;
        StarSet stars;
        for (int attempt = 0; attempt <= cfg.goodness_retries; ++attempt) {
            Rng srng = rep_rng.split("stars", attempt);
            StarSet cand = sample_stars_retrying(run, frac, cfg.eps, seed_cfg, srng);
            if (!cand.covered) continue;
            stars = cand;
            if (all_good(cand, frac, cfg.eps)) break;
        }
        if (!stars.covered) continue;
        std::set<int> sset;
        for (const auto& star : stars.stars) sset.insert(star.facility);
        std::vector<int> S(sset.begin(), sset.end());

        // star-subset candidates; they also seed the incumbent for pruning
        {
            std::vector<int> subset;
            std::function<void(std::size_t, int)> rec = [&](std::size_t from, int left) {
                if (left == 0) {
                    offer(evaluate_open_set(inst, subset, ell));
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

        Rng crng = rep_rng.split("R");
        std::vector<int> R_clients = choose_R(run, S, crng);
        std::vector<int> pool = S;
        for (int j : R_clients) pool.push_back(run.client_point(j));
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        if (pool.empty()) continue;

        // ball-changing radius options per pool point
        std::vector<Rat> grid = radius_grid(run, cfg.eps);
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
            // all pivots picked; sweep radius combinations
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
                    std::vector<std::vector<int>> balls(inst.k);
                    for (int p = 0; p < inst.k; ++p)
                        balls[p] = ball(run.space, all_f, guess.pivots[p], guess.radii[p]);
                    // reachability and a lower bound before the LP
                    CostVector lb(run.n_clients, Rat(0));
                    bool reachable = true;
                    for (int j = 0; j < run.n_clients && reachable; ++j) {
                        bool found = false;
                        Rat best = 0;
                        for (int p = 0; p < inst.k; ++p)
                            for (int i : balls[p]) {
                                const Dist& d = run.fc_dist(i, j);
                                if (!d.finite) continue;
                                if (!found || d.value < best) best = d.value;
                                found = true;
                            }
                        if (!found)
                            reachable = false;
                        else
                            lb[j] = best;
                    }
                    if (!reachable || (incumbent.feasible && top_l(lb, ell) >= incumbent.value)) {
                        ++pruned;
                    } else if (++lp_count > cfg.guess_budget) {
                        truncated = true;
                        return;
                    } else {
                        std::optional<Rat> cap;
                        if (incumbent.feasible) cap = incumbent.value;
                        PivotLpSolution lp = solve_pivot_lp(run, guess, cfg.c, cfg.eps, cap);
                        if (lp.feasible) {
                            ++feasible_count;
                            Rng rrng = rep_rng.split("round", examined);
                            for (int round = 0; round < cfg.rounds_per_guess; ++round)
                                offer(round_pivot_lp(inst, lp, rrng));
                        }
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

    if (!incumbent.feasible && incumbent.infeasible_reason.empty())
        incumbent.infeasible_reason = "no reachable pivot guess";
    incumbent.record.algorithm = "topcn";
    incumbent.record.instance_hash = instance_hash(inst);
    incumbent.record.guesses_examined = examined;
    incumbent.record.guesses_pruned = pruned;
    incumbent.record.guesses_feasible = feasible_count;
    incumbent.record.truncated = truncated;
    return incumbent;
}

}  // namespace normclust
