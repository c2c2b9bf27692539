// Acceptance suite: one pass/fail line per criterion. Exit code is the number
// of failed criteria. Run a single criterion with --criterion N.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "normclust/bicriteria.hpp"
#include "normclust/find_assignment.hpp"
#include "normclust/lp_seed.hpp"
#include "normclust/metric.hpp"
#include "normclust/mnckc.hpp"
#include "normclust/occurrence.hpp"
#include "normclust/oracle.hpp"
#include "normclust/props.hpp"
#include "normclust/solution.hpp"
#include "normclust/topcn.hpp"

using namespace normclust;

namespace {

struct Criterion {
    int id;
    std::string label;
    std::function<bool(std::ostringstream&)> run;
};

Instance random_instance(std::uint64_t seed, int max_f, int max_c, int max_k, bool capacitated,
                         NormSpec norm) {
    Rng rng(seed * 7919 + 13);
    GenParams p;
    p.kind = "random_metric";
    p.n_facilities = 4 + static_cast<int>(rng.next_below(max_f - 3));
    p.n_clients = 5 + static_cast<int>(rng.next_below(max_c - 4));
    p.k = 2 + static_cast<int>(rng.next_below(max_k - 1));
    p.k = std::min(p.k, p.n_facilities);
    if (capacitated) {
        p.cap_min = std::max(1, p.n_clients / p.k);
        p.cap_max = p.n_clients;
    }
    p.norm_kind = norm.kind;
    p.norm_p = norm.p;
    p.norm_ell = norm.ell;
    p.norm_weights = norm.weights;
    return generate_instance(p, seed);
}

double ratio_of(const Rat& value, const Rat& opt) {
    if (opt == 0) return value == 0 ? 1.0 : 1e18;
    return rat_to_double(value / opt);
}

// --- criterion 1: capacitated k-center, ratio <= 3 exactly -----------------
bool criterion_kcenter(std::ostringstream& log) {
    bool ok = true;
    double worst = 0;
    int truncated = 0, compared = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Instance inst = random_instance(seed, 8, 12, 3, true, NormSpec::linf());
        ExactResult oracle = exact_solve(inst);
        if (!oracle.feasible) continue;
        ++compared;
        auto t0 = std::chrono::steady_clock::now();
        MnckcConfig cfg;
        cfg.eps = Rat(1, 5);
        Rng rng(seed);
        Solution sol = run_mnckc(inst, cfg, rng);
        auto t1 = std::chrono::steady_clock::now();
        double secs = std::chrono::duration<double>(t1 - t0).count();
        if (secs > 60.0) {
            log << " seed " << seed << " took " << secs << "s;";
            ok = false;
        }
        if (!sol.feasible || !verify_result(inst, sol).ok) {
            log << " seed " << seed << " infeasible/unverified;";
            ok = false;
            continue;
        }
        if (sol.record.truncated) {
            ++truncated;
            continue;
        }
        if (sol.value > 3 * oracle.opt_value) {
            log << " seed " << seed << " ratio " << ratio_of(sol.value, oracle.opt_value) << ";";
            ok = false;
        }
        worst = std::max(worst, ratio_of(sol.value, oracle.opt_value));
    }
    log << " compared " << compared << "/50, worst ratio " << worst << ", truncated "
        << truncated;
    if (compared < 40) ok = false;
    return ok;
}

// --- criterion 2: capacitated top-l sweep -----------------------------------
bool criterion_topl(std::ostringstream& log) {
    bool ok = true;
    double worst = 0;
    int within32 = 0, counted = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Instance base = random_instance(seed, 8, 12, 3, true, NormSpec::l1());
        int n = base.n_clients;
        std::vector<Rat> ells{Rat(1), Rat(2), Rat((n + 1) / 2), Rat(n)};
        for (const auto& ell : ells) {
            Instance inst = base;
            set_instance_norm(inst, NormSpec::top(ell));
            ExactResult oracle = exact_solve(inst);
            if (!oracle.feasible) continue;
            MnckcConfig cfg;
            cfg.eps = Rat(1, 5);
            Rng rng(seed * 17 + rat_floor(ell).get_si());
            Solution sol = run_mnckc(inst, cfg, rng);
            if (!sol.feasible || !verify_result(inst, sol).ok) {
                log << " seed " << seed << " infeasible;";
                ok = false;
                continue;
            }
            double ratio = ratio_of(sol.value, oracle.opt_value);
            worst = std::max(worst, ratio);
            if (sol.value * 10 > oracle.opt_value * 40) {
                log << " seed " << seed << " ell " << rat_to_string(ell) << " ratio " << ratio
                    << ";";
                ok = false;
            }
            if (!sol.record.truncated) {
                ++counted;
                if (sol.value * 10 <= oracle.opt_value * 32) ++within32;
            }
        }
    }
    log << " worst ratio " << worst << "; <=3.2 on " << within32 << "/" << counted;
    if (within32 * 10 < counted * 9) ok = false;
    return ok;
}

// --- criterion 3: top-cn ratio trend ----------------------------------------
bool criterion_topcn(std::ostringstream& log) {
    bool ok = true;
    std::vector<std::pair<Rat, double>> cs{{Rat(1), 2.04}, {Rat(3, 4), 2.29}, {Rat(1, 2), 2.78}};
    std::vector<double> worst(cs.size(), 0.0);
    for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            Rng gen(seed * 31 + 7);
            GenParams p;
            p.kind = "random_metric";
            p.n_facilities = 3 + static_cast<int>(gen.next_below(2));
            p.n_clients = 5 + static_cast<int>(gen.next_below(2));
            p.k = 2;
            Instance inst = generate_instance(p, seed);
            Rat ell = cs[ci].first * inst.n_clients;
            set_instance_norm(inst, NormSpec::top(ell));
            ExactResult oracle = exact_solve(inst);
            if (!oracle.feasible) continue;
            TopcnConfig cfg;
            cfg.c = cs[ci].first;
            cfg.eps = Rat(1, 5);
            Rng rng(seed);
            Solution sol = run_topcn(inst, cfg, rng);
            if (!sol.feasible || !verify_result(inst, sol).ok) {
                log << " c=" << rat_to_string(cs[ci].first) << " seed " << seed << " infeasible;";
                ok = false;
                continue;
            }
            double ratio = ratio_of(sol.value, oracle.opt_value);
            worst[ci] = std::max(worst[ci], ratio);
            if (ratio > cs[ci].second + 1e-12) {
                log << " c=" << rat_to_string(cs[ci].first) << " seed " << seed << " ratio "
                    << ratio << ";";
                ok = false;
            }
        }
    }
    log << " worst ratios";
    for (std::size_t ci = 0; ci < cs.size(); ++ci)
        log << " c=" << rat_to_string(cs[ci].first) << ":" << worst[ci];
    // the empirical worst ratio may not rise as c grows
    if (!(worst[0] <= worst[1] + 1e-12 && worst[1] <= worst[2] + 1e-12)) {
        log << " (monotonicity violated)";
        ok = false;
    }
    return ok;
}

// --- criterion 4: bi-criteria at the oracle linf optimum --------------------
bool criterion_bicriteria(std::ostringstream& log) {
    bool ok = true;
    int produced = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Rng gen(seed * 97 + 5);
        GenParams p;
        p.kind = "random_metric";
        p.n_facilities = 3 + static_cast<int>(gen.next_below(2));
        p.n_clients = 5 + static_cast<int>(gen.next_below(2));
        p.k = 2;
        Instance inst = generate_instance(p, seed);
        Instance linf = inst;
        set_instance_norm(linf, NormSpec::linf());
        ExactResult linf_oracle = exact_solve(linf);
        if (!linf_oracle.feasible || linf_oracle.opt_value == 0) continue;
        Rat L = linf_oracle.opt_value;
        inst.linf_budget = L;
        Rat ell(inst.n_clients);
        set_instance_norm(inst, NormSpec::top(ell));
        ExactResult constrained = constrained_oracle(inst, L);
        if (!constrained.feasible) continue;
        TopcnConfig cfg;
        cfg.c = 1;
        cfg.eps = Rat(1, 5);
        Rng rng(seed);
        BiCriteriaResult res = run_bicriteria(inst, cfg, rng);
        if (!res.found) {
            log << " seed " << seed << " no certified output;";
            ok = false;
            continue;
        }
        ++produced;
        if (!(res.linf_value <= 3 * L)) {
            log << " seed " << seed << " linf breach;";
            ok = false;
        }
        if (rat_to_double(res.topcn_value) >
            2.04 * rat_to_double(constrained.opt_value) + 1e-12) {
            log << " seed " << seed << " topcn ratio "
                << ratio_of(res.topcn_value, constrained.opt_value) << ";";
            ok = false;
        }
    }
    log << " certified outputs " << produced << "/30";
    if (produced < 25) ok = false;
    return ok;
}

// --- criterion 5: star seeding contracts -------------------------------------
bool criterion_lp_seed(std::ostringstream& log) {
    bool ok = true;
    int runs = 0, covered_ok = 0, good = 0, certified = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Instance inst = random_instance(seed, 6, 10, 3, true, NormSpec::l1());
        Rat t(static_cast<long>(seed % 23));
        FractionalSolution frac = solve_cp(inst, t);
        if (!frac.feasible) continue;
        Rng rng(seed);
        LpSeedConfig cfg;
        StarSet stars = sample_stars_retrying(inst, frac, Rat(1, 4), cfg, rng);
        if (!stars.covered) continue;
        ++runs;
        bool valid = static_cast<long>(stars.stars.size()) <= stars.iterations;
        for (const auto& star : stars.stars)
            if (static_cast<int>(star.clients.size()) > inst.capacities[star.facility])
                valid = false;
        if (valid) ++covered_ok;
        if (all_good(stars, frac, Rat(1, 4))) {
            ++good;
            if (threshold_certificate(stars, frac, Rat(1, 4))) ++certified;
        }
    }
    log << " runs " << runs << ", valid " << covered_ok << ", all-good " << good
        << ", certified " << certified;
    if (covered_ok != runs) ok = false;          // validity and count bound: 100%
    if (good * 100 < runs * 95) ok = false;      // all-good rate >= 0.95
    if (certified != good) ok = false;           // exact certificate on good runs
    if (runs < 150) ok = false;
    return ok;
}

// --- criterion 6: dependent rounding ----------------------------------------
bool criterion_rounding(std::ostringstream& log) {
    PropReport exact = prop_dependent_rounding_exact(200, Rng(61));
    PropReport freq = prop_dependent_rounding_frequency(10000, Rng(62));
    log << " exact violations " << exact.violations << ", frequency violations "
        << freq.violations;
    return exact.violations == 0 && freq.violations == 0;
}

// --- criterion 7: occurrence-vector calculus --------------------------------
bool criterion_occurrence(std::ostringstream& log) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    const long trials = 1000;
    PropReport reports[] = {
        prop_occurrence_concavity(trials, Rng(71)),
        prop_domination_convex_combination(trials, Rng(72)),
        prop_domination_averaging(trials, Rng(73)),
        prop_oplus_domination(trials, Rng(74)),
        prop_mix_bound(trials, Rng(75)),
    };
    for (const auto& rep : reports) {
        log << " " << rep.name << ":" << rep.violations;
        if (rep.trials != trials || rep.violations != 0) ok = false;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << " (" << secs << "s)";
    if (secs > 30.0) ok = false;
    return ok;
}

// --- criterion 8: linearization identity -------------------------------------
bool criterion_linearization(std::ostringstream& log) {
    Rng rng(81);
    long violations = 0;
    for (int t = 0; t < 1000; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(9));
        CostVector v(len);
        for (auto& x : v) x = Rat(static_cast<long>(rng.next_below(60)));
        Rat ell = rat(static_cast<long>(rng.next_below(2 * len + 1)), 2);
        Rat direct = top_l(v, ell);
        Rat best = top_l_via_threshold(v, ell, Rat(0));
        for (const auto& x : v)
            best = std::min(best, top_l_via_threshold(v, ell, x));
        if (best != direct) ++violations;
    }
    log << " violations " << violations << "/1000";
    return violations == 0;
}

// --- criterion 9: assignment finder ------------------------------------------
bool criterion_find_assignment(std::ostringstream& log) {
    bool ok = true;
    int total = 0;
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Rng gen(seed * 131 + 3);
        int k = 2 + static_cast<int>(gen.next_below(2));
        GenParams p;
        p.kind = "random_metric";
        p.n_facilities = k;
        p.n_clients = 6 + static_cast<int>(gen.next_below(5));
        p.k = k;
        p.cap_min = std::max(1, p.n_clients / k);
        p.cap_max = p.n_clients;
        Instance inst = generate_instance(p, seed);
        set_instance_norm(inst, NormSpec::top(Rat(2)));
        std::vector<int> open(k);
        for (int i = 0; i < k; ++i) open[i] = i;
        // structural invariants
        ExclusiveStructure s = classify_clients(inst, open, Rat(1, 12));
        if (!s.laminar || !s.partition) {
            log << " seed " << seed << " structure breach;";
            ok = false;
        }
        AssignResult exact = optimal_assignment(inst, open, NormSpec::top(Rat(2)));
        AssignResult mine = find_assignment(inst, open, Rat(1, 4));
        if (exact.status != AssignStatus::Ok) continue;
        ++total;
        if (mine.status != AssignStatus::Ok) {
            log << " seed " << seed << " finder infeasible;";
            ok = false;
            continue;
        }
        double ratio = ratio_of(mine.value, exact.value);
        worst = std::max(worst, ratio);
        if (mine.value < exact.value) {
            log << " seed " << seed << " below optimum;";
            ok = false;
        }
        if (mine.value * 10 > exact.value * 19) {
            log << " seed " << seed << " ratio " << ratio << ";";
            ok = false;
        }
    }
    log << " instances " << total << ", worst ratio " << worst;
    if (total < 25) ok = false;
    return ok;
}

// --- criterion 10: distance rounding ----------------------------------------
bool criterion_rounding_distance(std::ostringstream& log) {
    bool ok = true;
    Rat eps(1, 4);
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Instance inst = random_instance(seed, 6, 8, 3, true, NormSpec::l1());
        ExactResult before = exact_solve(inst);
        if (!before.feasible) continue;
        Rat L = 0;
        for (int j = 0; j < inst.n_clients; ++j)
            L = std::max(L, inst.fc_dist(before.opt_assignment[j], j).value);
        if (L == 0) continue;
        Instance scaled = round_and_scale(inst, L, eps);
        ExactResult after = exact_solve(scaled);
        if (!after.feasible) {
            log << " seed " << seed << " infeasible after rounding;";
            ok = false;
            continue;
        }
        ++checked;
        int n = inst.total_points();
        Rat grid = 2 * eps * L / (3 * Rat(n) * Rat(n));
        Rat back = after.opt_value * grid;
        // optimum of the rounded instance within (1+eps) of the original
        if (!(back <= before.opt_value * (1 + eps)) ||
            !(before.opt_value <= back * (1 + eps) + eps * L)) {
            log << " seed " << seed << " drift " << rat_to_string(back) << " vs "
                << rat_to_string(before.opt_value) << ";";
            ok = false;
        }
    }
    log << " checked " << checked << "/30";
    if (checked < 25) ok = false;
    return ok;
}

// --- criterion 11: determinism across thread counts --------------------------
bool criterion_determinism(std::ostringstream& log) {
    // the bench loop: per-seed instances solved independently, results
    // collected by index; worker counts must not alter a single byte
    auto bench = [](int workers) {
        std::vector<std::string> rows(12);
        std::atomic<int> next{0};
        auto work = [&]() {
            for (;;) {
                int idx = next.fetch_add(1);
                if (idx >= static_cast<int>(rows.size())) return;
                std::uint64_t seed = 100 + idx;
                Instance inst = random_instance(seed, 6, 8, 2, true, NormSpec::top(Rat(2)));
                MnckcConfig cfg;
                Rng rng(seed);
                Solution sol = run_mnckc(inst, cfg, rng);
                sol.record.seed = seed;
                sol.record.config = "bench";
                rows[idx] = solution_to_json(inst, sol);
            }
        };
        std::vector<std::thread> threads;
        for (int w = 1; w < workers; ++w) threads.emplace_back(work);
        work();
        for (auto& th : threads) th.join();
        return rows;
    };
    auto a = bench(1);
    auto b = bench(2);
    auto c = bench(3);
    bool ok = a == b && b == c;
    log << " 12 results x {1,2,3} workers " << (ok ? "identical" : "diverged");
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria{
        {1, "capacitated k-center ratio <= 3", criterion_kcenter},
        {2, "capacitated top-l ratio <= 4.0 (3.2 on 90%)", criterion_topl},
        {3, "top-cn ratios per c with monotone trend", criterion_topcn},
        {4, "bi-criteria certified at the oracle budget", criterion_bicriteria},
        {5, "star seeding: validity, goodness, certificate", criterion_lp_seed},
        {6, "dependent rounding marginals", criterion_rounding},
        {7, "occurrence-vector calculus", criterion_occurrence},
        {8, "top-l linearization identity", criterion_linearization},
        {9, "assignment finder within factor 1.9", criterion_find_assignment},
        {10, "distance rounding within 1+eps", criterion_rounding_distance},
        {11, "bench determinism across worker counts", criterion_determinism},
    };

    int only = -1;
    for (int a = 1; a < argc; ++a)
        if (std::strcmp(argv[a], "--criterion") == 0 && a + 1 < argc) only = std::atoi(argv[a + 1]);

    int failures = 0;
    for (const auto& crit : criteria) {
        if (only > 0 && crit.id != only) continue;
        std::ostringstream log;
        auto t0 = std::chrono::steady_clock::now();
        bool ok = crit.run(log);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << crit.id << ": " << crit.label
                  << " |" << log.str() << " | " << secs << "s" << std::endl;
        if (!ok) ++failures;
    }
    return failures;
}
