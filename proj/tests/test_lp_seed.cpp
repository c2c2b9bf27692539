#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "normclust/flow.hpp"
#include "normclust/lp_seed.hpp"
#include "normclust/oracle.hpp"

using namespace normclust;

namespace {

Instance random_instance(std::uint64_t seed, int nf, int nc, int k, bool capacitated) {
    GenParams p;
    p.kind = "random_metric";
    p.n_facilities = nf;
    p.n_clients = nc;
    p.k = k;
    if (capacitated) {
        p.cap_min = std::max(1, nc / k);
        p.cap_max = nc;
    }
    return generate_instance(p, seed);
}

Rat max_fc_distance(const Instance& inst) {
    Rat out = 0;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j)
            out = std::max(out, inst.fc_dist(i, j).value);
    return out;
}

}  // namespace

TEST_CASE("solve_cp objective vanishes when the threshold clears every distance") {
    Instance inst = random_instance(1, 4, 6, 2, true);
    FractionalSolution frac = solve_cp(inst, max_fc_distance(inst) + 1);
    REQUIRE(frac.feasible);
    CHECK(frac.objective == Rat(0));
    Rat ysum = 0;
    for (const auto& y : frac.y) ysum += y;
    CHECK(ysum == Rat(inst.k));
}

TEST_CASE("solve_cp at t=0 with k=|F| equals the transportation optimum") {
    // with y pinned at 1 by k = |F|, the relaxation is exactly a min-cost flow
    for (std::uint64_t seed = 2; seed <= 6; ++seed) {
        Instance inst = random_instance(seed, 4, 6, 4, true);
        FractionalSolution frac = solve_cp(inst, Rat(0));
        REQUIRE(frac.feasible);
        std::vector<int> all{0, 1, 2, 3};
        AssignResult flow = optimal_assignment(inst, all, NormSpec::l1());
        REQUIRE(flow.status == AssignStatus::Ok);
        CHECK(frac.objective == flow.value);
    }
}

TEST_CASE("solve_cp respects capacities fractionally") {
    Instance inst = random_instance(7, 3, 6, 2, true);
    inst.capacities = {2, 3, 4};
    FractionalSolution frac = solve_cp(inst, Rat(0));
    REQUIRE(frac.feasible);
    for (int i = 0; i < 3; ++i) {
        Rat load = 0;
        for (int j = 0; j < 6; ++j) load += frac.x[i][j];
        CHECK(load <= Rat(inst.capacities[i]) * frac.y[i]);
    }
    for (int j = 0; j < 6; ++j) {
        Rat covered = 0;
        for (int i = 0; i < 3; ++i) {
            covered += frac.x[i][j];
            CHECK(frac.x[i][j] <= frac.y[i]);
        }
        CHECK(covered == Rat(1));
    }
}

TEST_CASE("dependent rounding: deterministic on 0/1 marginals") {
    Rng rng(5);
    std::vector<Rat> x{Rat(1), Rat(0), Rat(1)};
    auto J = dependent_round_star(x, Rat(1), 3, rng);
    CHECK(J == std::vector<int>{0, 2});
}

TEST_CASE("dependent rounding: exhausting the randomness of (1/2, 1/2) with u=1") {
    auto outcomes = systematic_sample_outcomes({Rat(1, 2), Rat(1, 2)});
    Rat p_first = 0, p_second = 0, p_total = 0;
    for (const auto& [prob, sel] : outcomes) {
        REQUIRE(sel.size() == 1);  // cardinality exactly 1 everywhere
        p_total += prob;
        if (sel[0] == 0) p_first += prob;
        if (sel[0] == 1) p_second += prob;
    }
    CHECK(p_total == Rat(1));
    CHECK(p_first == Rat(1, 2));
    CHECK(p_second == Rat(1, 2));
}

TEST_CASE("dependent rounding: exact marginals and cardinality over random cases") {
    Rng rng(9);
    for (int t = 0; t < 120; ++t) {
        int len = 1 + static_cast<int>(rng.next_below(12));
        std::vector<Rat> marginals(len);
        Rat total = 0;
        for (auto& m : marginals) {
            m = rng.next_unit();
            total += m;
        }
        auto outcomes = systematic_sample_outcomes(marginals);
        std::vector<Rat> observed(len, Rat(0));
        for (const auto& [prob, sel] : outcomes) {
            CHECK(Rat(static_cast<long>(sel.size())) <= Rat(rat_ceil(total)));
            for (int j : sel) observed[j] += prob;
        }
        for (int j = 0; j < len; ++j) CHECK(observed[j] == marginals[j]);
    }
}

TEST_CASE("dependent rounding: Monte-Carlo frequencies within 4 sigma") {
    Rng rng(11);
    std::vector<Rat> x{Rat(1, 3), Rat(2, 3), Rat(1, 5), Rat(4, 5)};
    const int draws = 10000;
    std::vector<long> hits(x.size(), 0);
    for (int d = 0; d < draws; ++d) {
        auto J = dependent_round_star(x, Rat(1), 4, rng);
        for (int j : J) ++hits[j];
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        double p = rat_to_double(x[j]);
        double sigma = std::sqrt(p * (1 - p) * draws);
        CHECK(std::abs(hits[j] - p * draws) <= 4 * sigma);
    }
}

TEST_CASE("dependent rounding rejects bad inputs") {
    Rng rng(13);
    CHECK_THROWS(dependent_round_star({Rat(3, 2)}, Rat(1), 1, rng));  // marginal > 1
    CHECK_THROWS(dependent_round_star({Rat(1), Rat(1)}, Rat(1), 1, rng));  // sum > capacity
}

TEST_CASE("sampled stars are valid, bounded in number, and keep the closest copy") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = random_instance(seed, 4, 8, 2, true);
        FractionalSolution frac = solve_cp(inst, Rat(0));
        REQUIRE(frac.feasible);
        Rng rng(seed * 77);
        LpSeedConfig cfg;
        StarSet stars = sample_stars(inst, frac, Rat(1, 4), cfg, rng);
        CHECK(static_cast<long>(stars.stars.size()) <= stars.iterations);
        std::vector<int> seen(inst.n_clients, 0);
        for (const auto& star : stars.stars) {
            CHECK(static_cast<int>(star.clients.size()) <=
                  inst.capacities[star.facility]);  // always a valid star
            for (int j : star.clients) ++seen[j];
        }
        for (int j = 0; j < inst.n_clients; ++j) {
            CHECK(seen[j] <= 1);  // disjoint after dedupe
            if (stars.star_of[j] >= 0)
                CHECK(inst.fc_dist(stars.stars[stars.star_of[j]].facility, j).value ==
                      stars.b[j]);
        }
    }
}

TEST_CASE("an integral relaxation turns its clusters into the star set") {
    // two far-apart co-located facility/client pairs force an integral optimum
    Instance inst;
    inst.n_facilities = 2;
    inst.n_clients = 4;
    inst.k = 2;
    inst.capacities = {4, 4};
    inst.norm_kind = NormSpec::L1;
    const int n = 6;
    inst.space.point_count = n;
    inst.space.d.assign(n * n, Dist{true, Rat(0)});
    auto set = [&](int a, int b, long v) {
        inst.space.at(a, b) = Dist{true, Rat(v)};
        inst.space.at(b, a) = Dist{true, Rat(v)};
    };
    // facility 0 near clients 0,1 (points 2,3); facility 1 near clients 2,3
    set(0, 2, 1);
    set(0, 3, 1);
    set(1, 4, 1);
    set(1, 5, 1);
    set(0, 1, 100);
    set(0, 4, 101);
    set(0, 5, 101);
    set(1, 2, 101);
    set(1, 3, 101);
    set(2, 3, 2);
    set(2, 4, 102);
    set(2, 5, 102);
    set(3, 4, 102);
    set(3, 5, 102);
    set(4, 5, 2);
    REQUIRE(validate_metric(inst.space).empty());

    FractionalSolution frac = solve_cp(inst, Rat(0));
    REQUIRE(frac.feasible);
    CHECK(frac.objective == Rat(4));
    Rng rng(3);
    StarSet stars = sample_stars_retrying(inst, frac, Rat(1, 4), {}, rng);
    REQUIRE(stars.covered);
    REQUIRE(stars.stars.size() == 2);
    for (const auto& star : stars.stars) {
        std::vector<int> expect = star.facility == 0 ? std::vector<int>{0, 1}
                                                     : std::vector<int>{2, 3};
        CHECK(star.clients == expect);
    }
    CHECK(all_good(stars, frac, Rat(1, 4)));
}

TEST_CASE("goodness boundary cases") {
    Instance inst = random_instance(31, 2, 3, 1, false);
    FractionalSolution frac;
    frac.feasible = true;
    frac.t = 0;
    frac.objective = 0;
    frac.d_av = {Rat(4), Rat(0), Rat(10)};
    StarSet stars;
    stars.covered = true;
    stars.stars.push_back({0, {0, 1, 2}});
    stars.star_of = {0, 0, 0};
    Rat eps(1, 5);
    // exactly d_av/(1-eps) is still good; zero matches zero; beyond is bad
    stars.b = {Rat(5), Rat(0), Rat(13)};
    auto flags = check_goodness(stars, frac, eps);
    CHECK(flags[0]);
    CHECK(flags[1]);
    CHECK(!flags[2]);
}

TEST_CASE("all-good runs satisfy the threshold certificate over a sweep") {
    int certified = 0, good_runs = 0, runs = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        Instance inst = random_instance(seed, 4, 7, 2, true);
        Rat t = Rat(static_cast<long>(seed % 17));
        FractionalSolution frac = solve_cp(inst, t);
        if (!frac.feasible) continue;
        Rng rng(seed);
        StarSet stars = sample_stars_retrying(inst, frac, Rat(1, 4), {}, rng);
        if (!stars.covered) continue;
        ++runs;
        if (!all_good(stars, frac, Rat(1, 4))) continue;
        ++good_runs;
        if (threshold_certificate(stars, frac, Rat(1, 4))) ++certified;
    }
    CHECK(runs >= 50);
    CHECK(good_runs == certified);  // all-good implies the certificate
    CHECK(good_runs * 100 >= runs * 90);
}

TEST_CASE("simple_three_approx stays within 3.5x of the oracle at eps=1/4") {
    int ok = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        Instance inst = random_instance(seed, 3, 5, 1, false);
        ExactResult oracle = exact_solve(inst);
        REQUIRE(oracle.feasible);
        Rng rng(seed * 3 + 1);
        Solution sol = simple_three_approx(inst, Rat(1, 4), rng);
        REQUIRE(sol.feasible);
        CHECK(verify_result(inst, sol).ok);
        ++total;
        if (oracle.opt_value == 0) {
            if (sol.value == 0) ++ok;
            continue;
        }
        CHECK(sol.value >= oracle.opt_value);
        if (sol.value * 2 <= oracle.opt_value * 7) ++ok;  // ratio <= 3.5
    }
    CHECK(ok == total);
}

TEST_CASE("simple_three_approx is exact with co-located duplicate facilities") {
    Instance inst = random_instance(8, 4, 6, 2, false);
    // facility 1 duplicates facility 0, facility 3 duplicates facility 2
    for (int b = 0; b < inst.total_points(); ++b) {
        inst.space.at(1, b) = inst.space.at(0, b);
        inst.space.at(b, 1) = inst.space.at(b, 0);
        inst.space.at(3, b) = inst.space.at(2, b);
        inst.space.at(b, 3) = inst.space.at(b, 2);
    }
    inst.space.at(0, 1) = inst.space.at(1, 0) = Dist{true, Rat(0)};
    inst.space.at(2, 3) = inst.space.at(3, 2) = Dist{true, Rat(0)};
    inst.space.at(1, 1) = inst.space.at(3, 3) = Dist{true, Rat(0)};
    REQUIRE(validate_metric(inst.space).empty());
    ExactResult oracle = exact_solve(inst);
    Rng rng(5);
    Solution sol = simple_three_approx(inst, Rat(1, 4), rng);
    REQUIRE(sol.feasible);
    CHECK(sol.value == oracle.opt_value);
}

TEST_CASE("star set JSON round trip") {
    StarSet s;
    s.covered = true;
    s.stars.push_back({2, {0, 2}});
    s.stars.push_back({5, {1}});
    s.star_of = {0, 1, 0};
    s.b = {Rat(3), Rat(7, 2), Rat(0)};
    StarSet back = stars_from_json(stars_to_json(s), 3);
    REQUIRE(back.stars.size() == 2);
    CHECK(back.stars[0].facility == 2);
    CHECK(back.stars[1].clients == std::vector<int>{1});
    CHECK(back.b[1] == Rat(7, 2));
    CHECK(back.covered);
}
