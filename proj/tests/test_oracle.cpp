#include "doctest.h"

#include <algorithm>
#include <functional>

#include "normclust/metric.hpp"
#include "normclust/norms.hpp"
#include "normclust/oracle.hpp"

using namespace normclust;

namespace {

// full enumeration over k-subsets x assignments; the independent oracle for
// exact_solve on very small instances
struct BruteResult {
    bool feasible = false;
    Rat value = 0;
    std::vector<int> open;
};

BruteResult brute_force(const Instance& inst, const NormSpec& norm,
                        const std::optional<Rat>& max_edge = std::nullopt) {
    BruteResult best;
    std::vector<int> subset(inst.k);
    for (int i = 0; i < inst.k; ++i) subset[i] = i;
    auto try_subset = [&](const std::vector<int>& open) {
        Assignment assign(inst.n_clients, -1);
        std::vector<int> load(open.size(), 0);
        std::function<void(int)> rec = [&](int j) {
            if (j == inst.n_clients) {
                Rat value = eval_norm(norm, cost_vector(inst, assign));
                if (!best.feasible || value < best.value) {
                    best.feasible = true;
                    best.value = value;
                    best.open = open;
                }
                return;
            }
            for (std::size_t oi = 0; oi < open.size(); ++oi) {
                if (load[oi] >= inst.capacities[open[oi]]) continue;
                const Dist& d = inst.fc_dist(open[oi], j);
                if (!d.finite) continue;
                if (max_edge && d.value > *max_edge) continue;
                ++load[oi];
                assign[j] = open[oi];
                rec(j + 1);
                --load[oi];
            }
            assign[j] = -1;
        };
        rec(0);
    };
    for (;;) {
        try_subset(subset);
        int i = inst.k - 1;
        while (i >= 0 && subset[i] == inst.n_facilities - inst.k + i) --i;
        if (i < 0) break;
        ++subset[i];
        for (int j = i + 1; j < inst.k; ++j) subset[j] = subset[j - 1] + 1;
    }
    return best;
}

Instance random_instance(std::uint64_t seed, int nf, int nc, int k, bool capacitated,
                         NormSpec norm = NormSpec::l1()) {
    GenParams p;
    p.kind = "random_metric";
    p.n_facilities = nf;
    p.n_clients = nc;
    p.k = k;
    if (capacitated) {
        p.cap_min = std::max(1, nc / k / 2);
        p.cap_max = nc;
    }
    p.norm_kind = norm.kind;
    p.norm_p = norm.p;
    p.norm_ell = norm.ell;
    p.norm_weights = norm.weights;
    return generate_instance(p, seed);
}

}  // namespace

TEST_CASE("k equals |F| uncapacitated L1 assigns everyone to the nearest facility") {
    Instance inst = random_instance(3, 4, 6, 4, false);
    ExactResult res = exact_solve(inst);
    REQUIRE(res.feasible);
    for (int j = 0; j < inst.n_clients; ++j) {
        Rat nearest = inst.fc_dist(0, j).value;
        for (int i = 1; i < inst.n_facilities; ++i)
            nearest = std::min(nearest, inst.fc_dist(i, j).value);
        CHECK(inst.fc_dist(res.opt_assignment[j], j).value == nearest);
    }
}

TEST_CASE("insufficient capacity is an explicit infeasibility") {
    Instance inst = random_instance(4, 1, 5, 1, false);
    inst.capacities[0] = 3;
    ExactResult res = exact_solve(inst);
    CHECK(!res.feasible);
    CHECK(res.subsets_examined == 1);
}

TEST_CASE("a client with only infinite edges makes the set infeasible") {
    Instance inst = random_instance(5, 2, 3, 2, false);
    for (int i = 0; i < 2; ++i) {
        inst.space.at(i, inst.client_point(0)) = Dist::inf();
        inst.space.at(inst.client_point(0), i) = Dist::inf();
    }
    CHECK(!feasibility(inst, {0, 1}));
    CHECK(!exact_solve(inst).feasible);
}

TEST_CASE("feasibility is a plain transportation check") {
    Instance inst = random_instance(6, 3, 6, 2, false);
    inst.capacities = {2, 2, 2};
    CHECK(!feasibility(inst, {0, 1}));  // 4 < 6 clients
    CHECK(feasibility(inst, {0, 1, 2}));
}

TEST_CASE("exact_solve equals full enumeration on random instances") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        Instance inst = random_instance(seed, 6, 8, 2, true, NormSpec::top(Rat(3)));
        ExactResult fast = exact_solve(inst);
        BruteResult slow = brute_force(inst, NormSpec::top(Rat(3)));
        REQUIRE(fast.feasible == slow.feasible);
        if (fast.feasible) CHECK(fast.opt_value == slow.value);
    }
}

TEST_CASE("optimal_assignment per-norm methods agree with enumeration") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        Instance inst = random_instance(seed, 4, 6, 4, true);
        std::vector<int> open{0, 1, 2, 3};
        for (const auto& norm :
             {NormSpec::linf(), NormSpec::l1(), NormSpec::lp(2), NormSpec::top(Rat(2)),
              NormSpec::top(Rat(7, 2))}) {
            AssignResult fast = optimal_assignment(inst, open, norm);
            Instance fixed = inst;  // brute force over the same open set
            set_instance_norm(fixed, norm);
            fixed.k = 4;
            BruteResult slow = brute_force(fixed, norm);
            REQUIRE((fast.status == AssignStatus::Ok) == slow.feasible);
            if (slow.feasible) CHECK(fast.value == slow.value);
        }
    }
}

TEST_CASE("top-n equals L1 and top-1 equals LInf on fixed open sets") {
    for (std::uint64_t seed = 20; seed <= 26; ++seed) {
        Instance inst = random_instance(seed, 5, 7, 2, true);
        std::vector<int> open{1, 3};
        if (!feasibility(inst, open)) continue;
        AssignResult l1 = optimal_assignment(inst, open, NormSpec::l1());
        AssignResult topn = optimal_assignment(inst, open, NormSpec::top(Rat(7)));
        REQUIRE(l1.status == AssignStatus::Ok);
        CHECK(l1.value == topn.value);
        AssignResult linf = optimal_assignment(inst, open, NormSpec::linf());
        AssignResult top1 = optimal_assignment(inst, open, NormSpec::top(Rat(1)));
        CHECK(linf.value == top1.value);
    }
}

TEST_CASE("ordered norm assignment by enumeration matches the generic brute force") {
    Instance inst = random_instance(9, 3, 6, 3, true);
    NormSpec ordered = NormSpec::ordered({Rat(4), Rat(2), Rat(1), Rat(1), Rat(0), Rat(0)});
    std::vector<int> open{0, 1, 2};
    AssignResult fast = optimal_assignment(inst, open, ordered);
    Instance fixed = inst;
    set_instance_norm(fixed, ordered);
    BruteResult slow = brute_force(fixed, ordered);
    REQUIRE(fast.status == AssignStatus::Ok);
    CHECK(fast.value == slow.value);

    // beyond the enumeration cap the exact path declines
    OracleConfig cfg;
    cfg.ordered_enum_cap = 4;
    CHECK(optimal_assignment(inst, open, ordered, std::nullopt, cfg).status ==
          AssignStatus::UnsupportedExact);
}

TEST_CASE("threshold-flow top-l equals brute force over a seed corpus") {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        Instance inst = random_instance(seed, 4, 5 + seed % 4, 2, true);
        NormSpec norm = NormSpec::top(rat(1 + static_cast<long>(seed % 5), 2));
        set_instance_norm(inst, norm);
        ExactResult fast = exact_solve(inst);
        BruteResult slow = brute_force(inst, norm);
        REQUIRE(fast.feasible == slow.feasible);
        if (fast.feasible) {
            CHECK(fast.opt_value == slow.value);
            ++checked;
        }
    }
    CHECK(checked > 150);
}

TEST_CASE("top-l assignment value is nonincreasing as capacities grow") {
    for (std::uint64_t seed = 31; seed <= 36; ++seed) {
        Instance inst = random_instance(seed, 3, 6, 3, true);
        std::vector<int> open{0, 1, 2};
        NormSpec norm = NormSpec::top(Rat(2));
        AssignResult before = optimal_assignment(inst, open, norm);
        Instance relaxed = inst;
        for (auto& u : relaxed.capacities) ++u;
        AssignResult after = optimal_assignment(relaxed, open, norm);
        if (before.status == AssignStatus::Ok) {
            REQUIRE(after.status == AssignStatus::Ok);
            CHECK(after.value <= before.value);
        }
    }
}

TEST_CASE("constrained oracle basics") {
    Instance inst = random_instance(44, 4, 6, 2, false);
    ExactResult full = exact_solve(inst);
    REQUIRE(full.feasible);
    Rat diameter = 0;
    for (int i = 0; i < inst.n_facilities; ++i)
        for (int j = 0; j < inst.n_clients; ++j)
            diameter = std::max(diameter, inst.fc_dist(i, j).value);
    CHECK(constrained_oracle(inst, diameter).opt_value == full.opt_value);
    CHECK(!constrained_oracle(inst, Rat(0)).feasible);
    // monotone in L
    Rat prev = -1;
    for (long L = 1; L <= 40; L += 13) {
        ExactResult res = constrained_oracle(inst, Rat(L));
        if (!res.feasible) continue;
        if (prev >= 0) CHECK(res.opt_value <= prev);
        prev = res.opt_value;
    }
}

TEST_CASE("oracle budget guard") {
    Instance inst = random_instance(50, 4, 6, 2, false);
    OracleConfig cfg;
    cfg.max_facilities = 3;
    CHECK_THROWS(exact_solve(inst, cfg));
}
