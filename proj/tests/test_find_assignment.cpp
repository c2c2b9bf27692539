#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "normclust/find_assignment.hpp"
#include "normclust/oracle.hpp"

using namespace normclust;

namespace {

Instance instance_from_matrix(std::vector<std::vector<long>> rows, int nf, int k,
                              std::vector<int> caps = {}) {
    Instance inst;
    inst.space.point_count = static_cast<int>(rows.size());
    for (const auto& row : rows)
        for (long v : row) inst.space.d.push_back(Dist{true, Rat(v)});
    inst.n_facilities = nf;
    inst.n_clients = inst.space.point_count - nf;
    inst.k = k;
    inst.capacities = caps.empty() ? std::vector<int>(nf, inst.n_clients) : caps;
    inst.norm_kind = NormSpec::L1;
    return inst;
}

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

}  // namespace

TEST_CASE("two close facilities and a distant client form one exclusivity class") {
    // facilities 0,1 at mutual distance 1; client at distance 100/101
    Instance inst = instance_from_matrix(
        {{0, 1, 100}, {1, 0, 101}, {100, 101, 0}}, 2, 2);
    ExclusiveStructure s = classify_clients(inst, {0, 1}, Rat(1, 20));
    REQUIRE(s.classes.size() == 1);
    CHECK(s.classes[0].facilities == std::vector<int>{0, 1});
    CHECK(s.classes[0].clients == std::vector<int>{0});
    CHECK(s.inclusive.empty());
    CHECK(s.laminar);
    CHECK(s.partition);
}

TEST_CASE("a client equidistant from two far-apart facilities is inclusive") {
    Instance inst = instance_from_matrix({{0, 2, 1}, {2, 0, 1}, {1, 1, 0}}, 2, 2);
    ExclusiveStructure s = classify_clients(inst, {0, 1}, Rat(1, 20));
    CHECK(s.classes.empty());
    CHECK(s.inclusive == std::vector<int>{0});
}

TEST_CASE("classification requires the small-eps regime") {
    Instance inst = instance_from_matrix({{0, 2, 1}, {2, 0, 1}, {1, 1, 0}}, 2, 2);
    CHECK_THROWS(classify_clients(inst, {0, 1}, Rat(1, 4)));
    CHECK_THROWS(classify_clients(inst, {0, 1}, Rat(1, 10)));  // boundary excluded
}

TEST_CASE("discovered classes are laminar and partition the clients") {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        int k = 2 + static_cast<int>(seed % 3);
        Instance inst = random_instance(seed, k, 8, k, false);
        std::vector<int> open(k);
        for (int i = 0; i < k; ++i) open[i] = i;
        ExclusiveStructure s = classify_clients(inst, open, Rat(1, 12));
        CHECK(s.laminar);
        CHECK(s.partition);
        // each client appears exactly once
        std::vector<int> seen(inst.n_clients, 0);
        for (int c : s.inclusive) ++seen[c];
        for (const auto& cls : s.classes)
            for (int c : cls.clients) ++seen[c];
        for (int j = 0; j < inst.n_clients; ++j) CHECK(seen[j] == 1);
    }
}

TEST_CASE("nested classes link through laminar parents") {
    // facilities 0,1 a unit apart, facility 2 around 1000 away; one client
    // close enough to see {0,1} as a block, one so far that all three merge
    Instance inst = instance_from_matrix(
        {
            {0, 1, 1000, 20, 50000},
            {1, 0, 1001, 21, 50001},
            {1000, 1001, 0, 980, 49000},
            {20, 21, 980, 0, 49980},
            {50000, 50001, 49000, 49980, 0},
        },
        3, 3);
    REQUIRE(validate_metric(inst.space).empty());
    ExclusiveStructure s = classify_clients(inst, {0, 1, 2}, Rat(1, 15));
    REQUIRE(s.classes.size() == 2);
    CHECK(s.laminar);
    int small = s.classes[0].facilities.size() == 2 ? 0 : 1;
    CHECK(s.classes[small].facilities == std::vector<int>{0, 1});
    CHECK(s.classes[1 - small].facilities == std::vector<int>{0, 1, 2});
    CHECK(s.classes[small].parent == 1 - small);
}

TEST_CASE("discretized distances: degenerate inputs") {
    Instance inst = random_instance(2, 3, 5, 3, false);
    CHECK(discretized_distances(inst, 0, {}, Rat(1, 12)).empty());
    auto single = discretized_distances(inst, 0, {2}, Rat(1, 12));
    CHECK(single.size() == 1);
}

TEST_CASE("discretized distance count obeys the inclusive-client bound") {
    for (const Rat& eps : {Rat(1, 20), Rat(9, 100)}) {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            Instance inst = random_instance(seed, 3, 9, 3, false);
            ExclusiveStructure s = classify_clients(inst, {0, 1, 2}, eps);
            double cells = std::ceil(std::log(4.0 / rat_to_double(eps * eps)) /
                                     std::log(1.0 + rat_to_double(eps)));
            for (int f = 0; f < 3; ++f) {
                auto set = discretized_distances(inst, f, s.inclusive, eps);
                CHECK(static_cast<double>(set.size()) <= 3 * cells);
            }
        }
    }
}

TEST_CASE("find_assignment with one facility is forced") {
    Instance inst = random_instance(5, 1, 6, 1, false);
    AssignResult res = find_assignment(inst, {0}, Rat(1, 4));
    REQUIRE(res.status == AssignStatus::Ok);
    for (int j = 0; j < 6; ++j) CHECK(res.assign[j] == 0);
    CHECK(res.value == optimal_assignment(inst, {0}, NormSpec::l1()).value);
}

TEST_CASE("uncapacitated two-facility assignment equals nearest-facility") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst = random_instance(seed, 2, 7, 2, false);
        AssignResult res = find_assignment(inst, {0, 1}, Rat(1, 4));
        REQUIRE(res.status == AssignStatus::Ok);
        Rat nearest = 0;
        for (int j = 0; j < 7; ++j)
            nearest += std::min(inst.fc_dist(0, j).value, inst.fc_dist(1, j).value);
        CHECK(res.value == nearest);
    }
}

TEST_CASE("find_assignment tracks the exact assignment within factor 1.9") {
    int within = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        int k = 2 + static_cast<int>(seed % 2);
        Instance inst = random_instance(seed, k, 6 + seed % 5, k, true);
        set_instance_norm(inst, NormSpec::top(Rat(2)));
        std::vector<int> open(k);
        for (int i = 0; i < k; ++i) open[i] = i;
        AssignResult exact = optimal_assignment(inst, open, NormSpec::top(Rat(2)));
        AssignResult mine = find_assignment(inst, open, Rat(1, 4));
        REQUIRE((exact.status == AssignStatus::Ok) == (mine.status == AssignStatus::Ok));
        if (exact.status != AssignStatus::Ok) continue;
        ++total;
        CHECK(mine.value >= exact.value);  // a feasible assignment, never below
        if (mine.value * 10 <= exact.value * 19) ++within;
    }
    CHECK(total >= 25);
    CHECK(within == total);
}

TEST_CASE("find_assignment reports infeasible open sets") {
    Instance inst = random_instance(9, 3, 8, 2, false);
    inst.capacities = {2, 2, 8};
    CHECK(find_assignment(inst, {0, 1}, Rat(1, 4)).status == AssignStatus::Infeasible);
}
