#include "doctest.h"

#include "normclust/metric.hpp"
#include "normclust/mnckc.hpp"
#include "normclust/oracle.hpp"
#include "normclust/solution.hpp"

using namespace normclust;

namespace {

Instance sample_instance(std::uint64_t seed) {
    GenParams p;
    p.kind = "random_metric";
    p.n_facilities = 4;
    p.n_clients = 6;
    p.k = 2;
    p.cap_min = 2;
    p.cap_max = 6;
    return generate_instance(p, seed);
}

Solution oracle_solution(const Instance& inst) {
    ExactResult res = exact_solve(inst);
    Solution sol;
    sol.feasible = res.feasible;
    sol.open = res.opt_open_set;
    sol.assign = res.opt_assignment;
    sol.value = res.opt_value;
    sol.record.algorithm = "exact";
    sol.record.instance_hash = instance_hash(inst);
    return sol;
}

}  // namespace

TEST_CASE("verify_result accepts untouched solver output") {
    Instance inst = sample_instance(1);
    Solution sol = oracle_solution(inst);
    REQUIRE(sol.feasible);
    VerifyReport rep = verify_result(inst, sol);
    CHECK(rep.ok);
    CHECK(rep.issues.empty());
}

TEST_CASE("verify_result flags a perturbed value") {
    Instance inst = sample_instance(2);
    Solution sol = oracle_solution(inst);
    sol.value += 1;
    VerifyReport rep = verify_result(inst, sol);
    CHECK(!rep.ok);
    REQUIRE(!rep.issues.empty());
    CHECK(rep.issues[0].find("value mismatch") != std::string::npos);
}

TEST_CASE("verify_result flags assignments to closed facilities and capacity breaches") {
    Instance inst = sample_instance(3);
    Solution sol = oracle_solution(inst);
    Solution closed = sol;
    for (auto& a : closed.assign)
        if (a == sol.open[0]) a = -1;
    for (auto& a : closed.assign)
        if (a < 0) a = (sol.open[0] + 1) % inst.n_facilities;
    bool touched = false;
    for (int j = 0; j < inst.n_clients; ++j)
        if (closed.assign[j] != sol.assign[j]) touched = true;
    if (touched) {
        VerifyReport rep = verify_result(inst, closed);
        CHECK(!rep.ok);
    }

    Solution crowded = sol;
    // push every client onto one open facility to trip its capacity
    for (auto& a : crowded.assign) a = sol.open[0];
    if (inst.capacities[sol.open[0]] < inst.n_clients) {
        VerifyReport rep = verify_result(inst, crowded);
        CHECK(!rep.ok);
        bool named = false;
        for (const auto& issue : rep.issues)
            if (issue.find("capacity exceeded at facility " +
                           std::to_string(sol.open[0])) != std::string::npos)
                named = true;
        CHECK(named);
    }
}

TEST_CASE("solution JSON round trips through the documented schema") {
    Instance inst = sample_instance(4);
    Solution sol = oracle_solution(inst);
    sol.record.seed = 99;
    sol.record.config = "exact";
    std::string text = solution_to_json(inst, sol);
    Solution back = solution_from_json(text);
    CHECK(back.feasible == sol.feasible);
    CHECK(back.open == sol.open);
    CHECK(back.assign == sol.assign);
    CHECK(back.value == sol.value);
    CHECK(back.record.seed == 99);
    CHECK(verify_result(inst, back).ok);
}

TEST_CASE("malformed JSON inputs raise exceptions instead of crashing") {
    Instance inst = sample_instance(6);
    std::string good = instance_to_json(inst);
    for (std::size_t cut : {std::size_t(1), good.size() / 3, good.size() - 2})
        CHECK_THROWS(instance_from_json(good.substr(0, cut)));
    CHECK_THROWS(instance_from_json("[]"));
    CHECK_THROWS(instance_from_json("{\"n_facilities\": -1, \"n_clients\": 2}"));
    std::string negative = good;
    auto pos = negative.find("\"dist\": [\n    0,");
    if (pos != std::string::npos) negative.replace(pos, 16, "\"dist\": [\n    -1,");
    CHECK_THROWS(instance_from_json(negative));
    CHECK_THROWS(solution_from_json("{\"feasible\": true}"));
}

TEST_CASE("solvers report unreachable clients as infeasible") {
    Instance inst = sample_instance(7);
    for (int i = 0; i < inst.n_facilities; ++i) {
        inst.space.at(i, inst.client_point(0)) = Dist::inf();
        inst.space.at(inst.client_point(0), i) = Dist::inf();
    }
    CHECK(!exact_solve(inst).feasible);
    MnckcConfig cfg;
    Rng rng(3);
    Solution sol = run_mnckc(inst, cfg, rng);
    CHECK(!sol.feasible);
    CHECK(!sol.infeasible_reason.empty());
}

TEST_CASE("same seed and config reproduce byte-identical result JSON") {
    Instance inst = sample_instance(5);
    set_instance_norm(inst, NormSpec::top(Rat(2)));
    MnckcConfig cfg;
    Rng rng1(42), rng2(42);
    Solution a = run_mnckc(inst, cfg, rng1);
    Solution b = run_mnckc(inst, cfg, rng2);
    CHECK(solution_to_json(inst, a) == solution_to_json(inst, b));
}
