#include <benchmark/benchmark.h>

#include "normclust/lp_seed.hpp"
#include "normclust/mnckc.hpp"
#include "normclust/occurrence.hpp"
#include "normclust/oracle.hpp"
#include "normclust/topcn.hpp"

using namespace normclust;

namespace {

Instance bench_instance(int nf, int nc, int k, bool capacitated, std::uint64_t seed = 7) {
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

static void BM_ExactSolve(benchmark::State& state) {
    Instance inst = bench_instance(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)), 3, true);
    set_instance_norm(inst, NormSpec::top(Rat(2)));
    for (auto _ : state) {
        ExactResult res = exact_solve(inst);
        benchmark::DoNotOptimize(res.opt_value);
    }
}
BENCHMARK(BM_ExactSolve)->Args({6, 8})->Args({8, 12})->Args({10, 14})->Unit(benchmark::kMillisecond);

static void BM_SolveCp(benchmark::State& state) {
    Instance inst = bench_instance(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)), 3, true);
    for (auto _ : state) {
        FractionalSolution frac = solve_cp(inst, Rat(5));
        benchmark::DoNotOptimize(frac.objective);
    }
}
BENCHMARK(BM_SolveCp)->Args({6, 8})->Args({8, 12})->Unit(benchmark::kMillisecond);

static void BM_SampleStars(benchmark::State& state) {
    Instance inst = bench_instance(8, 12, 3, true);
    FractionalSolution frac = solve_cp(inst, Rat(0));
    Rng rng(3);
    for (auto _ : state) {
        StarSet stars = sample_stars(inst, frac, Rat(1, 5), {}, rng);
        benchmark::DoNotOptimize(stars.covered);
    }
}
BENCHMARK(BM_SampleStars)->Unit(benchmark::kMicrosecond);

static void BM_PivotLp(benchmark::State& state) {
    Instance inst = bench_instance(4, static_cast<int>(state.range(0)), 2, false);
    PivotGuess guess;
    guess.pivots = {0, 1};
    guess.radii = {Rat(40), Rat(40)};
    for (auto _ : state) {
        PivotLpSolution sol = solve_pivot_lp(inst, guess, Rat(1), Rat(1, 5));
        benchmark::DoNotOptimize(sol.value);
    }
}
BENCHMARK(BM_PivotLp)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

static void BM_RunMnckcLinf(benchmark::State& state) {
    Instance inst = bench_instance(static_cast<int>(state.range(0)),
                                   static_cast<int>(state.range(1)), 2, true);
    set_instance_norm(inst, NormSpec::linf());
    MnckcConfig cfg;
    for (auto _ : state) {
        Rng rng(11);
        Solution sol = run_mnckc(inst, cfg, rng);
        benchmark::DoNotOptimize(sol.value);
    }
}
BENCHMARK(BM_RunMnckcLinf)->Args({5, 7})->Args({8, 12})->Unit(benchmark::kMillisecond);

static void BM_RunTopcn(benchmark::State& state) {
    Instance inst = bench_instance(4, 6, 2, false);
    set_instance_norm(inst, NormSpec::top(Rat(6)));
    TopcnConfig cfg;
    cfg.c = 1;
    for (auto _ : state) {
        Rng rng(5);
        Solution sol = run_topcn(inst, cfg, rng);
        benchmark::DoNotOptimize(sol.value);
    }
}
BENCHMARK(BM_RunTopcn)->Unit(benchmark::kMillisecond);

static void BM_OccurrenceTopL(benchmark::State& state) {
    Rng rng(9);
    std::vector<OccurrenceVector> vecs;
    for (int i = 0; i < 64; ++i) {
        OccurrenceVector v;
        for (int s = 0; s < 8; ++s) v.add(Rat(rng.next_below(50)), Rat(1 + rng.next_below(5)));
        vecs.push_back(std::move(v));
    }
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& v = vecs[i++ % vecs.size()];
        benchmark::DoNotOptimize(occ_top_l(v, v.total_mass() / 2));
    }
}
BENCHMARK(BM_OccurrenceTopL);

static void BM_Dominates(benchmark::State& state) {
    Rng rng(13);
    OccurrenceVector a, b;
    for (int s = 0; s < 10; ++s) {
        a.add(Rat(rng.next_below(40)), Rat(1, 3));
        b.add(Rat(rng.next_below(40)), Rat(1, 3));
    }
    for (auto _ : state) benchmark::DoNotOptimize(dominates(a, b, Rat(3)));
}
BENCHMARK(BM_Dominates);

BENCHMARK_MAIN();
