// Compares the serial reference evaluation path against the OpenMP one, plus
// the single-search kernel they both run.

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "evotune/evolution.hpp"
#include "evotune/syntree.hpp"

using namespace evotune;

namespace {

struct Fixture {
    Benchmark bench = generate_benchmark(0xBE5C, 21);
    ProblemSet problems = make_instances(*bench.domain, bench.problems);
    Budget budget{2'000, {}};

    std::vector<Individual> make_pool(int size) const {
        std::vector<Individual> pool;
        Individual seed;
        seed.strategy = default_strategy(problems.front(), StrategyKind::kGeneral);
        pool.push_back(seed);
        MutationConfig mcfg;
        for (int i = 1; i < size; ++i) {
            Rng rng(derive_seed(0xF00D, 1, static_cast<std::uint64_t>(i)));
            Individual ind;
            ind.strategy = mutate(seed.strategy, mcfg, rng);
            ind.lineage_id = i;
            pool.push_back(std::move(ind));
        }
        return pool;
    }
};

const Fixture& fixture() {
    static Fixture f;
    return f;
}

void BM_SingleSearch(benchmark::State& state) {
    const Fixture& f = fixture();
    const Strategy strategy = default_strategy(f.problems.front(), StrategyKind::kGeneral);
    SearchWorkspace ws;
    std::size_t i = 0;
    for (auto _ : state) {
        SearchOutcome out = best_first_search(f.problems[i % f.problems.size()], strategy,
                                              f.budget, ws);
        benchmark::DoNotOptimize(out);
        ++i;
    }
}

void BM_EvaluatePoolSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    const auto pool_template = f.make_pool(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto pool = pool_template;
        evaluate_pool(pool, f.problems, f.budget, /*jobs=*/1);
        benchmark::DoNotOptimize(pool);
    }
}

void BM_EvaluatePoolParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    const auto pool_template = f.make_pool(static_cast<int>(state.range(0)));
#ifdef _OPENMP
    const int jobs = omp_get_max_threads();
#else
    const int jobs = 1;
#endif
    for (auto _ : state) {
        auto pool = pool_template;
        evaluate_pool(pool, f.problems, f.budget, jobs);
        benchmark::DoNotOptimize(pool);
    }
}

} // namespace

BENCHMARK(BM_SingleSearch);
BENCHMARK(BM_EvaluatePoolSerial)->Arg(8)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EvaluatePoolParallel)->Arg(8)->Arg(21)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
