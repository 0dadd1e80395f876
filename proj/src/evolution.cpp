#include "evotune/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace evotune {

std::vector<SearchOutcome> evaluate_outcomes(const Strategy& strategy, const ProblemSet& problems,
                                             const Budget& budget, int jobs) {
    std::vector<SearchOutcome> outcomes(problems.size());
    const auto n = static_cast<std::int64_t>(problems.size());
    if (jobs <= 1) {
        SearchWorkspace ws;
        for (std::int64_t i = 0; i < n; ++i) {
            outcomes[static_cast<std::size_t>(i)] =
                best_first_search(problems[static_cast<std::size_t>(i)], strategy, budget, ws);
        }
    } else {
#pragma omp parallel num_threads(jobs)
        {
            SearchWorkspace ws;
#pragma omp for schedule(dynamic)
            for (std::int64_t i = 0; i < n; ++i) {
                outcomes[static_cast<std::size_t>(i)] =
                    best_first_search(problems[static_cast<std::size_t>(i)], strategy, budget, ws);
            }
        }
    }
    return outcomes;
}

Fitness evaluate_fitness(const Strategy& strategy, const ProblemSet& problems,
                         const Budget& budget, int jobs) {
    if (problems.empty()) throw std::invalid_argument("evaluate_fitness: empty problem set");
    Fitness f;
    for (const SearchOutcome& o : evaluate_outcomes(strategy, problems, budget, jobs)) {
        f.solved += o.solved ? 1 : 0;
        f.rules_fired_total += o.rules_fired;
    }
    return f;
}

namespace {

struct TaskResult {
    std::int64_t solved = 0;
    std::int64_t rules = 0;
};

TaskResult run_task(const ProblemInstance& problem, const Strategy& strategy,
                    const Budget& budget, SearchWorkspace& ws) {
    const SearchOutcome o = best_first_search(problem, strategy, budget, ws);
    return {o.solved ? std::int64_t{1} : 0, o.rules_fired};
}

} // namespace

int evaluate_pool(std::vector<Individual>& pool, const ProblemSet& problems, const Budget& budget,
                  int jobs) {
    if (problems.empty()) throw std::invalid_argument("evaluate_pool: empty problem set");
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!pool[i].fitness) todo.push_back(i);
    }
    const std::int64_t n_problems = static_cast<std::int64_t>(problems.size());
    const std::int64_t n_tasks = static_cast<std::int64_t>(todo.size()) * n_problems;
    std::vector<TaskResult> results(static_cast<std::size_t>(n_tasks));

    // One flat task per (individual, problem) pair; each task is an
    // independent search, so the schedule cannot change the results.
    if (jobs <= 1) {
        SearchWorkspace ws;
        for (std::int64_t k = 0; k < n_tasks; ++k) {
            const Individual& ind = pool[todo[static_cast<std::size_t>(k / n_problems)]];
            results[static_cast<std::size_t>(k)] =
                run_task(problems[static_cast<std::size_t>(k % n_problems)], ind.strategy, budget, ws);
        }
    } else {
#pragma omp parallel num_threads(jobs)
        {
            SearchWorkspace ws;
#pragma omp for schedule(dynamic)
            for (std::int64_t k = 0; k < n_tasks; ++k) {
                const Individual& ind = pool[todo[static_cast<std::size_t>(k / n_problems)]];
                results[static_cast<std::size_t>(k)] = run_task(
                    problems[static_cast<std::size_t>(k % n_problems)], ind.strategy, budget, ws);
            }
        }
    }

    for (std::size_t t = 0; t < todo.size(); ++t) {
        Fitness f;
        for (std::int64_t p = 0; p < n_problems; ++p) {
            const TaskResult& r = results[t * static_cast<std::size_t>(n_problems) +
                                          static_cast<std::size_t>(p)];
            f.solved += r.solved;
            f.rules_fired_total += r.rules;
        }
        pool[todo[t]].fitness = f;
    }
    return static_cast<int>(todo.size());
}

std::vector<Individual> select(std::vector<Individual> pool, int survivors) {
    if (pool.empty()) throw std::invalid_argument("select: empty pool");
    if (survivors < 1) throw std::invalid_argument("select: survivors must be >= 1");
    for (const Individual& ind : pool) {
        if (!ind.fitness) {
            throw std::logic_error("select: individual " + std::to_string(ind.lineage_id) +
                                   " has no cached fitness; evaluation must precede selection");
        }
    }
    std::sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
        if (*a.fitness != *b.fitness) return fitness_better(*a.fitness, *b.fitness);
        return a.lineage_id < b.lineage_id;
    });
    if (pool.size() > static_cast<std::size_t>(survivors)) {
        pool.resize(static_cast<std::size_t>(survivors));
    }
    return pool;
}

namespace {

Individual make_mutant(const Individual& parent, const EvolutionConfig& cfg, int generation,
                       std::size_t pool_index, std::int64_t& lineage_counter) {
    Rng rng(derive_seed(cfg.master_seed, static_cast<std::uint64_t>(generation),
                        static_cast<std::uint64_t>(pool_index)));
    Individual child;
    child.strategy = mutate(parent.strategy, cfg.mutation, rng);
    child.birth_generation = generation;
    child.lineage_id = lineage_counter++;
    child.parent_lineage = parent.lineage_id;
    return child;
}

} // namespace

std::vector<Individual> next_generation(const std::vector<Individual>& survivors,
                                        const EvolutionConfig& cfg, int generation,
                                        std::int64_t& lineage_counter) {
    if (survivors.empty()) throw std::invalid_argument("next_generation: no survivors");
    std::vector<Individual> pool;
    if (cfg.algorithm1_mode) {
        // Pseudocode variant: copy the whole population, then one mutant each.
        pool.reserve(survivors.size() * 2);
        for (const Individual& s : survivors) pool.push_back(s);
        for (const Individual& s : survivors) {
            pool.push_back(make_mutant(s, cfg, generation, pool.size(), lineage_counter));
        }
        return pool;
    }
    // Champion-weighted default: the best survivor gets champion_mutants
    // children, everyone else non_champion_mutants.
    pool.reserve(survivors.size() * (1 + static_cast<std::size_t>(cfg.non_champion_mutants)) +
                 static_cast<std::size_t>(cfg.champion_mutants));
    pool.push_back(survivors.front());
    for (int m = 0; m < cfg.champion_mutants; ++m) {
        pool.push_back(make_mutant(survivors.front(), cfg, generation, pool.size(), lineage_counter));
    }
    for (std::size_t s = 1; s < survivors.size(); ++s) {
        pool.push_back(survivors[s]);
        for (int m = 0; m < cfg.non_champion_mutants; ++m) {
            pool.push_back(make_mutant(survivors[s], cfg, generation, pool.size(), lineage_counter));
        }
    }
    return pool;
}

namespace {

void validate_config(const EvolutionConfig& cfg) {
    if (cfg.survivors < 1) throw std::invalid_argument("evolve: survivors must be >= 1");
    if (cfg.generations < 0) throw std::invalid_argument("evolve: generations must be >= 0");
    if (cfg.non_champion_mutants < 0 || cfg.champion_mutants < cfg.non_champion_mutants) {
        throw std::invalid_argument(
            "evolve: need champion_mutants >= non_champion_mutants >= 0");
    }
    if (cfg.budget.max_expansions < 1) {
        throw std::invalid_argument("evolve: budget.max_expansions must be >= 1");
    }
}

GenerationRecord record_generation(int generation, const std::vector<Individual>& pool,
                                   const Individual& champion, double wall_seconds) {
    GenerationRecord rec;
    rec.generation = generation;
    rec.best = *champion.fitness;
    rec.champion_lineage = champion.lineage_id;
    rec.population.reserve(pool.size());
    for (const Individual& ind : pool) rec.population.push_back(*ind.fitness);
    rec.wall_seconds = wall_seconds;
    return rec;
}

} // namespace

std::pair<EvolutionTrace, Strategy> evolve(const ProblemSet& problems, const EvolutionConfig& cfg,
                                           int jobs, const GenerationObserver& observer) {
    validate_config(cfg);
    if (problems.empty()) throw std::invalid_argument("evolve: empty problem set");

    using clock = std::chrono::steady_clock;
    EvolutionTrace trace;
    std::int64_t lineage_counter = 0;

    // Generation 0: the default strategy seeded with survivors-1 mutants of it.
    auto t0 = clock::now();
    std::vector<Individual> pool;
    Individual seed;
    seed.strategy = default_strategy(problems.front(), cfg.kind);
    seed.lineage_id = lineage_counter++;
    pool.push_back(std::move(seed));
    for (int i = 1; i < cfg.survivors; ++i) {
        pool.push_back(make_mutant(pool.front(), cfg, 0, pool.size(), lineage_counter));
    }
    evaluate_pool(pool, problems, cfg.budget, jobs);
    std::vector<Individual> survivors = select(pool, cfg.survivors);
    trace.generations.push_back(record_generation(
        0, pool, survivors.front(), std::chrono::duration<double>(clock::now() - t0).count()));
    if (observer) observer(0, survivors.front());

    for (int g = 1; g <= cfg.generations; ++g) {
        t0 = clock::now();
        std::vector<Individual> next = next_generation(survivors, cfg, g, lineage_counter);
        evaluate_pool(next, problems, cfg.budget, jobs);
        survivors = select(next, cfg.survivors);
        trace.generations.push_back(
            record_generation(g, next, survivors.front(),
                              std::chrono::duration<double>(clock::now() - t0).count()));
        if (observer) observer(g, survivors.front());
    }
    return {std::move(trace), survivors.front().strategy};
}

void write_trace_csv(const EvolutionTrace& trace, std::ostream& sink) {
    sink << "generation,best_solved,best_rules_fired,champion_lineage_id\n";
    for (const GenerationRecord& rec : trace.generations) {
        sink << rec.generation << ',' << rec.best.solved << ',' << rec.best.rules_fired_total
             << ',' << rec.champion_lineage << '\n';
    }
}

} // namespace evotune
