#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "evotune/search.hpp"
#include "evotune/strategy.hpp"
#include "evotune/syntree.hpp"

namespace evotune {

using ProblemSet = std::vector<ProblemInstance>;

// Solved count first; total rules fired (over all problems, failed runs
// included) breaks ties, fewer being better.
struct Fitness {
    std::int64_t solved = 0;
    std::int64_t rules_fired_total = 0;

    bool operator==(const Fitness&) const = default;
};

constexpr bool fitness_better(const Fitness& a, const Fitness& b) noexcept {
    if (a.solved != b.solved) return a.solved > b.solved;
    return a.rules_fired_total < b.rules_fired_total;
}

struct Individual {
    Strategy strategy;
    std::optional<Fitness> fitness; // cached; computed at most once per run
    int birth_generation = 0;
    std::int64_t lineage_id = 0;     // unique, monotone by creation order
    std::int64_t parent_lineage = -1; // single parent; there is no crossover
};

struct EvolutionConfig {
    int generations = 40;
    int survivors = 20;
    int champion_mutants = 2;     // extra mutated children for the best survivor
    int non_champion_mutants = 1; // mutated children for every other survivor
    Budget budget;
    MutationConfig mutation;
    StrategyKind kind = StrategyKind::kGeneral;
    std::uint64_t master_seed = 0;
    // Pool building per the pseudocode variant: every survivor gets exactly
    // one mutant (pool 2*survivors) instead of the champion-weighted default.
    bool algorithm1_mode = false;
};

struct GenerationRecord {
    int generation = 0;
    Fitness best;
    std::int64_t champion_lineage = 0;
    std::vector<Fitness> population; // fitness of the whole evaluation pool
    double wall_seconds = 0.0;
};

struct EvolutionTrace {
    std::vector<GenerationRecord> generations; // one record per generation, 0 included
};

// Per-problem searches for one strategy. jobs > 1 runs them in an OpenMP
// loop; jobs == 1 is the serial reference path. Results are identical either
// way (searches are pure and get reduced in problem order).
std::vector<SearchOutcome> evaluate_outcomes(const Strategy& strategy, const ProblemSet& problems,
                                             const Budget& budget, int jobs = 1);

Fitness evaluate_fitness(const Strategy& strategy, const ProblemSet& problems,
                         const Budget& budget, int jobs = 1);

// Fills in every missing fitness in the pool; cached values are never
// recomputed. Returns how many individuals were evaluated.
int evaluate_pool(std::vector<Individual>& pool, const ProblemSet& problems, const Budget& budget,
                  int jobs = 1);

// Best `survivors` individuals, best first. Ties beyond the fitness order go
// to the smaller (older) lineage id. Requires cached fitness everywhere.
std::vector<Individual> select(std::vector<Individual> pool, int survivors);

// Builds the next evaluation pool from survivors sorted best-first. Unmutated
// copies keep their identity and cached fitness; mutants draw their rng
// stream from (master_seed, generation, pool index).
std::vector<Individual> next_generation(const std::vector<Individual>& survivors,
                                        const EvolutionConfig& cfg, int generation,
                                        std::int64_t& lineage_counter);

using GenerationObserver = std::function<void(int generation, const Individual& champion)>;

// The full evolution loop. Generation 0 is the domain's default strategy plus
// survivors-1 single-step mutants of it. Returns the trace and the final
// champion's strategy.
std::pair<EvolutionTrace, Strategy> evolve(const ProblemSet& problems, const EvolutionConfig& cfg,
                                           int jobs = 1, const GenerationObserver& observer = {});

// CSV: generation,best_solved,best_rules_fired,champion_lineage_id
void write_trace_csv(const EvolutionTrace& trace, std::ostream& sink);

} // namespace evotune
