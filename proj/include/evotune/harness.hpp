#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "evotune/evolution.hpp"
#include "evotune/syntree.hpp"

namespace evotune {

struct SplitSpec {
    std::uint64_t split_seed = 0;
    double train_fraction = 0.5;
};

// Deterministic shuffle by split_seed; the first ceil(fraction * N) problems
// train, the rest validate. Throws if either side would be empty.
std::pair<std::vector<Problem>, std::vector<Problem>> random_split(const Benchmark& bench,
                                                                   const SplitSpec& spec);

struct CrossValCell {
    Fitness training_best;
    int validation_unsolved = 0;
};

struct CrossValRepetition {
    std::uint64_t split_seed = 0;
    int train_size = 0;
    int valid_size = 0;
    std::vector<CrossValCell> per_generation; // generations + 1 entries
    EvolutionTrace trace;
};

struct CrossValReport {
    std::string benchmark_name;
    EvolutionConfig config;
    std::uint64_t base_split_seed = 0;
    double train_fraction = 0.5;
    std::vector<CrossValRepetition> repetitions;
};

// Repetition r splits with seed base_split_seed + r, evolves on the training
// half, and scores each generation's training champion on the validation half.
// Validation scoring only observes the run; the evolution trace is identical
// to a plain evolve on the same training set.
CrossValReport cross_validate(const Benchmark& bench, const EvolutionConfig& cfg, int repeats,
                              const SplitSpec& base_spec, int jobs = 1);

// CSV: repetition,generation,kind,train_size,valid_size,validation_unsolved,
//      train_solved,train_rules_fired
void write_report_csv(const CrossValReport& report, std::ostream& sink);

// One series per report (keyed by mutation kind): mean validation unsolved
// over the repetitions, sampled at generations {0,10,20,30,40}.
void write_plot_data(std::span<const CrossValReport> reports, std::ostream& sink);

// The same series rendered as a static SVG line chart.
void write_plot_svg(std::span<const CrossValReport> reports, std::ostream& sink);

} // namespace evotune
