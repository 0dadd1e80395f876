#include "evotune/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

namespace evotune {

std::pair<std::vector<Problem>, std::vector<Problem>> random_split(const Benchmark& bench,
                                                                   const SplitSpec& spec) {
    const std::size_t n = bench.problems.size();
    if (n < 2) throw std::invalid_argument("random_split: need at least 2 problems");
    if (!(spec.train_fraction > 0.0) || !(spec.train_fraction < 1.0)) {
        throw std::invalid_argument("random_split: train_fraction must be in (0, 1)");
    }
    const auto n_train =
        static_cast<std::size_t>(std::ceil(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n) {
        throw std::invalid_argument("random_split: split leaves an empty partition");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(hash_combine(spec.split_seed, kSplitTag));
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
        std::swap(order[i], order[j]);
    }

    std::pair<std::vector<Problem>, std::vector<Problem>> out;
    out.first.reserve(n_train);
    out.second.reserve(n - n_train);
    for (std::size_t i = 0; i < n; ++i) {
        (i < n_train ? out.first : out.second).push_back(bench.problems[order[i]]);
    }
    return out;
}

CrossValReport cross_validate(const Benchmark& bench, const EvolutionConfig& cfg, int repeats,
                              const SplitSpec& base_spec, int jobs) {
    if (repeats < 1) throw std::invalid_argument("cross_validate: repeats must be >= 1");
    CrossValReport report;
    report.benchmark_name = bench.name;
    report.config = cfg;
    report.base_split_seed = base_spec.split_seed;
    report.train_fraction = base_spec.train_fraction;

    for (int r = 0; r < repeats; ++r) {
        SplitSpec spec{base_spec.split_seed + static_cast<std::uint64_t>(r),
                       base_spec.train_fraction};
        auto [train, valid] = random_split(bench, spec);
        const ProblemSet train_set = make_instances(*bench.domain, train);
        const ProblemSet valid_set = make_instances(*bench.domain, valid);

        CrossValRepetition rep;
        rep.split_seed = spec.split_seed;
        rep.train_size = static_cast<int>(train.size());
        rep.valid_size = static_cast<int>(valid.size());
        rep.per_generation.resize(static_cast<std::size_t>(cfg.generations) + 1);

        const GenerationObserver observer = [&](int generation, const Individual& champion) {
            const Fitness on_valid =
                evaluate_fitness(champion.strategy, valid_set, cfg.budget, jobs);
            CrossValCell& cell = rep.per_generation[static_cast<std::size_t>(generation)];
            cell.training_best = *champion.fitness;
            cell.validation_unsolved = static_cast<int>(valid_set.size()) -
                                       static_cast<int>(on_valid.solved);
        };
        rep.trace = evolve(train_set, cfg, jobs, observer).first;
        report.repetitions.push_back(std::move(rep));
    }
    return report;
}

void write_report_csv(const CrossValReport& report, std::ostream& sink) {
    sink << "repetition,generation,kind,train_size,valid_size,validation_unsolved,"
            "train_solved,train_rules_fired\n";
    const std::string kind = to_string(report.config.kind);
    for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
        const CrossValRepetition& rep = report.repetitions[r];
        for (std::size_t g = 0; g < rep.per_generation.size(); ++g) {
            const CrossValCell& cell = rep.per_generation[g];
            sink << r << ',' << g << ',' << kind << ',' << rep.train_size << ','
                 << rep.valid_size << ',' << cell.validation_unsolved << ','
                 << cell.training_best.solved << ',' << cell.training_best.rules_fired_total
                 << '\n';
        }
    }
}

namespace {

std::vector<int> plot_generations(int generations) {
    std::vector<int> out;
    for (int g : {0, 10, 20, 30, 40}) {
        if (g <= generations) out.push_back(g);
    }
    return out;
}

double mean_validation_unsolved(const CrossValReport& report, int generation) {
    double sum = 0.0;
    for (const CrossValRepetition& rep : report.repetitions) {
        sum += rep.per_generation[static_cast<std::size_t>(generation)].validation_unsolved;
    }
    return sum / static_cast<double>(report.repetitions.size());
}

std::string format_mean(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

void write_plot_data(std::span<const CrossValReport> reports, std::ostream& sink) {
    sink << "kind,generation,mean_validation_unsolved\n";
    for (const CrossValReport& report : reports) {
        for (int g : plot_generations(report.config.generations)) {
            sink << to_string(report.config.kind) << ',' << g << ','
                 << format_mean(mean_validation_unsolved(report, g)) << '\n';
        }
    }
}

void write_plot_svg(std::span<const CrossValReport> reports, std::ostream& sink) {
    constexpr int kWidth = 640, kHeight = 420;
    constexpr int kLeft = 60, kRight = 40, kTop = 40, kBottom = 50;
    constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

    int max_gen = 1;
    double max_y = 1.0;
    for (const CrossValReport& report : reports) {
        for (int g : plot_generations(report.config.generations)) {
            max_gen = std::max(max_gen, g);
            max_y = std::max(max_y, mean_validation_unsolved(report, g));
        }
    }
    max_y = std::ceil(max_y) + 1.0;

    const auto x_of = [&](double g) {
        return kLeft + g / max_gen * (kWidth - kLeft - kRight);
    };
    const auto y_of = [&](double v) {
        return kHeight - kBottom - v / max_y * (kHeight - kTop - kBottom);
    };

    sink << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
         << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
         << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\""
         << kWidth - kRight << "\" y2=\"" << kHeight - kBottom
         << "\" stroke=\"black\"/>\n"
         << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
         << kHeight - kBottom << "\" stroke=\"black\"/>\n";
    sink << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 12
         << "\" text-anchor=\"middle\" font-size=\"13\">generation</text>\n";
    sink << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2
         << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
         << (kTop + kHeight - kBottom) / 2 << ")\">mean validation unsolved</text>\n";
    for (int g : {0, 10, 20, 30, 40}) {
        if (g > max_gen) break;
        sink << "<text x=\"" << x_of(g) << "\" y=\"" << kHeight - kBottom + 18
             << "\" text-anchor=\"middle\" font-size=\"11\">" << g << "</text>\n";
    }
    const int y_ticks = 5;
    for (int t = 0; t <= y_ticks; ++t) {
        const double v = max_y * t / y_ticks;
        sink << "<text x=\"" << kLeft - 8 << "\" y=\"" << y_of(v) + 4
             << "\" text-anchor=\"end\" font-size=\"11\">" << format_mean(v) << "</text>\n";
    }

    int series = 0;
    for (const CrossValReport& report : reports) {
        const char* color = kColors[series % 4];
        sink << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (int g : plot_generations(report.config.generations)) {
            sink << x_of(g) << ',' << y_of(mean_validation_unsolved(report, g)) << ' ';
        }
        sink << "\"/>\n";
        sink << "<text x=\"" << kWidth - kRight - 4 << "\" y=\"" << kTop + 16 * series
             << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << color << "\">"
             << to_string(report.config.kind) << "</text>\n";
        ++series;
    }
    sink << "</svg>\n";
}

} // namespace evotune
