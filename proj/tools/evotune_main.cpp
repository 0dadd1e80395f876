// evotune: evolve and evaluate best-first search strategies on the built-in
// syntree benchmark domain.
//
// Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 internal error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "evotune/errors.hpp"
#include "evotune/evolution.hpp"
#include "evotune/harness.hpp"
#include "evotune/search.hpp"
#include "evotune/strategy.hpp"
#include "evotune/syntree.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace evotune;

namespace {

constexpr const char* kOutDirEnv = "EVOTUNE_OUT_DIR";

std::string default_out_dir() {
    const char* env = std::getenv(kOutDirEnv);
    return env && *env ? env : ".";
}

// --config accepts a JSON object whose keys mirror the long flag names
// (without dashes). Values apply only where the flag was not given on the
// command line.
void apply_config_file(CLI::App& cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(std::string("config file: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("config file: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        CLI::Option* opt = cmd.get_option_no_throw("--" + key);
        if (!opt) {
            throw ParseError("config file: unknown option '" + key + "' for subcommand '" +
                             cmd.get_name() + "'");
        }
        if (opt->count() > 0) continue; // explicit flag wins
        std::string text;
        if (value.is_string()) {
            text = value.get<std::string>();
        } else {
            text = value.dump();
        }
        const auto result = opt->add_result(text);
        (void)result;
        opt->run_callback();
    }
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ParseError("cannot create output directory '" + dir + "': " + ec.message());
}

void write_text_file(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    fn(out);
    if (!out) throw ParseError("failed writing '" + path + "'");
}

Budget make_budget(std::int64_t max_expansions, std::int64_t wall_clock_ms) {
    Budget b;
    b.max_expansions = max_expansions;
    if (wall_clock_ms > 0) b.wall_clock_ms = wall_clock_ms;
    return b;
}

struct GenProblemsArgs {
    std::uint64_t seed = 0;
    int count = 65;
    std::string out = "benchmark.json";
    std::string name;
};

int cmd_gen_problems(const GenProblemsArgs& a) {
    if (a.count < 1) throw std::invalid_argument("--count must be >= 1");
    const Benchmark bench = generate_benchmark(a.seed, a.count, DomainSpec{}, a.name);
    save_benchmark_file(bench, a.out);

    std::map<int, int> per_category;
    for (const Problem& p : bench.problems) ++per_category[p.category];
    std::cout << "wrote " << bench.problems.size() << " problems to " << a.out << '\n';
    for (const auto& [cat, n] : per_category) {
        std::cout << "  " << bench.domain->spec().categories[static_cast<std::size_t>(cat)].tag
                  << ": " << n << '\n';
    }
    return 0;
}

struct EvolveArgs {
    std::string benchmark;
    std::string kind = "general";
    int generations = 40;
    std::int64_t budget = 10'000;
    std::uint64_t seed = 0;
    bool algorithm1_mode = false;
    std::string out_dir = default_out_dir();
    int jobs = 1;
    std::int64_t wall_clock_ms = 0;
};

int cmd_evolve(const EvolveArgs& a) {
    const Benchmark bench = load_benchmark_file(a.benchmark);
    const ProblemSet problems = make_instances(*bench.domain, bench.problems);

    EvolutionConfig cfg;
    cfg.generations = a.generations;
    cfg.kind = strategy_kind_from_string(a.kind);
    cfg.budget = make_budget(a.budget, a.wall_clock_ms);
    cfg.master_seed = a.seed;
    cfg.algorithm1_mode = a.algorithm1_mode;

    const auto [trace, best] = evolve(problems, cfg, a.jobs);

    ensure_dir(a.out_dir);
    const std::string trace_path = (fs::path(a.out_dir) / "trace.csv").string();
    const std::string strategy_path = (fs::path(a.out_dir) / "strategy.json").string();
    write_text_file(trace_path, [&](std::ostream& os) { write_trace_csv(trace, os); });
    save_strategy_file(best, strategy_path);

    const GenerationRecord& last = trace.generations.back();
    std::cout << "evolved " << to_string(cfg.kind) << " strategy for " << a.generations
              << " generations on " << problems.size() << " problems\n"
              << "best fitness: solved " << last.best.solved << '/' << problems.size()
              << ", rules fired " << last.best.rules_fired_total << '\n'
              << "trace: " << trace_path << "\nstrategy: " << strategy_path << '\n';
    return 0;
}

struct CrossvalArgs {
    std::string benchmark;
    std::string kind = "general";
    int generations = 40;
    std::int64_t budget = 10'000;
    int repeats = 4;
    double train_fraction = 0.5;
    std::uint64_t seed = 0;
    bool algorithm1_mode = false;
    std::string out_dir = default_out_dir();
    int jobs = 1;
    std::int64_t wall_clock_ms = 0;
};

int cmd_crossval(const CrossvalArgs& a) {
    const Benchmark bench = load_benchmark_file(a.benchmark);

    EvolutionConfig cfg;
    cfg.generations = a.generations;
    cfg.kind = strategy_kind_from_string(a.kind);
    cfg.budget = make_budget(a.budget, a.wall_clock_ms);
    cfg.master_seed = a.seed;
    cfg.algorithm1_mode = a.algorithm1_mode;

    const SplitSpec base{a.seed, a.train_fraction};
    const CrossValReport report = cross_validate(bench, cfg, a.repeats, base, a.jobs);

    ensure_dir(a.out_dir);
    const std::string report_path = (fs::path(a.out_dir) / "report.csv").string();
    const std::string plot_path = (fs::path(a.out_dir) / "plot.csv").string();
    const std::string svg_path = (fs::path(a.out_dir) / "plot.svg").string();
    const CrossValReport reports[] = {report};
    write_text_file(report_path, [&](std::ostream& os) { write_report_csv(report, os); });
    write_text_file(plot_path, [&](std::ostream& os) { write_plot_data(reports, os); });
    write_text_file(svg_path, [&](std::ostream& os) { write_plot_svg(reports, os); });

    std::cout << "cross-validated " << to_string(cfg.kind) << " over " << a.repeats
              << " repetitions\n";
    for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
        const CrossValRepetition& rep = report.repetitions[r];
        std::cout << "  repetition " << r << ": validation unsolved "
                  << rep.per_generation.front().validation_unsolved << " -> "
                  << rep.per_generation.back().validation_unsolved << " of " << rep.valid_size
                  << '\n';
    }
    std::cout << "report: " << report_path << "\nplot data: " << plot_path
              << "\nplot: " << svg_path << '\n';
    return 0;
}

struct EvalArgs {
    std::string benchmark;
    std::string strategy;
    std::int64_t budget = 10'000;
    std::string out;
    int jobs = 1;
    std::int64_t wall_clock_ms = 0;
};

int cmd_eval(const EvalArgs& a) {
    const Benchmark bench = load_benchmark_file(a.benchmark);
    const Strategy strategy = load_strategy_file(a.strategy);
    if (strategy.domain_id != bench.domain->domain_id()) {
        throw ConfigError("strategy domain_id '" + strategy.domain_id +
                          "' does not match benchmark domain_id '" + bench.domain->domain_id() +
                          "'");
    }
    const ProblemSet problems = make_instances(*bench.domain, bench.problems);
    check_strategy(problems.front(), strategy);

    const std::vector<SearchOutcome> outcomes =
        evaluate_outcomes(strategy, problems, make_budget(a.budget, a.wall_clock_ms), a.jobs);

    const auto emit = [&](std::ostream& os) {
        os << "problem_id,solved,rules_fired,nodes_expanded\n";
        for (std::size_t i = 0; i < problems.size(); ++i) {
            os << problems[i].problem().problem_id << ',' << (outcomes[i].solved ? 1 : 0) << ','
               << outcomes[i].rules_fired << ',' << outcomes[i].nodes_expanded << '\n';
        }
    };
    if (a.out.empty()) {
        emit(std::cout);
    } else {
        write_text_file(a.out, emit);
        std::int64_t solved = 0;
        for (const SearchOutcome& o : outcomes) solved += o.solved ? 1 : 0;
        std::cout << "solved " << solved << '/' << problems.size() << "; results: " << a.out
                  << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evolutionary tuning of best-first search strategies"};
    app.require_subcommand(1);

    GenProblemsArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen-problems", "generate a benchmark file");
    gen->add_option("--seed", gen_args.seed, "generator seed");
    gen->add_option("--count", gen_args.count, "number of problems")->capture_default_str();
    gen->add_option("--out", gen_args.out, "output path")->capture_default_str();
    gen->add_option("--name", gen_args.name, "benchmark name");

    EvolveArgs evolve_args;
    CLI::App* ev = app.add_subcommand("evolve", "evolve a strategy on a full benchmark");
    ev->add_option("--benchmark", evolve_args.benchmark, "benchmark file")->required();
    ev->add_option("--kind", evolve_args.kind, "order|general|goal")->capture_default_str();
    ev->add_option("--generations", evolve_args.generations)->capture_default_str();
    ev->add_option("--budget", evolve_args.budget, "max node expansions per search")
        ->capture_default_str();
    ev->add_option("--seed", evolve_args.seed, "master seed");
    ev->add_flag("--algorithm1-mode", evolve_args.algorithm1_mode,
                 "one mutant per survivor instead of champion weighting");
    ev->add_option("--out-dir", evolve_args.out_dir, "output directory ($" +
                                                         std::string(kOutDirEnv) + ")")
        ->capture_default_str();
    ev->add_option("--jobs", evolve_args.jobs, "worker threads")->capture_default_str();
    ev->add_option("--wall-clock-ms", evolve_args.wall_clock_ms,
                   "optional per-search wall-clock ceiling (nondeterministic)");

    CrossvalArgs cv_args;
    CLI::App* cv = app.add_subcommand("crossval", "train/validation cross-validation runs");
    cv->add_option("--benchmark", cv_args.benchmark, "benchmark file")->required();
    cv->add_option("--kind", cv_args.kind, "order|general|goal")->capture_default_str();
    cv->add_option("--generations", cv_args.generations)->capture_default_str();
    cv->add_option("--budget", cv_args.budget)->capture_default_str();
    cv->add_option("--repeats", cv_args.repeats)->capture_default_str();
    cv->add_option("--train-fraction", cv_args.train_fraction)->capture_default_str();
    cv->add_option("--seed", cv_args.seed, "base split seed and master seed");
    cv->add_flag("--algorithm1-mode", cv_args.algorithm1_mode);
    cv->add_option("--out-dir", cv_args.out_dir)->capture_default_str();
    cv->add_option("--jobs", cv_args.jobs)->capture_default_str();
    cv->add_option("--wall-clock-ms", cv_args.wall_clock_ms);

    EvalArgs eval_args;
    CLI::App* evl = app.add_subcommand("eval", "evaluate one strategy file on a benchmark");
    evl->add_option("--benchmark", eval_args.benchmark)->required();
    evl->add_option("--strategy", eval_args.strategy)->required();
    evl->add_option("--budget", eval_args.budget)->capture_default_str();
    evl->add_option("--out", eval_args.out, "output CSV (stdout when omitted)");
    evl->add_option("--jobs", eval_args.jobs)->capture_default_str();
    evl->add_option("--wall-clock-ms", eval_args.wall_clock_ms);

    std::string config_path;
    for (CLI::App* sub : {gen, ev, cv, evl}) {
        sub->add_option("--config", config_path, "JSON file mirroring the long flag names");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config_path.empty()) apply_config_file(*sub, config_path);
        if (sub == gen) return cmd_gen_problems(gen_args);
        if (sub == ev) return cmd_evolve(evolve_args);
        if (sub == cv) return cmd_crossval(cv_args);
        return cmd_eval(eval_args);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
}
