#include "evotune/syntree.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "evotune/errors.hpp"
#include "evotune/search.hpp"

namespace evotune {

using nlohmann::json;

std::vector<CategoryParams> DomainSpec::default_categories() {
    // Ordered easy to hard: denser branching, deeper planted solutions, fewer
    // background solutions. The first categories have full trees a default
    // budget can enumerate; the last ones do not, so solving them within
    // budget depends on the strategy.
    return {
        {"ints", 0.105, 1.0 / 512.0, 1, 3},
        {"sll", 0.115, 1.0 / 1024.0, 2, 4},
        {"srtl", 0.125, 1.0 / 2048.0, 3, 5},
        {"dll", 0.135, 1.0 / 4096.0, 4, 6},
        {"lol", 0.145, 0.0, 5, 7},
        {"tree", 0.160, 0.0, 6, 9},
        {"ptree", 0.175, 0.0, 7, 10},
    };
}

SyntreeDomain::SyntreeDomain(DomainSpec spec) : spec_(std::move(spec)) {
    const DomainSpec& s = spec_;
    if (s.domain_id.empty()) throw ParseError("domain.domain_id: must be non-empty");
    if (s.group_count < 1) throw ParseError("domain.group_count: must be >= 1");
    if (s.rule_count < s.group_count) {
        throw ParseError("domain.rule_count: need at least one rule per group");
    }
    if (s.rule_count > 64) throw ParseError("domain.rule_count: at most 64 rules supported");
    if (s.max_depth < 1 || s.max_depth > 255) {
        throw ParseError("domain.max_depth: must be in [1, 255]");
    }
    if (s.depth_buckets < 1 || s.open_buckets < 1 || s.size_buckets < 1) {
        throw ParseError("domain.buckets: bucket counts must be >= 1");
    }
    if (static_cast<int>(s.planted_rule_weights.size()) != s.rule_count) {
        throw ParseError("domain.planted_rule_weights: need one weight per rule");
    }

    groups_.resize(static_cast<std::size_t>(s.group_count));
    for (int r = 0; r < s.rule_count; ++r) {
        groups_[static_cast<std::size_t>(r % s.group_count)].push_back(r);
    }

    gated_by_.assign(static_cast<std::size_t>(s.rule_count), -1);
    for (const GatePair& gp : s.gate_pairs) {
        if (gp.gated < 0 || gp.gated >= s.rule_count || gp.gating < 0 ||
            gp.gating >= s.rule_count) {
            throw ParseError("domain.gate_pairs: rule id out of range");
        }
        if (gp.gated == gp.gating) {
            throw ParseError("domain.gate_pairs: a rule cannot gate itself");
        }
        if (gated_by_[static_cast<std::size_t>(gp.gated)] != -1) {
            throw ParseError("domain.gate_pairs: rule " + std::to_string(gp.gated) +
                             " gated twice");
        }
        gated_by_[static_cast<std::size_t>(gp.gated)] = gp.gating;
    }

    if (spec_.categories.empty()) throw ParseError("domain.categories: must be non-empty");
    std::set<std::string> tags;
    for (std::size_t i = 0; i < spec_.categories.size(); ++i) {
        const CategoryParams& c = spec_.categories[i];
        const std::string where = "domain.categories[" + std::to_string(i) + "]";
        if (c.tag.empty() || !tags.insert(c.tag).second) {
            throw ParseError(where + ".tag: must be non-empty and unique");
        }
        if (!(c.branch_density > 0.0) || !(c.branch_density < 1.0)) {
            throw ParseError(where + ".branch_density: must be in (0, 1)");
        }
        if (c.solve_density < 0.0 || c.solve_density >= 1.0) {
            throw ParseError(where + ".solve_density: must be in [0, 1)");
        }
        if (c.planted_depth_min < 1 || c.planted_depth_min > c.planted_depth_max ||
            c.planted_depth_max > s.max_depth) {
            throw ParseError(where + ": planted depth range invalid");
        }
        branch_threshold_.push_back(
            static_cast<std::uint32_t>(std::lround(c.branch_density * 65536.0)));
        solve_threshold_.push_back(
            static_cast<std::uint32_t>(std::lround(c.solve_density * 16777216.0)));
    }

    int total = 0;
    bias_cumsum_.reserve(spec_.planted_rule_weights.size());
    for (int w : spec_.planted_rule_weights) {
        if (w < 0) throw ParseError("domain.planted_rule_weights: weights must be >= 0");
        total += w;
        bias_cumsum_.push_back(total);
    }
    if (total <= 0) throw ParseError("domain.planted_rule_weights: total weight must be > 0");
}

int SyntreeDomain::category_index(const std::string& tag) const {
    for (std::size_t i = 0; i < spec_.categories.size(); ++i) {
        if (spec_.categories[i].tag == tag) return static_cast<int>(i);
    }
    return -1;
}

int SyntreeDomain::pick_planted_rule(Rng& rng) const {
    const int total = bias_cumsum_.back();
    const int x = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(total)));
    const auto it = std::upper_bound(bias_cumsum_.begin(), bias_cumsum_.end(), x);
    return static_cast<int>(it - bias_cumsum_.begin());
}

ProblemInstance::ProblemInstance(const SyntreeDomain& dom, Problem prob)
    : dom_(&dom), prob_(std::move(prob)) {
    if (prob_.category < 0 || prob_.category >= static_cast<int>(dom.spec().categories.size())) {
        throw ParseError("problem '" + prob_.problem_id + "': category index out of range");
    }
    if (prob_.planted_depth < 1 || prob_.planted_depth > dom.spec().max_depth) {
        throw ParseError("problem '" + prob_.problem_id + "': planted_depth must be in [1, " +
                         std::to_string(dom.spec().max_depth) + "]");
    }
    branch_threshold_ = dom.branch_threshold(prob_.category);
    solve_threshold_ = dom.solve_threshold(prob_.category);

    // Derive the planted path. Rules come from the biased distribution and
    // never violate gating, so the planted solution stays reachable.
    const std::uint64_t root_hash = hash_combine(prob_.seed, kRootTag);
    const int root_size = static_cast<int>((root_hash >> 50) % dom.spec().size_buckets);
    Goal g{pack_payload(root_hash, root_size, 0), 0};
    planted_payloads_.push_back(g.payload);

    Rng stream(hash_combine(prob_.seed, kPlantTag));
    std::uint64_t mask = 0;
    planted_rules_.reserve(static_cast<std::size_t>(prob_.planted_depth));
    for (int d = 0; d < prob_.planted_depth; ++d) {
        int rule;
        for (;;) {
            rule = dom.pick_planted_rule(stream);
            const int gate = dom.gated_by(rule);
            if (gate < 0 || !((mask >> gate) & 1u)) break;
        }
        planted_rules_.push_back(rule);
        mask |= std::uint64_t{1} << rule;
        const std::uint64_t a = hash_combine(g.payload, kApplyTag + static_cast<std::uint64_t>(rule));
        g = make_child(g, a);
        planted_payloads_.push_back(g.payload);
    }
}

std::vector<ProblemInstance> make_instances(const SyntreeDomain& dom,
                                            std::span<const Problem> problems) {
    std::vector<ProblemInstance> out;
    out.reserve(problems.size());
    for (const Problem& p : problems) out.emplace_back(dom, p);
    return out;
}

namespace {

void verify_planted_path(const ProblemInstance& inst) {
    const std::optional<Goal> end = replay_path(inst, inst.planted_rules());
    if (!end || !inst.is_solved(*end)) {
        throw std::logic_error("generated problem '" + inst.problem().problem_id +
                               "' does not replay its planted path to a solved goal");
    }
}

std::string format_problem_id(const std::string& tag, int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%03d", index);
    return tag + "-" + buf;
}

} // namespace

Benchmark generate_benchmark(std::uint64_t generator_seed, int count, DomainSpec spec,
                             std::string name) {
    if (count < 1) throw std::invalid_argument("generate_benchmark: count must be >= 1");
    Benchmark bench;
    bench.generator_seed = generator_seed;
    bench.domain = std::make_shared<SyntreeDomain>(std::move(spec));
    bench.name = name.empty() ? "syntree-" + std::to_string(count) : std::move(name);

    const auto& categories = bench.domain->spec().categories;
    const int ncat = static_cast<int>(categories.size());
    bench.problems.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int cat = i % ncat;
        const CategoryParams& cp = categories[static_cast<std::size_t>(cat)];
        Problem p;
        p.problem_id = format_problem_id(cp.tag, i);
        p.category = cat;
        p.seed = derive_seed(generator_seed, kProblemTag, static_cast<std::uint64_t>(i));
        Rng depth_stream(hash_combine(p.seed, kDepthTag));
        p.planted_depth =
            cp.planted_depth_min +
            static_cast<int>(depth_stream.next_below(
                static_cast<std::uint64_t>(cp.planted_depth_max - cp.planted_depth_min + 1)));
        verify_planted_path(ProblemInstance(*bench.domain, p));
        bench.problems.push_back(std::move(p));
    }
    return bench;
}

namespace {

json domain_to_json(const DomainSpec& s) {
    json j;
    j["domain_id"] = s.domain_id;
    j["rule_count"] = s.rule_count;
    j["group_count"] = s.group_count;
    json gates = json::array();
    for (const GatePair& gp : s.gate_pairs) gates.push_back({gp.gated, gp.gating});
    j["gate_pairs"] = std::move(gates);
    j["max_depth"] = s.max_depth;
    j["depth_buckets"] = s.depth_buckets;
    j["open_buckets"] = s.open_buckets;
    j["size_buckets"] = s.size_buckets;
    j["planted_rule_weights"] = s.planted_rule_weights;
    json cats = json::array();
    for (const CategoryParams& c : s.categories) {
        cats.push_back({{"tag", c.tag},
                        {"branch_density", c.branch_density},
                        {"solve_density", c.solve_density},
                        {"planted_depth_min", c.planted_depth_min},
                        {"planted_depth_max", c.planted_depth_max}});
    }
    j["categories"] = std::move(cats);
    return j;
}

DomainSpec domain_from_json(const json& j) {
    DomainSpec s;
    s.domain_id = j.at("domain_id").get<std::string>();
    s.rule_count = j.at("rule_count").get<int>();
    s.group_count = j.at("group_count").get<int>();
    s.gate_pairs.clear();
    for (const json& g : j.at("gate_pairs")) {
        s.gate_pairs.push_back({g.at(0).get<int>(), g.at(1).get<int>()});
    }
    s.max_depth = j.at("max_depth").get<int>();
    s.depth_buckets = j.at("depth_buckets").get<int>();
    s.open_buckets = j.at("open_buckets").get<int>();
    s.size_buckets = j.at("size_buckets").get<int>();
    s.planted_rule_weights = j.at("planted_rule_weights").get<std::vector<int>>();
    s.categories.clear();
    for (const json& c : j.at("categories")) {
        CategoryParams cp;
        cp.tag = c.at("tag").get<std::string>();
        cp.branch_density = c.at("branch_density").get<double>();
        cp.solve_density = c.at("solve_density").get<double>();
        cp.planted_depth_min = c.at("planted_depth_min").get<int>();
        cp.planted_depth_max = c.at("planted_depth_max").get<int>();
        s.categories.push_back(std::move(cp));
    }
    return s;
}

} // namespace

void save_benchmark(const Benchmark& bench, std::ostream& sink) {
    json j;
    j["name"] = bench.name;
    j["generator_seed"] = bench.generator_seed;
    j["domain"] = domain_to_json(bench.domain->spec());
    json problems = json::array();
    const auto& categories = bench.domain->spec().categories;
    for (const Problem& p : bench.problems) {
        problems.push_back({{"problem_id", p.problem_id},
                            {"category", categories[static_cast<std::size_t>(p.category)].tag},
                            {"seed", p.seed},
                            {"planted_depth", p.planted_depth}});
    }
    j["problems"] = std::move(problems);
    sink << j.dump(2) << '\n';
}

void save_benchmark_file(const Benchmark& bench, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    save_benchmark(bench, out);
    if (!out) throw ParseError("failed writing '" + path + "'");
}

Benchmark load_benchmark(std::istream& source) {
    json j;
    try {
        j = json::parse(source);
    } catch (const json::exception& e) {
        throw ParseError(std::string("benchmark: invalid JSON: ") + e.what());
    }
    Benchmark bench;
    try {
        bench.name = j.at("name").get<std::string>();
        bench.generator_seed = j.at("generator_seed").get<std::uint64_t>();
        bench.domain = std::make_shared<SyntreeDomain>(domain_from_json(j.at("domain")));
    } catch (const json::exception& e) {
        throw ParseError(std::string("benchmark: ") + e.what());
    }

    std::set<std::string> ids;
    for (std::size_t i = 0; i < j.at("problems").size(); ++i) {
        const json& pj = j.at("problems")[i];
        const std::string where = "benchmark problems[" + std::to_string(i) + "]";
        Problem p;
        try {
            p.problem_id = pj.at("problem_id").get<std::string>();
            const std::string tag = pj.at("category").get<std::string>();
            p.category = bench.domain->category_index(tag);
            if (p.category < 0) {
                throw ParseError(where + " (id '" + p.problem_id + "'): unknown category tag '" +
                                 tag + "'");
            }
            p.seed = pj.at("seed").get<std::uint64_t>();
            p.planted_depth = pj.at("planted_depth").get<int>();
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (p.problem_id.empty() || !ids.insert(p.problem_id).second) {
            throw ParseError(where + ": problem_id '" + p.problem_id +
                             "' is empty or duplicated");
        }
        try {
            verify_planted_path(ProblemInstance(*bench.domain, p));
        } catch (const std::logic_error& e) {
            throw ParseError(where + " (id '" + p.problem_id + "'): " + e.what());
        }
        bench.problems.push_back(std::move(p));
    }
    if (bench.problems.empty()) throw ParseError("benchmark: no problems");
    return bench;
}

Benchmark load_benchmark_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open benchmark file '" + path + "'");
    return load_benchmark(in);
}

} // namespace evotune
