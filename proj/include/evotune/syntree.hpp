#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "evotune/domain.hpp"
#include "evotune/rng.hpp"

namespace evotune {

// Tags feeding the 64-bit mixer; each derivation site gets its own stream.
inline constexpr std::uint64_t kRootTag = 0x524F4F54;    // root payload
inline constexpr std::uint64_t kApplyTag = 0x41505059;   // + rule id: applicability draw
inline constexpr std::uint64_t kChildTag = 0x43484C44;   // child payload
inline constexpr std::uint64_t kSolveTag = 0x534F4C56;   // background solution draw
inline constexpr std::uint64_t kPlantTag = 0x504C4E54;   // planted path stream
inline constexpr std::uint64_t kDepthTag = 0x44455054;   // planted depth draw
inline constexpr std::uint64_t kProblemTag = 0x50524F42; // per-problem seed
inline constexpr std::uint64_t kSplitTag = 0x53504C54;   // train/validation shuffle

// Node payloads pack (hash:48 | size:8 | depth:8). Size never decreases along
// an edge, which keeps the size-bucket heuristic and therefore path costs
// non-decreasing from parent to child.
constexpr std::uint64_t pack_payload(std::uint64_t hash, int size, int depth) noexcept {
    return (hash & 0xFFFFFFFFFFFF0000ULL) | (static_cast<std::uint64_t>(size & 0xFF) << 8) |
           static_cast<std::uint64_t>(depth & 0xFF);
}
constexpr int payload_depth(std::uint64_t p) noexcept { return static_cast<int>(p & 0xFF); }
constexpr int payload_size(std::uint64_t p) noexcept { return static_cast<int>((p >> 8) & 0xFF); }

struct GatePair {
    int gated = 0;  // becomes inapplicable ...
    int gating = 0; // ... once this rule is on the path

    bool operator==(const GatePair&) const = default;
};

// Difficulty knobs for one problem category. branch_density is the per-rule
// probability that a rule applies off the planted path; solve_density the
// per-node probability of a background solution.
struct CategoryParams {
    std::string tag;
    double branch_density = 0.12;
    double solve_density = 0.0;
    int planted_depth_min = 1;
    int planted_depth_max = 4;

    bool operator==(const CategoryParams&) const = default;
};

struct DomainSpec {
    std::string domain_id = "syntree";
    int rule_count = 15;
    int group_count = 10; // rule r belongs to group r % group_count
    std::vector<GatePair> gate_pairs = {{12, 7}};
    int max_depth = 12;
    int depth_buckets = 4;
    int open_buckets = 4;
    int size_buckets = 4;
    // Planted solution paths draw their rules from this distribution. The bias
    // is what makes strategies transfer between problems: paths share a
    // preference for the same rules.
    std::vector<int> planted_rule_weights = {1, 1, 1, 1, 1, 2, 2, 2, 2, 2, 4, 4, 4, 4, 4};
    std::vector<CategoryParams> categories = default_categories();

    static std::vector<CategoryParams> default_categories();

    bool operator==(const DomainSpec&) const = default;
};

// Validated DomainSpec plus derived tables, shared by every problem of a
// benchmark.
class SyntreeDomain {
public:
    explicit SyntreeDomain(DomainSpec spec); // throws ParseError on invalid specs

    const DomainSpec& spec() const { return spec_; }
    const std::string& domain_id() const { return spec_.domain_id; }
    int rule_count() const { return spec_.rule_count; }
    int group_count() const { return spec_.group_count; }
    const std::vector<int>& group_rules(int g) const {
        return groups_[static_cast<std::size_t>(g)];
    }
    int gated_by(int rule) const { return gated_by_[static_cast<std::size_t>(rule)]; }
    int depth_buckets() const { return spec_.depth_buckets; }
    int open_buckets() const { return spec_.open_buckets; }
    int size_buckets() const { return spec_.size_buckets; }

    std::uint32_t branch_threshold(int category) const {
        return branch_threshold_[static_cast<std::size_t>(category)];
    }
    std::uint32_t solve_threshold(int category) const {
        return solve_threshold_[static_cast<std::size_t>(category)];
    }
    int category_index(const std::string& tag) const; // -1 when unknown

    // Weighted draw from planted_rule_weights; one rng draw per attempt.
    int pick_planted_rule(Rng& rng) const;

private:
    DomainSpec spec_;
    std::vector<std::vector<int>> groups_;
    std::vector<int> gated_by_;
    std::vector<std::uint32_t> branch_threshold_; // 16-bit scale, per category
    std::vector<std::uint32_t> solve_threshold_;  // 24-bit scale, per category
    std::vector<int> bias_cumsum_;
};

struct Problem {
    std::string problem_id;
    int category = 0; // index into DomainSpec::categories
    std::uint64_t seed = 0;
    int planted_depth = 1;

    bool operator==(const Problem&) const = default;
};

// One problem bound to its domain: the DomainModel the search engine runs on.
// A deterministic hash of (seed, parent payload, rule) decides which rules
// apply and which nodes are solved, except along the planted path, where the
// planted rule always applies and leads to the planted solved goal.
class ProblemInstance {
public:
    ProblemInstance(const SyntreeDomain& dom, Problem prob);

    std::string_view domain_id() const { return dom_->domain_id(); }
    int rule_count() const { return dom_->rule_count(); }
    int group_count() const { return dom_->group_count(); }
    const std::vector<int>& group_rules(int g) const { return dom_->group_rules(g); }
    int gated_by(int rule) const { return dom_->gated_by(rule); }
    int depth_buckets() const { return dom_->depth_buckets(); }
    int open_buckets() const { return dom_->open_buckets(); }
    int size_buckets() const { return dom_->size_buckets(); }

    Goal root_goal() const {
        return Goal{planted_payloads_[0], 0};
    }

    std::optional<Goal> expand(const Goal& g, int rule) const {
        if (g.depth >= dom_->spec().max_depth) return std::nullopt;
        const std::uint64_t a = hash_combine(g.payload, kApplyTag + static_cast<std::uint64_t>(rule));
        if ((a & 0xFFFF) >= branch_threshold_ && !on_planted_path(g, rule)) return std::nullopt;
        return make_child(g, a);
    }

    bool is_solved(const Goal& g) const {
        if (g.depth == prob_.planted_depth && g.payload == planted_payloads_.back()) return true;
        if (solve_threshold_ == 0) return false;
        return (hash_combine(g.payload, kSolveTag) & 0xFFFFFF) < solve_threshold_;
    }

    FeatureVector features(const Goal& g) const {
        const DomainSpec& s = dom_->spec();
        const int depth = payload_depth(g.payload);
        const int size = payload_size(g.payload);
        FeatureVector f;
        f.depth_bucket = std::min(s.depth_buckets - 1, depth * s.depth_buckets / (s.max_depth + 1));
        f.open_subgoals_bucket = static_cast<int>((g.payload >> 16) % s.open_buckets);
        f.size_bucket = std::min(s.size_buckets - 1, size / 4);
        return f;
    }

    const SyntreeDomain& domain() const { return *dom_; }
    const Problem& problem() const { return prob_; }
    const std::vector<int>& planted_rules() const { return planted_rules_; }
    const std::vector<std::uint64_t>& planted_payloads() const { return planted_payloads_; }

private:
    bool on_planted_path(const Goal& g, int rule) const {
        return g.depth < prob_.planted_depth &&
               g.payload == planted_payloads_[static_cast<std::size_t>(g.depth)] &&
               rule == planted_rules_[static_cast<std::size_t>(g.depth)];
    }

    Goal make_child(const Goal& g, std::uint64_t applicability_hash) const {
        const std::uint64_t h = hash_combine(applicability_hash, kChildTag);
        const int size = std::min(255, payload_size(g.payload) + static_cast<int>((h >> 24) % 3));
        return Goal{pack_payload(h, size, g.depth + 1), g.depth + 1};
    }

    const SyntreeDomain* dom_;
    Problem prob_;
    std::vector<std::uint64_t> planted_payloads_; // planted_depth + 1 entries
    std::vector<int> planted_rules_;              // planted_depth entries
    std::uint32_t branch_threshold_ = 0;
    std::uint32_t solve_threshold_ = 0;
};

static_assert(DomainModel<ProblemInstance>);

struct Benchmark {
    std::string name;
    std::uint64_t generator_seed = 0;
    std::shared_ptr<const SyntreeDomain> domain;
    std::vector<Problem> problems;
};

std::vector<ProblemInstance> make_instances(const SyntreeDomain& dom,
                                            std::span<const Problem> problems);

// `count` problems spread round-robin over the categories; every problem is
// checked to replay its planted path to a solved goal.
Benchmark generate_benchmark(std::uint64_t generator_seed, int count = 65, DomainSpec spec = {},
                             std::string name = "");

void save_benchmark(const Benchmark& bench, std::ostream& sink);
void save_benchmark_file(const Benchmark& bench, const std::string& path);
Benchmark load_benchmark(std::istream& source);
Benchmark load_benchmark_file(const std::string& path);

} // namespace evotune
