#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "evotune/domain.hpp"
#include "evotune/rng.hpp"

namespace evotune {

enum class StrategyKind {
    kOrderOnly,    // evolves rule order only; weights stay at the domain default
    kGeneral,      // evolves order plus one weight per rule
    kGoalSpecific, // evolves order plus one weight per (feature bucket, rule)
};

std::string to_string(StrategyKind kind);
StrategyKind strategy_kind_from_string(const std::string& s);

enum class WeightVariant { kGeneral, kGoalSpecific };

// Positive rule weights, either per rule or per (feature bucket, rule).
struct WeightTable {
    WeightVariant variant = WeightVariant::kGeneral;
    int rule_count = 0;
    int bucket_count = 1;       // 1 for the general variant
    std::vector<double> data;   // general: rule_count entries;
                                // goal-specific: bucket_count * rule_count, bucket-major

    double at(int bucket, int rule) const {
        return variant == WeightVariant::kGeneral ? data[static_cast<std::size_t>(rule)]
                                                  : data[static_cast<std::size_t>(bucket) * rule_count + rule];
    }

    bool operator==(const WeightTable&) const = default;
};

WeightTable uniform_weights(WeightVariant variant, int rule_count, int bucket_count);

// A full search strategy: one permutation per rule group plus a weight table.
// Groups are traversed in ascending group id; only the order inside each
// group is tunable.
struct Strategy {
    std::string domain_id;
    StrategyKind kind = StrategyKind::kOrderOnly;
    std::vector<std::vector<int>> group_perms; // group_perms[g] permutes group g's rule ids
    WeightTable weights;

    bool operator==(const Strategy&) const = default;
};

struct MutationConfig {
    double p_move = 0.1;          // per-position probability of a move event
    double weight_factor_lo = 0.8;
    double weight_factor_hi = 1.2;
};

// Identity permutations, all weights 1.0.
template <DomainModel D>
Strategy default_strategy(const D& dom, StrategyKind kind) {
    Strategy s;
    s.domain_id = std::string(dom.domain_id());
    s.kind = kind;
    s.group_perms.reserve(static_cast<std::size_t>(dom.group_count()));
    for (int g = 0; g < dom.group_count(); ++g) {
        s.group_perms.push_back(dom.group_rules(g));
    }
    const bool goal_specific = kind == StrategyKind::kGoalSpecific;
    s.weights = uniform_weights(goal_specific ? WeightVariant::kGoalSpecific : WeightVariant::kGeneral,
                                dom.rule_count(), goal_specific ? feature_bucket_count(dom) : 1);
    return s;
}

// Each position, independently with probability p_move, has its element
// removed and re-inserted at a uniformly random position. Exactly two rng
// draws are consumed per position (the move toss and the insertion slot),
// whether or not the move happens, so streams stay alignable.
std::vector<int> mutate_permutation(std::vector<int> perm, double p_move, Rng& rng);

// Every entry is multiplied by an independent uniform draw from
// [weight_factor_lo, weight_factor_hi], in index order.
WeightTable mutate_weights(WeightTable table, const MutationConfig& cfg, Rng& rng);

// Order-only strategies mutate their permutations only; the other kinds
// mutate permutations and weights. The input strategy is left untouched.
Strategy mutate(const Strategy& strategy, const MutationConfig& cfg, Rng& rng);

// Structural validation independent of any domain: permutations partition a
// dense rule id range, weights are complete, positive and finite, and an
// order-only strategy carries the all-ones default table.
void validate_strategy(const Strategy& strategy);

void save_strategy(const Strategy& strategy, std::ostream& sink);
void save_strategy_file(const Strategy& strategy, const std::string& path);
Strategy load_strategy(std::istream& source);
Strategy load_strategy_file(const std::string& path);

} // namespace evotune
