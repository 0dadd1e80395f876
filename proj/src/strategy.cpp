#include "evotune/strategy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "evotune/errors.hpp"

namespace evotune {

using nlohmann::json;

std::string to_string(StrategyKind kind) {
    switch (kind) {
    case StrategyKind::kOrderOnly: return "order_only";
    case StrategyKind::kGeneral: return "general";
    case StrategyKind::kGoalSpecific: return "goal_specific";
    }
    return "order_only";
}

StrategyKind strategy_kind_from_string(const std::string& s) {
    if (s == "order_only" || s == "order") return StrategyKind::kOrderOnly;
    if (s == "general") return StrategyKind::kGeneral;
    if (s == "goal_specific" || s == "goal") return StrategyKind::kGoalSpecific;
    throw ParseError("unknown strategy kind '" + s + "'");
}

WeightTable uniform_weights(WeightVariant variant, int rule_count, int bucket_count) {
    WeightTable t;
    t.variant = variant;
    t.rule_count = rule_count;
    t.bucket_count = variant == WeightVariant::kGeneral ? 1 : bucket_count;
    t.data.assign(static_cast<std::size_t>(rule_count) * t.bucket_count, 1.0);
    return t;
}

std::vector<int> mutate_permutation(std::vector<int> perm, double p_move, Rng& rng) {
    const std::size_t n = perm.size();
    for (std::size_t pos = 0; pos < n; ++pos) {
        const double toss = rng.next_double();
        const std::size_t slot = static_cast<std::size_t>(rng.next_below(n));
        if (toss < p_move) {
            const int elem = perm[pos];
            perm.erase(perm.begin() + static_cast<std::ptrdiff_t>(pos));
            perm.insert(perm.begin() + static_cast<std::ptrdiff_t>(slot), elem);
        }
    }
    return perm;
}

WeightTable mutate_weights(WeightTable table, const MutationConfig& cfg, Rng& rng) {
    for (double& w : table.data) {
        w *= rng.uniform(cfg.weight_factor_lo, cfg.weight_factor_hi);
    }
    return table;
}

Strategy mutate(const Strategy& strategy, const MutationConfig& cfg, Rng& rng) {
    Strategy out = strategy;
    for (auto& perm : out.group_perms) {
        perm = mutate_permutation(std::move(perm), cfg.p_move, rng);
    }
    if (out.kind != StrategyKind::kOrderOnly) {
        out.weights = mutate_weights(std::move(out.weights), cfg, rng);
    }
    return out;
}

void validate_strategy(const Strategy& strategy) {
    if (strategy.group_perms.empty()) {
        throw ParseError("group_perms: must contain at least one group");
    }
    std::set<int> seen;
    int max_rule = -1;
    for (std::size_t g = 0; g < strategy.group_perms.size(); ++g) {
        const auto& perm = strategy.group_perms[g];
        if (perm.empty()) {
            throw ParseError("group_perms[" + std::to_string(g) + "]: empty group");
        }
        for (int rule : perm) {
            if (rule < 0) {
                throw ParseError("group_perms[" + std::to_string(g) + "]: negative rule id");
            }
            if (!seen.insert(rule).second) {
                throw ParseError("group_perms[" + std::to_string(g) + "]: duplicate rule id " +
                                 std::to_string(rule));
            }
            max_rule = std::max(max_rule, rule);
        }
    }
    const int rule_count = max_rule + 1;
    if (static_cast<int>(seen.size()) != rule_count) {
        throw ParseError("group_perms: rule ids are not dense in [0, " +
                         std::to_string(rule_count) + ")");
    }

    const WeightTable& w = strategy.weights;
    if (w.rule_count != rule_count) {
        throw ParseError("weights.rule_count: expected " + std::to_string(rule_count) + ", got " +
                         std::to_string(w.rule_count));
    }
    const int buckets = w.variant == WeightVariant::kGeneral ? 1 : w.bucket_count;
    if (buckets < 1) {
        throw ParseError("weights.bucket_count: must be >= 1");
    }
    if (w.data.size() != static_cast<std::size_t>(buckets) * rule_count) {
        throw ParseError("weights.data: expected " + std::to_string(buckets * rule_count) +
                         " entries, got " + std::to_string(w.data.size()));
    }
    for (std::size_t i = 0; i < w.data.size(); ++i) {
        if (!(w.data[i] > 0.0) || !std::isfinite(w.data[i])) {
            throw ParseError("weights.data[" + std::to_string(i) +
                             "]: weight must be positive and finite");
        }
    }
    if (strategy.kind == StrategyKind::kOrderOnly) {
        if (w.variant != WeightVariant::kGeneral) {
            throw ParseError("weights.variant: order_only strategies use the general variant");
        }
        for (std::size_t i = 0; i < w.data.size(); ++i) {
            if (w.data[i] != 1.0) {
                throw ParseError("weights.data[" + std::to_string(i) +
                                 "]: order_only strategies keep the default weight 1.0");
            }
        }
    }
    if (strategy.kind == StrategyKind::kGoalSpecific && w.variant != WeightVariant::kGoalSpecific) {
        throw ParseError("weights.variant: goal_specific strategy requires a goal_specific table");
    }
    if (strategy.kind == StrategyKind::kGeneral && w.variant != WeightVariant::kGeneral) {
        throw ParseError("weights.variant: general strategy requires a general table");
    }
}

void save_strategy(const Strategy& strategy, std::ostream& sink) {
    json j;
    j["domain_id"] = strategy.domain_id;
    j["kind"] = to_string(strategy.kind);
    j["group_perms"] = strategy.group_perms;
    json w;
    w["variant"] = strategy.weights.variant == WeightVariant::kGeneral ? "general" : "goal_specific";
    w["rule_count"] = strategy.weights.rule_count;
    w["bucket_count"] = strategy.weights.bucket_count;
    w["data"] = strategy.weights.data; // bucket-major for the goal-specific variant
    j["weights"] = std::move(w);
    sink << j.dump(2) << '\n';
}

void save_strategy_file(const Strategy& strategy, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    save_strategy(strategy, out);
    if (!out) throw ParseError("failed writing '" + path + "'");
}

Strategy load_strategy(std::istream& source) {
    json j;
    try {
        j = json::parse(source);
    } catch (const json::exception& e) {
        throw ParseError(std::string("strategy: invalid JSON: ") + e.what());
    }
    Strategy s;
    try {
        s.domain_id = j.at("domain_id").get<std::string>();
        s.kind = strategy_kind_from_string(j.at("kind").get<std::string>());
        s.group_perms = j.at("group_perms").get<std::vector<std::vector<int>>>();
        const json& w = j.at("weights");
        const std::string variant = w.at("variant").get<std::string>();
        if (variant == "general") {
            s.weights.variant = WeightVariant::kGeneral;
        } else if (variant == "goal_specific") {
            s.weights.variant = WeightVariant::kGoalSpecific;
        } else {
            throw ParseError("weights.variant: unknown variant '" + variant + "'");
        }
        s.weights.rule_count = w.at("rule_count").get<int>();
        s.weights.bucket_count = w.value("bucket_count", 1);
        s.weights.data = w.at("data").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("strategy: ") + e.what());
    }
    validate_strategy(s);
    return s;
}

Strategy load_strategy_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open strategy file '" + path + "'");
    return load_strategy(in);
}

} // namespace evotune
