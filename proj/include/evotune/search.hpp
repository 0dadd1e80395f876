#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evotune/domain.hpp"
#include "evotune/errors.hpp"
#include "evotune/strategy.hpp"

namespace evotune {

struct Budget {
    std::int64_t max_expansions = 10'000;
    // Optional wall-clock ceiling. Nondeterministic by nature; off by default
    // and never used by the test suites.
    std::optional<std::int64_t> wall_clock_ms;
};

struct SearchOutcome {
    bool solved = false;
    bool budget_exhausted = false;         // expansion budget hit or queue emptied
    std::int64_t rules_fired = 0;          // child generations performed
    std::int64_t nodes_expanded = 0;
    std::vector<int> solution_path;        // rule ids root -> solved goal; empty iff unsolved or root solved
};

// Reusable buffers so repeated searches do not reallocate. One per thread.
struct SearchWorkspace {
    struct NodeRec {
        Goal goal;
        std::uint64_t path_mask; // rules applied on the root-to-node path
        double edge_sum;         // sum of edge weights on that path
        std::int32_t parent;     // arena index, -1 for root
        std::int16_t rule;       // edge label from parent, -1 for root
    };
    // Node arena index doubles as the insertion counter: nodes are appended in
    // enqueue order, which makes the (cost, rank, node) ordering total.
    struct QueueEntry {
        double cost;
        std::int32_t rank; // rank of the generating rule among the parent's applicable rules
        std::int32_t node;
    };

    std::vector<NodeRec> nodes;
    std::vector<QueueEntry> heap;

    void clear() {
        nodes.clear();
        heap.clear();
    }
};

// Ensures a strategy structurally matches a domain: same rule ids, same
// grouping, complete weight table.
template <DomainModel D>
void check_strategy(const D& dom, const Strategy& strategy) {
    if (static_cast<int>(strategy.group_perms.size()) != dom.group_count()) {
        throw ConfigError("strategy has " + std::to_string(strategy.group_perms.size()) +
                          " groups, domain expects " + std::to_string(dom.group_count()));
    }
    int rules = 0;
    for (int g = 0; g < dom.group_count(); ++g) {
        std::vector<int> a = strategy.group_perms[static_cast<std::size_t>(g)];
        std::vector<int> b = dom.group_rules(g);
        rules += static_cast<int>(b.size());
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) {
            throw ConfigError("strategy group " + std::to_string(g) +
                              " does not permute the domain's rule set for that group");
        }
    }
    if (strategy.weights.rule_count != rules) {
        throw ConfigError("strategy weight table covers " + std::to_string(strategy.weights.rule_count) +
                          " rules, domain has " + std::to_string(rules));
    }
    if (strategy.weights.variant == WeightVariant::kGoalSpecific &&
        strategy.weights.bucket_count != feature_bucket_count(dom)) {
        throw ConfigError("goal-specific weight table has " + std::to_string(strategy.weights.bucket_count) +
                          " buckets, domain has " + std::to_string(feature_bucket_count(dom)));
    }
}

namespace detail {

// Enumerates the applicable rules at a goal in strategy order: groups
// ascending, the strategy's permutation inside each group, gated rules
// skipped. fn(rule, child, rank) returns false to stop early.
template <DomainModel D, typename Fn>
bool for_each_applicable(const D& dom, const Goal& goal, std::uint64_t path_mask,
                         const Strategy& strategy, Fn&& fn) {
    int rank = 0;
    const int groups = dom.group_count();
    for (int g = 0; g < groups; ++g) {
        for (int rule : strategy.group_perms[static_cast<std::size_t>(g)]) {
            const int gate = dom.gated_by(rule);
            if (gate >= 0 && ((path_mask >> gate) & 1u)) continue;
            std::optional<Goal> child = dom.expand(goal, rule);
            if (!child) continue;
            if (!fn(rule, *child, rank)) return false;
            ++rank;
        }
    }
    return true;
}

} // namespace detail

// The rules applicable at a goal, in the order the search would try them.
template <DomainModel D>
std::vector<int> applicable_rules(const D& dom, const Goal& goal, std::uint64_t path_rule_set,
                                  const Strategy& strategy) {
    check_strategy(dom, strategy);
    std::vector<int> rules;
    detail::for_each_applicable(dom, goal, path_rule_set, strategy,
                                [&](int rule, const Goal&, int) {
                                    rules.push_back(rule);
                                    return true;
                                });
    return rules;
}

// Cost of the node reached by applying `path` from the root: the sum of the
// strategy's weights for each edge (goal-specific weights are looked up with
// the parent's features at application time) plus the final goal's
// size-bucket heuristic. Throws if the path does not replay.
template <DomainModel D>
double node_cost(const D& dom, const Strategy& strategy, std::span<const int> path) {
    check_strategy(dom, strategy);
    Goal g = dom.root_goal();
    double edge_sum = 0.0;
    for (int rule : path) {
        const int bucket =
            feature_bucket_index(dom.features(g), dom.open_buckets(), dom.size_buckets());
        std::optional<Goal> child = dom.expand(g, rule);
        if (!child) {
            throw std::invalid_argument("node_cost: rule " + std::to_string(rule) +
                                        " is not applicable during replay");
        }
        edge_sum += strategy.weights.at(bucket, rule);
        g = *child;
    }
    return edge_sum + dom.features(g).size_bucket;
}

// Replays a rule path from the root, honoring gating. Returns the final goal,
// or nullopt if any step is inapplicable or gated.
template <DomainModel D>
std::optional<Goal> replay_path(const D& dom, std::span<const int> path) {
    Goal g = dom.root_goal();
    std::uint64_t mask = 0;
    for (int rule : path) {
        const int gate = dom.gated_by(rule);
        if (gate >= 0 && ((mask >> gate) & 1u)) return std::nullopt;
        std::optional<Goal> child = dom.expand(g, rule);
        if (!child) return std::nullopt;
        mask |= std::uint64_t{1} << rule;
        g = *child;
    }
    return g;
}

// Best-first search over the domain's OR-tree. Nodes leave the queue in
// ascending (path cost, rule rank at parent, insertion counter) order; a
// solved goal is detected the moment it is generated. Deterministic for fixed
// inputs (the wall-clock ceiling, when enabled, breaks that and is off by
// default).
template <DomainModel D>
SearchOutcome best_first_search(const D& dom, const Strategy& strategy, const Budget& budget,
                                SearchWorkspace& ws) {
    check_strategy(dom, strategy);
    if (budget.max_expansions < 1) {
        throw std::invalid_argument("budget.max_expansions must be >= 1");
    }

    using NodeRec = SearchWorkspace::NodeRec;
    using QueueEntry = SearchWorkspace::QueueEntry;
    const auto heap_after = [](const QueueEntry& a, const QueueEntry& b) {
        if (a.cost != b.cost) return a.cost > b.cost;
        if (a.rank != b.rank) return a.rank > b.rank;
        return a.node > b.node;
    };

    SearchOutcome out;
    ws.clear();

    const Goal root = dom.root_goal();
    if (dom.is_solved(root)) {
        out.solved = true;
        return out;
    }
    ws.nodes.push_back(NodeRec{root, 0, 0.0, -1, -1});
    ws.heap.push_back(QueueEntry{static_cast<double>(dom.features(root).size_bucket), 0, 0});

    const bool timed = budget.wall_clock_ms.has_value();
    const auto deadline = timed ? std::chrono::steady_clock::now() +
                                      std::chrono::milliseconds(*budget.wall_clock_ms)
                                : std::chrono::steady_clock::time_point{};

    const auto finish_path = [&](std::int32_t parent, int rule) {
        std::vector<int>& path = out.solution_path;
        path.push_back(rule);
        for (std::int32_t i = parent; i >= 0; i = ws.nodes[static_cast<std::size_t>(i)].parent) {
            if (ws.nodes[static_cast<std::size_t>(i)].rule >= 0) {
                path.push_back(ws.nodes[static_cast<std::size_t>(i)].rule);
            }
        }
        std::reverse(path.begin(), path.end());
    };

    while (!ws.heap.empty()) {
        if (out.nodes_expanded >= budget.max_expansions) {
            out.budget_exhausted = true;
            return out;
        }
        if (timed && (out.nodes_expanded & 0xFF) == 0 &&
            std::chrono::steady_clock::now() >= deadline) {
            out.budget_exhausted = true;
            return out;
        }

        std::pop_heap(ws.heap.begin(), ws.heap.end(), heap_after);
        const QueueEntry top = ws.heap.back();
        ws.heap.pop_back();

        // Copy: the arena may reallocate while children are appended.
        const NodeRec cur = ws.nodes[static_cast<std::size_t>(top.node)];
        ++out.nodes_expanded;

        const int parent_bucket =
            feature_bucket_index(dom.features(cur.goal), dom.open_buckets(), dom.size_buckets());

        const bool completed = detail::for_each_applicable(
            dom, cur.goal, cur.path_mask, strategy, [&](int rule, const Goal& child, int rank) {
                ++out.rules_fired;
                if (dom.is_solved(child)) {
                    out.solved = true;
                    finish_path(top.node, rule);
                    return false;
                }
                const double edge_sum = cur.edge_sum + strategy.weights.at(parent_bucket, rule);
                const double cost = edge_sum + dom.features(child).size_bucket;
                const auto idx = static_cast<std::int32_t>(ws.nodes.size());
                ws.nodes.push_back(NodeRec{child, cur.path_mask | (std::uint64_t{1} << rule),
                                           edge_sum, top.node, static_cast<std::int16_t>(rule)});
                ws.heap.push_back(QueueEntry{cost, rank, idx});
                std::push_heap(ws.heap.begin(), ws.heap.end(), heap_after);
                return true;
            });
        if (!completed) {
            return out; // solved mid-expansion
        }
    }
    out.budget_exhausted = true; // queue emptied without a solution
    return out;
}

template <DomainModel D>
SearchOutcome best_first_search(const D& dom, const Strategy& strategy, const Budget& budget) {
    SearchWorkspace ws;
    return best_first_search(dom, strategy, budget, ws);
}

// Exhaustive preorder DFS up to depth_limit edges from the root, trying rules
// in ascending id order and honoring gating but ignoring costs. Because the
// traversal is preorder over lexicographically ordered paths, the first hit is
// the lexicographically least solution path.
template <DomainModel D>
SearchOutcome brute_force_solve(const D& dom, int depth_limit) {
    if (depth_limit < 0) {
        throw std::invalid_argument("depth_limit must be >= 0");
    }
    SearchOutcome out;
    std::vector<int> path;

    const auto dfs = [&](auto&& self, const Goal& g, std::uint64_t mask) -> bool {
        if (dom.is_solved(g)) {
            out.solved = true;
            out.solution_path = path;
            return true;
        }
        if (static_cast<int>(path.size()) >= depth_limit) return false;
        ++out.nodes_expanded;
        for (int rule = 0; rule < dom.rule_count(); ++rule) {
            const int gate = dom.gated_by(rule);
            if (gate >= 0 && ((mask >> gate) & 1u)) continue;
            std::optional<Goal> child = dom.expand(g, rule);
            if (!child) continue;
            ++out.rules_fired;
            path.push_back(rule);
            if (self(self, *child, mask | (std::uint64_t{1} << rule))) return true;
            path.pop_back();
        }
        return false;
    };
    dfs(dfs, dom.root_goal(), 0);
    return out;
}

// Number of nodes in the full gated tree (root included), or nullopt once the
// count would exceed node_cap. Used to pick oracle-sized instances.
template <DomainModel D>
std::optional<std::int64_t> tree_size(const D& dom, std::int64_t node_cap) {
    std::int64_t count = 0;
    const auto dfs = [&](auto&& self, const Goal& g, std::uint64_t mask) -> bool {
        if (++count > node_cap) return false;
        for (int rule = 0; rule < dom.rule_count(); ++rule) {
            const int gate = dom.gated_by(rule);
            if (gate >= 0 && ((mask >> gate) & 1u)) continue;
            std::optional<Goal> child = dom.expand(g, rule);
            if (!child) continue;
            if (!self(self, *child, mask | (std::uint64_t{1} << rule))) return false;
        }
        return true;
    };
    if (!dfs(dfs, dom.root_goal(), 0)) return std::nullopt;
    return count;
}

} // namespace evotune
