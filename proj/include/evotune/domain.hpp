#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace evotune {

// Discretised node properties used by goal-specific weight tables.
struct FeatureVector {
    int depth_bucket = 0;
    int open_subgoals_bucket = 0;
    int size_bucket = 0;

    bool operator==(const FeatureVector&) const = default;
};

// Row-major index into a goal-specific weight table.
constexpr int feature_bucket_index(const FeatureVector& f, int open_buckets,
                                   int size_buckets) noexcept {
    return f.depth_bucket * open_buckets * size_buckets +
           f.open_subgoals_bucket * size_buckets + f.size_bucket;
}

// A synthesis goal: one node of the OR-tree. The payload is an opaque 64-bit
// descriptor owned by the domain; features must be recomputable from it.
struct Goal {
    std::uint64_t payload = 0;
    int depth = 0; // edges from the root

    bool operator==(const Goal&) const = default;
};

// The surface a problem domain exposes to the search engine. All queries must
// be pure: the reachable tree depends on the domain alone, never on the
// strategy driving the search. Rule ids are dense in [0, rule_count) and at
// most 64 so a path's applied-rule set fits in one word.
template <typename D>
concept DomainModel = requires(const D& d, const Goal& g, int rule, int group) {
    { d.domain_id() } -> std::convertible_to<std::string_view>;
    { d.rule_count() } -> std::convertible_to<int>;
    { d.group_count() } -> std::convertible_to<int>;
    { d.group_rules(group) } -> std::convertible_to<const std::vector<int>&>;
    { d.gated_by(rule) } -> std::convertible_to<int>; // -1 when ungated
    { d.depth_buckets() } -> std::convertible_to<int>;
    { d.open_buckets() } -> std::convertible_to<int>;
    { d.size_buckets() } -> std::convertible_to<int>;
    { d.root_goal() } -> std::convertible_to<Goal>;
    { d.expand(g, rule) } -> std::convertible_to<std::optional<Goal>>;
    { d.is_solved(g) } -> std::convertible_to<bool>;
    { d.features(g) } -> std::convertible_to<FeatureVector>;
};

template <DomainModel D>
constexpr int feature_bucket_count(const D& d) {
    return d.depth_buckets() * d.open_buckets() * d.size_buckets();
}

} // namespace evotune
