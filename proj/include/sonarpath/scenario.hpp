#pragma once

#include "sonarpath/netmodel.hpp"
#include "sonarpath/traversal.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sonarpath {

struct GoalCondition {
    std::string fact;
    bool value = true;

    bool operator==(const GoalCondition&) const = default;
};

struct Scenario {
    std::string name;
    std::optional<std::string> description;
    std::string start;
    std::string end;
    std::vector<std::string> omit_rules;
    std::map<std::string, bool> fact_overrides;
    int rule_cap = kMaxRuleCap;
    std::optional<std::vector<GoalCondition>> goal; // absent or empty: N/A
    std::optional<StopConditions> stop;

    bool operator==(const Scenario&) const = default;
};

struct PreparedScenario {
    Network network; // working copy
    EngineConfig config;
};

// Deep copy with omitted rules removed and overrides applied. Throws
// ReferenceError for an unknown rule, fact or container.
[[nodiscard]] PreparedScenario apply_scenario(const Network& network, const Scenario& scenario);

// nullopt when the scenario has no goal (reported as N/A).
[[nodiscard]] std::optional<bool> goal_check(const TraversalResult& result, const RealityPath& path,
                                             const std::optional<std::vector<GoalCondition>>& goal);

struct Extreme {
    std::uint64_t length = 0;
    std::uint64_t count = 0;

    bool operator==(const Extreme&) const = default;
};

struct Metrics {
    double fastest_completion_seconds = 0.0;
    std::uint64_t final_reality_paths = 0;
    std::optional<std::uint64_t> goal_achieving_paths;
    std::uint64_t total_connections = 0;
    Extreme longest_path;
    Extreme shortest_path;
    std::uint64_t variant_containers_created = 0;
    std::uint64_t variant_links_created = 0;
    std::uint64_t memory_estimate_bytes = 0;
    bool stopped_early = false;

    bool operator==(const Metrics&) const = default;
};

// Metrics from the reported lengths of final paths plus run counters.
// Path-derived fields only depend on `lengths` and `goal_flags`.
[[nodiscard]] Metrics metrics_from_lengths(const std::vector<std::uint64_t>& lengths,
                                           const std::optional<std::vector<bool>>& goal_flags);

[[nodiscard]] Metrics compute_metrics(const TraversalResult& result,
                                      const std::optional<std::vector<GoalCondition>>& goal = std::nullopt);

// Scenario run in one call: apply, traverse, measure.
struct ScenarioRun {
    TraversalResult result;
    Metrics metrics;
    std::optional<std::vector<bool>> goal_flags; // one per final path
};

[[nodiscard]] ScenarioRun run_scenario(const Network& network, const Scenario& scenario, RunHooks hooks = {},
                                       std::optional<int> rule_cap = std::nullopt,
                                       std::optional<StopConditions> stop = std::nullopt);

// a(1) = 1, a(n) = (n - 1) a(n - 1) + 1. Throws std::invalid_argument for n < 1
// and std::overflow_error past 64 bits.
[[nodiscard]] std::uint64_t one_depth_tree_path_count(unsigned branches);

// Hub "C1" with leaves "C2".."C{n+1}", one link pair per leaf. Each link owns
// one open fact under P1. Rule R1 keeps a link open, R2 closes it.
[[nodiscard]] Network make_one_depth_tree(unsigned branches);

// Close-links configuration on a generated tree: R1 omitted, hub to first leaf.
[[nodiscard]] Scenario one_depth_tree_scenario();

} // namespace sonarpath
