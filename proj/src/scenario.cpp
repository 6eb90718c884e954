#include "sonarpath/scenario.hpp"

#include "sonarpath/error.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sonarpath {

PreparedScenario apply_scenario(const Network& network, const Scenario& scenario)
{
    if (!network.find_container(scenario.start))
        throw ReferenceError("scenario '" + scenario.name + "': unknown start container '" + scenario.start + "'");
    if (!network.find_container(scenario.end))
        throw ReferenceError("scenario '" + scenario.name + "': unknown end container '" + scenario.end + "'");
    NetworkBuilder builder(network);
    for (const auto& id : scenario.omit_rules)
        builder.remove_rule(id);
    for (const auto& [fact, value] : scenario.fact_overrides)
        builder.set_fact_value(fact, value);
    if (scenario.goal)
        for (const auto& g : *scenario.goal)
            if (!network.find_fact(g.fact))
                throw ReferenceError("scenario '" + scenario.name + "': unknown goal fact '" + g.fact + "'");

    PreparedScenario out{std::move(builder).build(), {}};
    out.config.rule_cap = scenario.rule_cap;
    out.config.start = scenario.start;
    out.config.end = scenario.end;
    if (scenario.stop)
        out.config.stop = *scenario.stop;
    return out;
}

std::optional<bool> goal_check(const TraversalResult& result, const RealityPath& path,
                               const std::optional<std::vector<GoalCondition>>& goal)
{
    if (!goal || goal->empty())
        return std::nullopt;
    const ModelIndex& index = result.model->index();
    return std::all_of(goal->begin(), goal->end(), [&](const GoalCondition& g) {
        return result.terminal_value(path, index.fact_index(g.fact)) == g.value;
    });
}

Metrics metrics_from_lengths(const std::vector<std::uint64_t>& lengths,
                             const std::optional<std::vector<bool>>& goal_flags)
{
    Metrics m;
    m.final_reality_paths = lengths.size();
    if (goal_flags)
        m.goal_achieving_paths = static_cast<std::uint64_t>(std::count(goal_flags->begin(), goal_flags->end(), true));
    if (lengths.empty())
        return m;
    m.longest_path.length = 0;
    m.shortest_path.length = std::numeric_limits<std::uint64_t>::max();
    for (const auto len : lengths) {
        m.total_connections += len;
        if (len > m.longest_path.length)
            m.longest_path = {len, 0};
        if (len == m.longest_path.length)
            ++m.longest_path.count;
        if (len < m.shortest_path.length)
            m.shortest_path = {len, 0};
        if (len == m.shortest_path.length)
            ++m.shortest_path.count;
    }
    return m;
}

namespace {

std::optional<std::vector<bool>> goal_flags_of(const TraversalResult& result,
                                               const std::optional<std::vector<GoalCondition>>& goal)
{
    if (!goal || goal->empty())
        return std::nullopt;
    std::vector<bool> flags;
    flags.reserve(result.final_paths.size());
    for (const auto& p : result.final_paths)
        flags.push_back(*goal_check(result, p, goal));
    return flags;
}

Metrics measure(const TraversalResult& result, const std::optional<std::vector<bool>>& flags)
{
    std::vector<std::uint64_t> lengths;
    lengths.reserve(result.final_paths.size());
    for (const auto& p : result.final_paths)
        lengths.push_back(reported_length(p));
    Metrics m = metrics_from_lengths(lengths, flags);
    m.fastest_completion_seconds = result.elapsed_seconds;
    m.variant_containers_created = result.variant_containers_created;
    m.variant_links_created = result.variant_links_created;
    m.stopped_early = result.partial;

    const ModelIndex& index = result.model->index();
    m.memory_estimate_bytes = index.entity_count() * sizeof(FactBits) +
                              result.store->size() * sizeof(Variant) +
                              result.tallies.connections_committed * sizeof(ConnectionRecord) +
                              result.final_paths.size() * sizeof(RealityPath);
    return m;
}

} // namespace

Metrics compute_metrics(const TraversalResult& result, const std::optional<std::vector<GoalCondition>>& goal)
{
    return measure(result, goal_flags_of(result, goal));
}

ScenarioRun run_scenario(const Network& network, const Scenario& scenario, RunHooks hooks,
                         std::optional<int> rule_cap, std::optional<StopConditions> stop)
{
    PreparedScenario prepared = apply_scenario(network, scenario);
    if (rule_cap)
        prepared.config.rule_cap = *rule_cap;
    if (stop) {
        if (stop->max_paths)
            prepared.config.stop.max_paths = stop->max_paths;
        if (stop->max_seconds)
            prepared.config.stop.max_seconds = stop->max_seconds;
    }
    Traversal engine(CompiledModel::compile(std::move(prepared.network)), prepared.config, std::move(hooks));
    ScenarioRun run{engine.run(), {}, {}};
    run.goal_flags = goal_flags_of(run.result, scenario.goal);
    run.metrics = measure(run.result, run.goal_flags);
    return run;
}

std::uint64_t one_depth_tree_path_count(unsigned branches)
{
    if (branches < 1)
        throw std::invalid_argument("branch count must be at least 1");
    std::uint64_t a = 1;
    for (unsigned n = 2; n <= branches; ++n) {
        if (a > (std::numeric_limits<std::uint64_t>::max() - 1) / (n - 1))
            throw std::overflow_error("path count exceeds 64 bits");
        a = (n - 1) * a + 1;
    }
    return a;
}

Network make_one_depth_tree(unsigned branches)
{
    if (branches < 1)
        throw std::invalid_argument("branch count must be at least 1");
    NetworkBuilder b;
    b.set_name("one-depth tree (" + std::to_string(branches) + " leaves)");
    const std::string open = b.add_common_property("link open", "P1");
    const std::string hub = b.add_container("hub", {}, std::nullopt, "C1");
    for (unsigned i = 1; i <= branches; ++i) {
        const std::string leaf = b.add_container("leaf " + std::to_string(i), {}, std::nullopt,
                                                 "C" + std::to_string(i + 1));
        b.add_link(hub, leaf, {FactSpec{open, true, std::nullopt}});
        b.add_link(leaf, hub, {FactSpec{open, true, std::nullopt}});
    }
    b.add_rule(Rule{"R1", "keep link open", RuleKind::generic, 1.0,
                    {RuleCondition::on_property(Slot::link, open, true)},
                    {RuleCondition::on_property(Slot::link, open, true)},
                    {}});
    b.add_rule(Rule{"R2", "close link", RuleKind::generic, 1.0,
                    {RuleCondition::on_property(Slot::link, open, true)},
                    {RuleCondition::on_property(Slot::link, open, false)},
                    {}});
    return std::move(b).build();
}

Scenario one_depth_tree_scenario()
{
    Scenario s;
    s.name = "close-links";
    s.start = "C1";
    s.end = "C2";
    s.omit_rules = {"R1"};
    return s;
}

} // namespace sonarpath
