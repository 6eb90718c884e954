#include "sonarpath/error.hpp"
#include "sonarpath/scenario.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <numeric>
#include <stdexcept>

using namespace sonarpath;
using testing_support::fixture;
using testing_support::run_fixture;
using testing_support::scenario_of;

namespace {

std::uint64_t sum_of_lengths(const TraversalResult& result)
{
    std::uint64_t total = 0;
    for (const auto& p : result.final_paths)
        total += reported_length(p);
    return total;
}

Scenario plain(std::string start, std::string end)
{
    Scenario s;
    s.name = "plain";
    s.start = std::move(start);
    s.end = std::move(end);
    return s;
}

} // namespace

TEST_CASE("omitting R8 and R9 leaves seven rules")
{
    const auto& doc = fixture("model1.json");
    const auto prepared = apply_scenario(doc.network, scenario_of(doc, "s1"));
    CHECK(prepared.network.rules().size() == 7);
    CHECK(prepared.network.find_rule("R8") == nullptr);
    CHECK(prepared.network.find_rule("R9") == nullptr);
    CHECK(doc.network.rules().size() == 9); // base untouched
}

TEST_CASE("a fact override applies before traversal")
{
    const auto& doc = fixture("model2.json");
    const auto before = doc.network.content_hash();
    const auto prepared = apply_scenario(doc.network, scenario_of(doc, "s1"));
    CHECK(doc.network.find_fact("F39")->value);
    CHECK_FALSE(prepared.network.find_fact("F39")->value);
    CHECK(prepared.network.find_fact("F39")->owner == "C3");
    CHECK(doc.network.content_hash() == before);
}

TEST_CASE("an empty scenario leaves the network as it was")
{
    const auto& net = fixture("model1.json").network;
    const auto prepared = apply_scenario(net, plain("C1", "C5"));
    CHECK(prepared.network == net);
    CHECK(prepared.config.start == "C1");
    CHECK(prepared.config.end == "C5");
    CHECK(prepared.config.rule_cap == 100);
}

TEST_CASE("apply_scenario rejects unknown references")
{
    const auto& net = fixture("model1.json").network;
    auto s = plain("C1", "C5");
    s.omit_rules = {"R42"};
    CHECK_THROWS_AS((void)apply_scenario(net, s), ReferenceError);
    s = plain("C1", "C5");
    s.fact_overrides = {{"F404", true}};
    CHECK_THROWS_AS((void)apply_scenario(net, s), ReferenceError);
    CHECK_THROWS_AS((void)apply_scenario(net, plain("C1", "C77")), ReferenceError);
    s = plain("C1", "C5");
    s.goal = std::vector<GoalCondition>{{"F404", true}};
    CHECK_THROWS_AS((void)apply_scenario(net, s), ReferenceError);
}

TEST_CASE("goal F9:T holds on 272 of 360 paths in model 1 scenario 3")
{
    const auto run = run_fixture("model1.json", "s3");
    REQUIRE(run.goal_flags.has_value());
    CHECK(run.goal_flags->size() == 360);
    CHECK(std::count(run.goal_flags->begin(), run.goal_flags->end(), true) == 272);
    CHECK(run.metrics.goal_achieving_paths == 272);
}

TEST_CASE("an empty or absent goal reports N/A")
{
    const auto& net = fixture("model1.json").network;
    auto s = plain("C1", "C3");
    const auto none = run_scenario(net, s);
    CHECK_FALSE(none.metrics.goal_achieving_paths.has_value());
    CHECK_FALSE(none.goal_flags.has_value());
    s.goal = std::vector<GoalCondition>{};
    const auto empty = run_scenario(net, s);
    CHECK_FALSE(empty.metrics.goal_achieving_paths.has_value());
    REQUIRE_FALSE(empty.result.final_paths.empty());
    CHECK_FALSE(goal_check(empty.result, empty.result.final_paths[0], s.goal).has_value());
}

TEST_CASE("a goal on an untouched fact that matches its base value holds everywhere")
{
    const auto& net = fixture("model1.json").network;
    auto s = plain("C1", "C3");
    s.omit_rules = {"R9"};
    s.goal = std::vector<GoalCondition>{{"F5", true}}; // C4's P5, never reached
    const auto run = run_scenario(net, s);
    CHECK(run.metrics.goal_achieving_paths == run.metrics.final_reality_paths);
    CHECK(run.metrics.final_reality_paths > 0);
}

TEST_CASE("metrics for model 1 scenario 2")
{
    const auto run = run_fixture("model1.json", "s2");
    const auto& m = run.metrics;
    CHECK(m.final_reality_paths == 20);
    CHECK(m.goal_achieving_paths == 0);
    CHECK(m.total_connections == 140);
    CHECK(m.longest_path == Extreme{9, 6});
    CHECK(m.shortest_path == Extreme{3, 1});
    CHECK(m.total_connections == sum_of_lengths(run.result));
}

TEST_CASE("metrics of an empty result are zero")
{
    const auto m = metrics_from_lengths({}, std::nullopt);
    CHECK(m.final_reality_paths == 0);
    CHECK(m.total_connections == 0);
    CHECK(m.longest_path == Extreme{0, 0});
    CHECK(m.shortest_path == Extreme{0, 0});
    CHECK_FALSE(m.goal_achieving_paths.has_value());
}

TEST_CASE("metrics_from_lengths counts the extremes")
{
    const auto m = metrics_from_lengths({4, 2, 9, 9, 2, 2}, std::vector<bool>{true, false, true, false, false, true});
    CHECK(m.final_reality_paths == 6);
    CHECK(m.total_connections == 28);
    CHECK(m.longest_path == Extreme{9, 2});
    CHECK(m.shortest_path == Extreme{2, 3});
    CHECK(m.goal_achieving_paths == 3);
}

TEST_CASE("model 3 scenario 1: 65 paths, longest 10 (24), shortest 2 (1), 522 connections")
{
    const auto run = run_fixture("model3.json", "s1");
    const auto& m = run.metrics;
    CHECK(m.final_reality_paths == 65);
    CHECK(m.longest_path == Extreme{10, 24});
    CHECK(m.shortest_path == Extreme{2, 1});
    CHECK(m.total_connections == 522);
    CHECK(sum_of_lengths(run.result) == 1 * 2 + 4 * 4 + 12 * 6 + 24 * 8 + 24 * 10);
}

TEST_CASE("one-depth tree recurrence")
{
    CHECK(one_depth_tree_path_count(1) == 1);
    CHECK(one_depth_tree_path_count(5) == 65);
    CHECK(one_depth_tree_path_count(11) == 9864101);
    CHECK_THROWS_AS((void)one_depth_tree_path_count(0), std::invalid_argument);
    CHECK_THROWS_AS((void)one_depth_tree_path_count(40), std::overflow_error);
    // independent form: a(n) = sum over k of (n-1)!/(n-1-k)!
    for (unsigned n = 1; n <= 15; ++n) {
        std::uint64_t sum = 0;
        for (unsigned k = 0; k < n; ++k) {
            std::uint64_t falling = 1;
            for (unsigned j = 0; j < k; ++j)
                falling *= (n - 1 - j);
            sum += falling;
        }
        CHECK(one_depth_tree_path_count(n) == sum);
    }
}

TEST_CASE("generated trees produce the recurrence count")
{
    for (unsigned n = 1; n <= 6; ++n) {
        CAPTURE(n);
        const auto tree = make_one_depth_tree(n);
        CHECK(tree.containers().size() == n + 1);
        CHECK(tree.links().size() == 2 * n);
        CHECK(validate_network(tree).ok());
        const auto run = run_scenario(tree, one_depth_tree_scenario());
        CHECK(run.metrics.final_reality_paths == one_depth_tree_path_count(n));
    }
}

TEST_CASE("running scenario A first does not change scenario B")
{
    const auto& doc = fixture("model1.json");
    const auto alone = run_scenario(doc.network, scenario_of(doc, "s5")).metrics;
    (void)run_scenario(doc.network, scenario_of(doc, "s3"));
    (void)run_scenario(doc.network, scenario_of(doc, "s2"));
    auto after = run_scenario(doc.network, scenario_of(doc, "s5")).metrics;
    after.fastest_completion_seconds = alone.fastest_completion_seconds;
    CHECK(after == alone);
}

TEST_CASE("run_scenario overrides cap and stop")
{
    const auto& doc = fixture("model1.json");
    const auto run = run_scenario(doc.network, scenario_of(doc, "s3"), {}, 1, StopConditions{5, std::nullopt});
    CHECK(run.result.config.rule_cap == 1);
    CHECK(run.result.partial);
    CHECK(run.metrics.stopped_early);
    CHECK(run.metrics.final_reality_paths == 5);
}

TEST_CASE("memory estimate is positive and grows with the run")
{
    const auto small = run_fixture("model1.json", "s4").metrics.memory_estimate_bytes;
    const auto large = run_fixture("model1.json", "s3").metrics.memory_estimate_bytes;
    CHECK(small > 0);
    CHECK(large > small);
}
