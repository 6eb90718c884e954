#include "sonarpath/error.hpp"
#include "sonarpath/traversal.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <atomic>
#include <chrono>
#include <string>
#include <vector>

using namespace sonarpath;
using testing_support::fixture;
using testing_support::scenario_of;

namespace {

struct Engine {
    std::shared_ptr<const CompiledModel> model;
    EngineConfig config;
};

Engine prepare(const std::string& file, const std::string& scenario)
{
    const auto& doc = fixture(file);
    auto prepared = apply_scenario(doc.network, scenario_of(doc, scenario));
    return {CompiledModel::compile(std::move(prepared.network)), prepared.config};
}

EntitySlot slot(const Traversal& t, const std::string& id) { return t.model().index().slot_of(id); }

bool bit(const Traversal& t, FactBits bits, const std::string& fact)
{
    return bit_of(bits, t.model().index().fact_position(t.model().index().fact_index(fact)));
}

std::vector<std::string> rule_ids(const Traversal& t, const std::vector<RuleIndex>& rules)
{
    std::vector<std::string> out;
    for (auto r : rules)
        out.push_back(t.model().rule(r).id);
    return out;
}

// C1 -L1-> C2 with an open fact on the link, plus `count` generic rules that
// need only the open link. Rule Rk has success k / 100.
Network many_rules(int count)
{
    NetworkBuilder b;
    b.add_common_property("open", "P1");
    b.add_container("a", {}, std::nullopt, "C1");
    b.add_container("b", {}, std::nullopt, "C2");
    b.add_link("C1", "C2", {FactSpec{"P1", true, "F1"}}, std::nullopt, "L1");
    for (int k = 1; k <= count; ++k)
        b.add_rule({"R" + std::to_string(k), "", RuleKind::generic, k / 100.0,
                    {RuleCondition::on_property(Slot::link, "P1", true)}, {}, {}});
    return std::move(b).build();
}

// C1 -L1-> C2, C3 off to the side with fact F2 (false), environment fact E1.
// R1 crosses an open link; N1 sets F2 whenever E1 is false.
Network remote_writer(bool with_generic)
{
    NetworkBuilder b;
    b.add_common_property("open", "P1");
    b.add_common_property("flag", "P2");
    b.add_container("a", {}, std::nullopt, "C1");
    b.add_container("b", {}, std::nullopt, "C2");
    b.add_container("c", {FactSpec{"P2", false, "F2"}}, std::nullopt, "C3");
    b.add_link("C1", "C2", {FactSpec{"P1", true, "F1"}}, std::nullopt, "L1");
    b.add_fact(std::nullopt, false, std::nullopt, "E1");
    if (with_generic)
        b.add_rule({"R1", "", RuleKind::generic, 0.5, {RuleCondition::on_property(Slot::link, "P1", true)}, {}, {}});
    b.add_rule({"N1", "", RuleKind::normal, 0.9, {RuleCondition::on_fact("E1", false)},
                {RuleCondition::on_fact("F2", true), RuleCondition::on_fact("E1", true)}, {}});
    return std::move(b).build();
}

EngineConfig config(std::string start, std::string end)
{
    EngineConfig c;
    c.start = std::move(start);
    c.end = std::move(end);
    return c;
}

} // namespace

TEST_CASE("a fresh path clones base values")
{
    auto e = prepare("model1.json", "s3");
    Traversal t(e.model, e.config);
    const auto path = t.seed();
    const auto c = t.clone_connection(path, "C1", "L1", "C2");
    const auto& idx = t.model().index();
    CHECK(c.start_state.bits == idx.base_bits(slot(t, "C1")));
    CHECK(c.link_state.bits == idx.base_bits(slot(t, "L1")));
    CHECK(c.end_state.bits == idx.base_bits(slot(t, "C2")));
    CHECK(c.triggered_generic.empty());
}

TEST_CASE("clones read the path's active variants")
{
    auto e = prepare("model1.json", "s2"); // R9 closes links
    Traversal t(e.model, e.config);
    auto path = t.seed();
    auto c1 = t.clone_connection(path, "C1", "L1", "C2");
    t.run_rules(c1, path);
    REQUIRE(t.connection_is_valid(c1));
    path = t.commit_connection(path, c1);
    auto c2 = t.clone_connection(path, "C2", "L2", "C1");
    t.run_rules(c2, path);
    REQUIRE(t.connection_is_valid(c2));
    path = t.commit_connection(path, c2);
    const auto again = t.clone_connection(path, "C1", "L1", "C2");
    CHECK_FALSE(bit(t, again.link_state.bits, "F11"));
    CHECK(bit(t, again.end_state.bits, "F2")); // R1 set P2 on C2 earlier
}

TEST_CASE("mutating a clone leaves base and store untouched")
{
    auto e = prepare("model1.json", "s3");
    const auto hash = e.model->network().content_hash();
    Traversal t(e.model, e.config);
    const auto path = t.seed();
    const auto size = t.store().size();
    auto c = t.clone_connection(path, "C1", "L1", "C2");
    c.start_state.bits = ~FactBits{0};
    c.link_state.bits = 0;
    CHECK(e.model->network().content_hash() == hash);
    CHECK(t.store().size() == size);
    CHECK(t.clone_connection(path, "C1", "L1", "C2").link_state.bits == t.model().index().base_bits(slot(t, "L1")));
}

TEST_CASE("clone_connection rejects a link that does not join the containers")
{
    auto e = prepare("model1.json", "s3");
    Traversal t(e.model, e.config);
    CHECK_THROWS_AS((void)t.clone_connection(t.seed(), "C1", "L2", "C2"), ReferenceError);
    CHECK_THROWS_AS((void)t.clone_connection(t.seed(), "C1", "L99", "C2"), ReferenceError);
}

TEST_CASE("with chaining rules only, C1 to C2 triggers exactly R1")
{
    auto e = prepare("model1.json", "s1");
    Traversal t(e.model, e.config);
    const auto path = t.seed();
    auto c = t.clone_connection(path, "C1", "L1", "C2");
    REQUIRE_FALSE(bit(t, c.end_state.bits, "F2"));
    t.run_rules(c, path);
    CHECK(rule_ids(t, c.triggered_generic) == std::vector<std::string>{"R1"});
    CHECK(c.triggered_normal.empty());
    CHECK(bit(t, c.end_state.bits, "F2"));
}

TEST_CASE("only the connection matching a chaining rule is valid from C1")
{
    auto e = prepare("model1.json", "s1");
    Traversal t(e.model, e.config);
    const auto path = t.seed();
    auto to_c2 = t.clone_connection(path, "C1", "L1", "C2");
    auto to_c3 = t.clone_connection(path, "C1", "L7", "C3");
    t.run_rules(to_c2, path);
    t.run_rules(to_c3, path);
    CHECK(t.connection_is_valid(to_c2));
    CHECK_FALSE(t.connection_is_valid(to_c3));
    CHECK(to_c3.triggered_generic.empty());
}

TEST_CASE("rule cap stops generic triggering")
{
    const auto net = many_rules(12);
    auto model = CompiledModel::compile(net);
    for (int cap : {1, 2, 10, 12, 100}) {
        CAPTURE(cap);
        auto cfg = config("C1", "C2");
        cfg.rule_cap = cap;
        Traversal t(model, cfg);
        const auto path = t.seed();
        auto c = t.clone_connection(path, "C1", "L1", "C2");
        t.run_rules(c, path);
        CHECK(c.triggered_generic.size() == static_cast<std::size_t>(std::min(cap, 12)));
        // highest success first
        CHECK(t.model().rule(c.triggered_generic.front()).id == "R12");
    }
}

TEST_CASE("rule cap of one keeps the higher-success rule")
{
    auto model = CompiledModel::compile(many_rules(2));
    auto cfg = config("C1", "C2");
    cfg.rule_cap = 1;
    Traversal t(model, cfg);
    auto c = t.clone_connection(t.seed(), "C1", "L1", "C2");
    t.run_rules(c, t.seed());
    CHECK(rule_ids(t, c.triggered_generic) == std::vector<std::string>{"R2"});
}

TEST_CASE("chains run to a fixpoint with each rule once")
{
    // R1 (low success) enables R2 (high success); R2 only fires on the second pass
    NetworkBuilder b;
    b.add_common_property("open", "P1");
    b.add_common_property("stage", "P2");
    b.add_container("a", {}, std::nullopt, "C1");
    b.add_container("b", {FactSpec{"P2", false, "F2"}}, std::nullopt, "C2");
    b.add_link("C1", "C2", {FactSpec{"P1", true, "F1"}}, std::nullopt, "L1");
    b.add_rule({"R1", "", RuleKind::generic, 0.1, {RuleCondition::on_property(Slot::link, "P1", true)},
                {RuleCondition::on_property(Slot::end, "P2", true)}, {}});
    b.add_rule({"R2", "", RuleKind::generic, 0.9, {RuleCondition::on_property(Slot::end, "P2", true)},
                {RuleCondition::on_property(Slot::end, "P2", false)}, {}});
    auto model = CompiledModel::compile(std::move(b).build());
    Traversal t(model, config("C1", "C2"));
    auto c = t.clone_connection(t.seed(), "C1", "L1", "C2");
    t.run_rules(c, t.seed());
    CHECK(rule_ids(t, c.triggered_generic) == std::vector<std::string>{"R1", "R2"});
    CHECK_FALSE(bit(t, c.end_state.bits, "F2"));
}

TEST_CASE("a connection with no triggered rule is invalid")
{
    Connection empty;
    auto model = CompiledModel::compile(many_rules(1));
    Traversal t(model, config("C1", "C2"));
    CHECK_FALSE(t.connection_is_valid(empty));
}

TEST_CASE("normal rules alone authorize only when configured")
{
    auto model = CompiledModel::compile(remote_writer(false));
    Traversal strict(model, config("C1", "C2"));
    auto c = strict.clone_connection(strict.seed(), "C1", "L1", "C2");
    strict.run_rules(c, strict.seed());
    CHECK(c.triggered_generic.empty());
    CHECK(rule_ids(strict, c.triggered_normal) == std::vector<std::string>{"N1"});
    CHECK_FALSE(strict.connection_is_valid(c));

    auto cfg = config("C1", "C2");
    cfg.normal_rules_authorize = true;
    Traversal loose(model, cfg);
    CHECK(loose.connection_is_valid(c));
    CHECK(Traversal(model, config("C1", "C2")).run().final_paths.empty());
    CHECK(Traversal(model, cfg).run().final_paths.size() == 1);
}

TEST_CASE("termination on an exact repeat, continuation after a change")
{
    auto e = prepare("model1.json", "s3"); // R8 keeps links open
    Traversal t(e.model, e.config);
    auto path = t.seed();
    auto first = t.clone_connection(path, "C1", "L1", "C2");
    t.run_rules(first, path);
    CHECK_FALSE(t.check_path_termination(path, first)); // first traversal
    path = t.commit_connection(path, first);
    auto back = t.clone_connection(path, "C2", "L2", "C1");
    t.run_rules(back, path);
    REQUIRE(t.connection_is_valid(back));
    path = t.commit_connection(path, back);

    auto repeat = t.clone_connection(path, "C1", "L1", "C2");
    t.run_rules(repeat, path);
    REQUIRE(t.connection_is_valid(repeat));
    CHECK(t.check_path_termination(path, repeat));

    auto changed = repeat;
    changed.link_state.bits = with_bit(changed.link_state.bits, 0, false);
    CHECK_FALSE(t.check_path_termination(path, changed));
}

TEST_CASE("committing registers unchanged configurations once")
{
    auto e = prepare("model3.json", "s1");
    Traversal t(e.model, e.config);
    const auto result = t.run();
    // six fact-less containers touched (hub and five leaves): one variant each
    CHECK(result.variant_containers_created == 6);
    CHECK(t.store().container_count() == 6);
    for (const auto& v : t.store().variants())
        if (v.kind == EntityKind::container)
            CHECK(v.configuration == t.model().index().base_bits(v.entity));
}

TEST_CASE("two paths producing the same configuration share a variant")
{
    auto e = prepare("model1.json", "s3");
    Traversal t(e.model, e.config);
    auto a = t.clone_connection(t.seed(), "C1", "L1", "C2");
    t.run_rules(a, t.seed());
    const auto pa = t.commit_connection(t.seed(), a);
    const auto size = t.store().size();
    const auto pb = t.commit_connection(t.seed(), a);
    CHECK(t.store().size() == size);
    CHECK(pa.active == pb.active);
    CHECK(pa.tail->end_variant == pb.tail->end_variant);
}

TEST_CASE("a normal-rule write to a remote container creates its active variant")
{
    auto model = CompiledModel::compile(remote_writer(true));
    Traversal t(model, config("C1", "C2"));
    auto path = t.seed();
    const auto c3 = slot(t, "C3");
    CHECK(path.active[c3] == kNoVariant);
    auto c = t.clone_connection(path, "C1", "L1", "C2");
    t.run_rules(c, path);
    REQUIRE(t.connection_is_valid(c));
    REQUIRE(c.remote.size() == 1);
    path = t.commit_connection(path, c);
    REQUIRE(path.active[c3] != kNoVariant);
    CHECK(bit(t, t.store().get(path.active[c3]).configuration, "F2"));
    CHECK(path.environment[0]); // E1 written on this path only
    CHECK_FALSE(t.seed().environment[0]);

    const auto result = traverse(model->network(), config("C1", "C2"));
    REQUIRE(result.final_paths.size() == 1);
    const auto f2 = result.model->index().fact_index("F2");
    const auto e1 = result.model->index().fact_index("E1");
    CHECK(result.terminal_value(result.final_paths[0], f2));
    CHECK(result.terminal_value(result.final_paths[0], e1));
}

TEST_CASE("actions are recorded, and executed only when enabled and hooked")
{
    NetworkBuilder b(many_rules(1));
    b.add_action("echo on", true, "A1");
    b.add_action("echo off", false, "A2");
    b.remove_rule("R1");
    b.add_rule({"R1", "", RuleKind::generic, 1.0, {RuleCondition::on_property(Slot::link, "P1", true)}, {},
                {"A1", "A2"}});
    const auto net = std::move(b).build();
    std::vector<std::string> executed;
    RunHooks hooks;
    hooks.execute_action = [&](const Action& a) { executed.push_back(a.id); };
    const auto result = traverse(net, config("C1", "C2"), hooks);
    REQUIRE(result.final_paths.size() == 1);
    CHECK(result.tallies.actions_triggered == 2);
    CHECK(result.tallies.actions_executed == 1);
    CHECK(executed == std::vector<std::string>{"A1"});
    const auto dry = traverse(net, config("C1", "C2"));
    CHECK(dry.tallies.actions_triggered == 2);
    CHECK(dry.tallies.actions_executed == 0);
}

TEST_CASE("model 1 scenario 3 traversal")
{
    const auto run = testing_support::run_fixture("model1.json", "s3");
    CHECK(run.metrics.final_reality_paths == 360);
    CHECK(run.metrics.goal_achieving_paths == 272);
    CHECK(run.metrics.total_connections == 5522);
    CHECK(run.metrics.longest_path == Extreme{22, 6});
    CHECK(run.metrics.shortest_path == Extreme{3, 1});
    CHECK_FALSE(run.result.partial);
}

TEST_CASE("model 2 scenario 1 has no final path")
{
    const auto run = testing_support::run_fixture("model2.json", "s1");
    CHECK(run.metrics.final_reality_paths == 0);
    CHECK(run.result.final_paths.empty());
    CHECK_FALSE(run.result.partial);
}

TEST_CASE("hub with three leaves under close-links gives five paths")
{
    const auto run = run_scenario(make_one_depth_tree(3), one_depth_tree_scenario());
    CHECK(run.metrics.final_reality_paths == 5);
}

TEST_CASE("every final path ends at the end container and respects the cap")
{
    const auto run = testing_support::run_fixture("model1.json", "s2");
    const auto end = run.result.model->index().slot_of("C5");
    for (const auto& p : run.result.final_paths) {
        CHECK(p.head == end);
        CHECK(p.status == PathStatus::final);
        CHECK(p.active.empty()); // working state dropped
        for (const auto* c : p.connections())
            CHECK(c->triggered_generic.size() <= 100);
    }
}

TEST_CASE("start equal to end is a degenerate zero-length path")
{
    const auto result = traverse(fixture("model1.json").network, config("C2", "C2"));
    CHECK(result.degenerate);
    REQUIRE(result.final_paths.size() == 1);
    CHECK(result.final_paths[0].hops == 0);
    CHECK(reported_length(result.final_paths[0]) == 0);
}

TEST_CASE("unknown or non-container endpoints are reference errors")
{
    const auto& net = fixture("model1.json").network;
    CHECK_THROWS_AS((void)traverse(net, config("C9", "C1")), ReferenceError);
    CHECK_THROWS_AS((void)traverse(net, config("C1", "C9")), ReferenceError);
    CHECK_THROWS_AS((void)traverse(net, config("L1", "C2")), ReferenceError);
}

TEST_CASE("configuration limits")
{
    auto c = config("C1", "C2");
    CHECK_NOTHROW(check_config(c));
    c.rule_cap = 0;
    CHECK_THROWS_AS(check_config(c), ValidationError);
    c.rule_cap = 101;
    CHECK_THROWS_AS(check_config(c), ValidationError);
    c.rule_cap = 5;
    c.stop.max_seconds = -1.0;
    CHECK_THROWS_AS(check_config(c), ValidationError);
}

TEST_CASE("max_paths stops with a partial result")
{
    const auto& net = fixture("model1.json").network;
    auto prepared = apply_scenario(net, scenario_of(fixture("model1.json"), "s3"));
    prepared.config.stop.max_paths = 10;
    const auto result = traverse(prepared.network, prepared.config);
    CHECK(result.partial);
    CHECK(result.stop_reason == StopReason::max_paths);
    CHECK(result.final_paths.size() == 10);
}

TEST_CASE("a preset stop flag yields an immediate partial result")
{
    std::atomic<bool> stop{true};
    RunHooks hooks;
    hooks.stop_flag = &stop;
    const auto& doc = fixture("model1.json");
    auto prepared = apply_scenario(doc.network, scenario_of(doc, "s3"));
    const auto result = traverse(prepared.network, prepared.config, hooks);
    CHECK(result.partial);
    CHECK(result.stop_reason == StopReason::external);
    CHECK(result.final_paths.empty());
}

TEST_CASE("max_seconds stops a long run promptly")
{
    const auto& doc = fixture("model3.json");
    auto prepared = apply_scenario(doc.network, scenario_of(doc, "s4"));
    prepared.config.stop.max_seconds = 0.3;
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = traverse(prepared.network, prepared.config);
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - t0;
    CHECK(result.partial);
    CHECK(result.stop_reason == StopReason::max_seconds);
    CHECK(took.count() < 1.3);
}

TEST_CASE("status and reason names")
{
    CHECK(std::string(to_string(StopReason::max_paths)) == "max_paths");
    CHECK(std::string(to_string(PathStatus::dead_end)) == "dead-end");
}
