#include "sonarpath/brute_force.hpp"
#include "sonarpath/report.hpp"
#include "random_models.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <set>
#include <thread>

using namespace sonarpath;
using testing_support::fixture;
using testing_support::random_corpus;
using testing_support::scenario_of;

namespace {

std::vector<OraclePath> sorted(std::vector<OraclePath> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

std::string report_text(const Network& net, const Scenario& sc)
{
    return report_to_json(make_report(sc, run_scenario(net, sc)), false);
}

void check_no_repeated_state(const std::vector<OraclePath>& paths)
{
    for (const auto& p : paths) {
        std::set<OracleConnection> seen(p.connections.begin(), p.connections.end());
        CHECK(seen.size() == p.connections.size());
    }
    std::set<OraclePath> distinct(paths.begin(), paths.end());
    CHECK(distinct.size() == paths.size());
}

Metrics without_timing(Metrics m)
{
    m.fastest_completion_seconds = 0;
    return m;
}

} // namespace

TEST_CASE("random corpus is large enough")
{
    CHECK(random_corpus().size() >= 10);
    std::size_t multi = 0;
    std::size_t with_normal = 0;
    for (const auto& m : random_corpus()) {
        const auto run = run_scenario(m.network, m.scenario);
        MESSAGE(m.network.name() << ": " << m.network.containers().size() << " containers, "
                                 << m.network.links().size() << " links, " << m.network.rules().size()
                                 << " rules, " << run.metrics.final_reality_paths << " paths");
        multi += run.metrics.final_reality_paths > 1 ? 1 : 0;
        with_normal += std::any_of(m.network.rules().begin(), m.network.rules().end(),
                                   [](const Rule& r) { return r.kind == RuleKind::normal; });
    }
    CHECK(multi == random_corpus().size());
    CHECK(with_normal >= 3);
}

TEST_CASE("determinism: reports are byte-identical without timing")
{
    const auto& doc = fixture("model1.json");
    for (const auto& sc : doc.scenarios)
        CHECK(report_text(doc.network, sc) == report_text(doc.network, sc));
    const auto& m2 = fixture("model2.json");
    CHECK(report_text(m2.network, scenario_of(m2, "s5")) == report_text(m2.network, scenario_of(m2, "s5")));
    for (const auto& m : random_corpus())
        CHECK(report_text(m.network, m.scenario) == report_text(m.network, m.scenario));
}

TEST_CASE("oracle equivalence on model 1")
{
    const auto& doc = fixture("model1.json");
    for (const auto& sc : doc.scenarios) {
        CAPTURE(sc.name);
        CHECK(sorted(oracle_view(run_scenario(doc.network, sc).result)) ==
              sorted(brute_force_enumerate(doc.network, sc)));
    }
}

TEST_CASE("oracle equivalence on trees up to five branches")
{
    for (unsigned n = 1; n <= 5; ++n) {
        CAPTURE(n);
        const auto tree = make_one_depth_tree(n);
        const auto sc = one_depth_tree_scenario();
        CHECK(sorted(oracle_view(run_scenario(tree, sc).result)) == sorted(brute_force_enumerate(tree, sc)));
    }
}

TEST_CASE("oracle equivalence on random models")
{
    std::size_t compared = 0;
    for (const auto& m : random_corpus()) {
        CAPTURE(m.network.name());
        const auto engine = sorted(oracle_view(run_scenario(m.network, m.scenario).result));
        const auto oracle = sorted(brute_force_enumerate(m.network, m.scenario));
        CHECK(engine.size() == oracle.size());
        CHECK(engine == oracle);
        ++compared;
    }
    CHECK(compared >= 10);
}

TEST_CASE("oracle equivalence with normal rules authorizing")
{
    for (const auto& m : random_corpus()) {
        CAPTURE(m.network.name());
        auto prepared = apply_scenario(m.network, m.scenario);
        prepared.config.normal_rules_authorize = true;
        prepared.config.stop.max_paths = 5000;
        const auto result = traverse(prepared.network, prepared.config);
        if (result.partial)
            continue;
        CHECK(sorted(oracle_view(result)) == sorted(brute_force_enumerate(prepared.network, prepared.config)));
    }
}

TEST_CASE("no final path repeats a connection state, no two final paths coincide")
{
    const auto& doc = fixture("model1.json");
    for (const auto& sc : doc.scenarios)
        check_no_repeated_state(oracle_view(run_scenario(doc.network, sc).result));
    for (const auto& m : random_corpus())
        check_no_repeated_state(oracle_view(run_scenario(m.network, m.scenario).result));
}

TEST_CASE("rule cap ceiling holds for caps 1, 2 and 10")
{
    const auto& doc = fixture("model1.json");
    for (int cap : {1, 2, 10}) {
        CAPTURE(cap);
        auto check_run = [&](const Network& net, Scenario sc) {
            sc.rule_cap = cap;
            const auto run = run_scenario(net, sc, {}, std::nullopt, StopConditions{20000, std::nullopt});
            for (const auto& p : run.result.final_paths)
                for (const auto* c : p.connections())
                    CHECK(c->triggered_generic.size() <= static_cast<std::size_t>(cap));
            if (!run.result.partial)
                CHECK(sorted(oracle_view(run.result)) == sorted(brute_force_enumerate(net, sc)));
        };
        for (const auto& sc : doc.scenarios)
            check_run(doc.network, sc);
        for (const auto& m : random_corpus())
            check_run(m.network, m.scenario);
    }
}

TEST_CASE("base network hash is unchanged by traversal")
{
    for (const char* file : {"model1.json", "model2.json", "model3.json"}) {
        const auto& doc = fixture(file);
        const auto before = doc.network.content_hash();
        const Network copy = doc.network;
        for (const auto& sc : doc.scenarios)
            (void)run_scenario(doc.network, sc, {}, std::nullopt, StopConditions{2000, 2.0});
        CHECK(doc.network.content_hash() == before);
        CHECK(doc.network == copy);
    }
}

TEST_CASE("variant store holds each configuration once and a warm store gains nothing")
{
    auto check_store = [](const Network& net, const Scenario& sc) {
        auto prepared = apply_scenario(net, sc);
        prepared.config.stop.max_paths = 20000;
        auto model = CompiledModel::compile(std::move(prepared.network));
        auto store = std::make_shared<VariantStore>();
        const auto first = Traversal(model, prepared.config, {}, store).run();
        std::set<std::pair<EntitySlot, FactBits>> distinct;
        for (const auto& v : store->variants())
            distinct.insert({v.entity, v.configuration});
        CHECK(distinct.size() == store->size());
        const auto size = store->size();
        const auto second = Traversal(model, prepared.config, {}, store).run();
        CHECK(store->size() == size);
        CHECK(second.final_paths.size() == first.final_paths.size());
        CHECK(second.variant_containers_created == first.variant_containers_created);
        CHECK(second.variant_links_created == first.variant_links_created);
    };
    const auto& doc = fixture("model1.json");
    for (const auto& sc : doc.scenarios)
        check_store(doc.network, sc);
    const auto& m2 = fixture("model2.json");
    check_store(m2.network, scenario_of(m2, "s5"));
    for (const auto& m : random_corpus())
        check_store(m.network, m.scenario);
}

TEST_CASE("metrics accounting identity on every run")
{
    auto check_run = [](const Network& net, const Scenario& sc) {
        const auto run = run_scenario(net, sc, {}, std::nullopt, StopConditions{20000, std::nullopt});
        std::uint64_t total = 0;
        for (const auto& p : run.result.final_paths)
            total += reported_length(p);
        CHECK(run.metrics.total_connections == total);
        CHECK(run.metrics.final_reality_paths == run.result.final_paths.size());
        if (run.metrics.final_reality_paths > 0)
            CHECK(run.metrics.longest_path.length >= run.metrics.shortest_path.length);
        const auto report = make_report(sc, run);
        CHECK(recompute_metrics(parse_report(report_to_json(report))) == run.metrics);
    };
    for (const char* file : {"model1.json", "model2.json"}) {
        const auto& doc = fixture(file);
        for (const auto& sc : doc.scenarios)
            check_run(doc.network, sc);
    }
    const auto& m3 = fixture("model3.json");
    check_run(m3.network, scenario_of(m3, "s1"));
    for (const auto& m : random_corpus())
        check_run(m.network, m.scenario);
}

TEST_CASE("custom properties never change a result")
{
    const auto& doc = fixture("model1.json");
    NetworkBuilder annotated;
    annotated.set_name(doc.network.name());
    for (const auto& cp : doc.network.common_properties())
        annotated.put(cp);
    for (const auto& f : doc.network.facts())
        annotated.put(f);
    for (auto c : doc.network.containers()) {
        c.custom_properties.push_back({"X" + c.id, "os: linux", std::string("P1"), std::nullopt});
        annotated.put(c);
    }
    for (auto l : doc.network.links()) {
        l.custom_properties.push_back({"X" + l.id, "port 22", std::nullopt, std::string("F1")});
        annotated.put(l);
    }
    for (const auto& r : doc.network.rules())
        annotated.put(r);
    const auto with = annotated.build();
    REQUIRE(validate_network(with).ok());
    const auto without = NetworkBuilder(with).clear_custom_properties().build();
    CHECK(without == doc.network);
    for (const auto& sc : doc.scenarios) {
        CAPTURE(sc.name);
        const auto a = run_scenario(with, sc);
        const auto b = run_scenario(without, sc);
        CHECK(without_timing(a.metrics) == without_timing(b.metrics));
        CHECK(sorted(oracle_view(a.result)) == sorted(oracle_view(b.result)));
    }
}

TEST_CASE("scenario isolation across fixtures")
{
    const auto& doc = fixture("model2.json");
    const auto alone = without_timing(run_scenario(doc.network, scenario_of(doc, "s4")).metrics);
    for (const auto& sc : doc.scenarios)
        (void)run_scenario(doc.network, sc, {}, std::nullopt, StopConditions{3000, std::nullopt});
    CHECK(without_timing(run_scenario(doc.network, scenario_of(doc, "s4")).metrics) == alone);
}

TEST_CASE("a time limit fires within one second of the threshold")
{
    const auto& doc = fixture("model3.json");
    for (double limit : {0.2, 1.0}) {
        CAPTURE(limit);
        const auto t0 = std::chrono::steady_clock::now();
        const auto run = run_scenario(doc.network, scenario_of(doc, "s5"), {}, std::nullopt,
                                      StopConditions{std::nullopt, limit});
        const std::chrono::duration<double> took = std::chrono::steady_clock::now() - t0;
        CHECK(run.result.partial);
        CHECK(run.result.stop_reason == StopReason::max_seconds);
        CHECK(took.count() >= limit);
        CHECK(took.count() < limit + 1.0);
    }
}

TEST_CASE("an external stop request fires within one second")
{
    const auto& doc = fixture("model3.json");
    std::atomic<bool> stop{false};
    RunHooks hooks;
    hooks.stop_flag = &stop;
    std::chrono::steady_clock::time_point requested;
    std::thread stopper([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(300));
        requested = std::chrono::steady_clock::now();
        stop = true;
    });
    const auto run = run_scenario(doc.network, scenario_of(doc, "s4"), hooks, std::nullopt,
                                  StopConditions{std::nullopt, 30.0});
    const auto finished = std::chrono::steady_clock::now();
    stopper.join();
    CHECK(run.result.partial);
    CHECK(run.result.stop_reason == StopReason::external);
    CHECK(std::chrono::duration<double>(finished - requested).count() < 1.0);
}

TEST_CASE("a path limit stops at exactly that many paths")
{
    const auto& doc = fixture("model2.json");
    for (std::uint64_t cap : {1, 10, 500}) {
        const auto run = run_scenario(doc.network, scenario_of(doc, "s2"), {}, std::nullopt,
                                      StopConditions{cap, std::nullopt});
        CHECK(run.result.partial);
        CHECK(run.metrics.final_reality_paths == cap);
    }
}
