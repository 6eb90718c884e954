#include "sonarpath/report.hpp"

#include "json_util.hpp"
#include "sonarpath/ids.hpp"

#include <cmath>
#include <cstdio>
#include <map>

namespace sonarpath {

using namespace json_util;

RunReport make_report(const Scenario& scenario, const ScenarioRun& run, bool include_paths)
{
    const TraversalResult& result = run.result;
    const ModelIndex& index = result.model->index();
    const Network& net = result.model->network();

    RunReport report;
    report.scenario = scenario;
    report.config = result.config;
    report.metrics = run.metrics;
    report.tallies = result.tallies;
    report.partial = result.partial;
    report.stop_reason = result.stop_reason;

    if (!include_paths)
        return report;
    report.paths.reserve(result.final_paths.size());
    for (std::size_t i = 0; i < result.final_paths.size(); ++i) {
        const RealityPath& path = result.final_paths[i];
        ReportPath rp;
        rp.length = reported_length(path);
        if (run.goal_flags)
            rp.goal = (*run.goal_flags)[i];
        for (const ConnectionRecord* r : path.connections()) {
            ReportConnection c{index.entity_id(r->start), index.entity_id(r->link), index.entity_id(r->end), {}, {}};
            for (const auto ri : r->triggered_generic)
                c.generic_rules.push_back(net.rules()[ri].id);
            for (const auto ri : r->triggered_normal())
                c.normal_rules.push_back(net.rules()[ri].id);
            rp.connections.push_back(std::move(c));
        }
        for (FactIndex f = 0; f < net.facts().size(); ++f) {
            const bool before = net.facts()[f].value;
            const bool after = result.terminal_value(path, f);
            if (before != after)
                rp.terminal_changes.push_back({net.facts()[f].id, before, after});
        }
        report.paths.push_back(std::move(rp));
    }
    return report;
}

Metrics recompute_metrics(const RunReport& report)
{
    std::vector<std::uint64_t> lengths;
    std::optional<std::vector<bool>> flags;
    for (const auto& p : report.paths) {
        lengths.push_back(p.connections.empty() ? 0 : p.connections.size() + 1);
        if (p.goal) {
            if (!flags)
                flags.emplace();
            flags->push_back(*p.goal);
        }
    }
    if (!report.metrics.goal_achieving_paths)
        flags.reset();
    else if (!flags)
        flags.emplace();
    Metrics m = metrics_from_lengths(lengths, flags);
    m.fastest_completion_seconds = report.metrics.fastest_completion_seconds;
    m.variant_containers_created = report.metrics.variant_containers_created;
    m.variant_links_created = report.metrics.variant_links_created;
    m.memory_estimate_bytes = report.metrics.memory_estimate_bytes;
    m.stopped_early = report.metrics.stopped_early;
    return m;
}

// ---------------------------------------------------------------------------
// Formatting

std::string format_duration(double seconds)
{
    if (seconds < 1.0)
        return "< 1 second";
    const auto total = static_cast<long long>(seconds);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld", total / 3600, (total / 60) % 60, total % 60);
    return buf;
}

std::string format_memory(std::uint64_t bytes)
{
    constexpr double mib = 1024.0 * 1024.0;
    if (bytes >= 1024ULL * 1024 * 1024) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f GB", static_cast<double>(bytes) / (mib * 1024.0));
        return buf;
    }
    return std::to_string(static_cast<std::uint64_t>(std::ceil(static_cast<double>(bytes) / mib))) + " MB";
}

std::string describe_configuration(const Scenario& scenario)
{
    std::string out;
    const auto& omit = scenario.omit_rules;
    if (!omit.empty()) {
        out = "Omit ";
        for (std::size_t i = 0; i < omit.size(); ++i) {
            if (i > 0)
                out += (omit.size() == 2 ? " and " : ", ");
            out += omit[i];
        }
    }
    std::map<std::string, bool, NaturalLess> ordered(scenario.fact_overrides.begin(), scenario.fact_overrides.end());
    std::string overrides;
    for (const auto& [fact, value] : ordered) {
        if (!overrides.empty())
            overrides += ", ";
        overrides += fact + (value ? ":T" : ":F");
    }
    if (!overrides.empty())
        out += (out.empty() ? "" : " ") + overrides;
    return out.empty() ? "All rules" : out;
}

const std::string& csv_header()
{
    static const std::string header =
        "Scenario #,Start Container,End Container,Configuration,Description,Fastest Completion Time,"
        "Final Reality Paths,# Goal Achieving Paths,Total Connections,Longest Path,Shortest Path,"
        "Variant Containers Created,Variant Links Created,Memory Usage";
    return header;
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

std::string extreme(const Extreme& e) { return std::to_string(e.length) + " (" + std::to_string(e.count) + ")"; }

} // namespace

std::string csv_row(const std::string& index, const RunReport& report)
{
    const Metrics& m = report.metrics;
    const std::vector<std::string> fields{
        index,
        report.scenario.start,
        report.scenario.end,
        describe_configuration(report.scenario),
        report.scenario.description.value_or(""),
        format_duration(m.fastest_completion_seconds),
        std::to_string(m.final_reality_paths),
        m.goal_achieving_paths ? std::to_string(*m.goal_achieving_paths) : "N/A",
        std::to_string(m.total_connections),
        extreme(m.longest_path),
        extreme(m.shortest_path),
        std::to_string(m.variant_containers_created),
        std::to_string(m.variant_links_created),
        format_memory(m.memory_estimate_bytes),
    };
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0)
            out += ',';
        out += csv_field(fields[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

ordered_json strings(const std::vector<std::string>& v) { return ordered_json(v); }

StopReason stop_reason_from(const std::string& s, const std::string& path)
{
    for (auto r : {StopReason::none, StopReason::max_paths, StopReason::max_seconds, StopReason::external})
        if (s == to_string(r))
            return r;
    fail(path, "unknown stop reason '" + s + "'");
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& path)
{
    std::vector<std::string> out;
    if (const json* v = optional_field(obj, key))
        for (std::size_t i = 0; i < as_array(*v, path + "." + key).size(); ++i)
            out.push_back(as_string((*v)[i], item(path + "." + key, i)));
    return out;
}

Extreme parse_extreme(const json& obj, const char* key, const std::string& path)
{
    const json& e = require(obj, key, path);
    const std::string p = path + "." + key;
    return {as_count(require(e, "length", p), p + ".length"), as_count(require(e, "count", p), p + ".count")};
}

} // namespace

std::string report_to_json(const RunReport& report, bool include_timing)
{
    ordered_json doc;
    doc["format"] = kReportFormat;

    const Scenario& s = report.scenario;
    ordered_json sc{{"name", s.name}};
    if (s.description)
        sc["description"] = *s.description;
    sc["start"] = s.start;
    sc["end"] = s.end;
    sc["omit_rules"] = strings(s.omit_rules);
    sc["fact_overrides"] = ordered_json::object();
    for (const auto& [k, v] : s.fact_overrides)
        sc["fact_overrides"][k] = v;
    if (s.goal) {
        sc["goal"] = ordered_json::array();
        for (const auto& g : *s.goal)
            sc["goal"].push_back({{"fact", g.fact}, {"value", g.value}});
    }
    doc["scenario"] = std::move(sc);

    const EngineConfig& c = report.config;
    ordered_json stop = ordered_json::object();
    if (c.stop.max_paths)
        stop["max_paths"] = *c.stop.max_paths;
    if (c.stop.max_seconds)
        stop["max_seconds"] = *c.stop.max_seconds;
    doc["config"] = {{"rule_cap", c.rule_cap},
                     {"start", c.start},
                     {"end", c.end},
                     {"stop", std::move(stop)},
                     {"normal_rules_authorize", c.normal_rules_authorize}};

    const Metrics& m = report.metrics;
    ordered_json mj;
    if (include_timing) {
        mj["fastest_completion_time"] = format_duration(m.fastest_completion_seconds);
        mj["elapsed_seconds"] = m.fastest_completion_seconds;
    }
    mj["final_reality_paths"] = m.final_reality_paths;
    mj["goal_achieving_paths"] = m.goal_achieving_paths ? ordered_json(*m.goal_achieving_paths) : ordered_json("N/A");
    mj["total_connections"] = m.total_connections;
    mj["longest_path"] = {{"length", m.longest_path.length}, {"count", m.longest_path.count}};
    mj["shortest_path"] = {{"length", m.shortest_path.length}, {"count", m.shortest_path.count}};
    mj["variant_containers_created"] = m.variant_containers_created;
    mj["variant_links_created"] = m.variant_links_created;
    mj["memory_estimate_bytes"] = m.memory_estimate_bytes;
    mj["stopped_early"] = m.stopped_early;
    doc["metrics"] = std::move(mj);

    doc["partial"] = report.partial;
    doc["stop_reason"] = to_string(report.stop_reason);

    ordered_json paths = ordered_json::array();
    for (const auto& p : report.paths) {
        ordered_json pj{{"length", p.length}};
        if (p.goal)
            pj["goal"] = *p.goal;
        ordered_json conns = ordered_json::array();
        for (const auto& cn : p.connections) {
            ordered_json cj{{"start", cn.start}, {"link", cn.link}, {"end", cn.end}, {"rules", strings(cn.generic_rules)}};
            if (!cn.normal_rules.empty())
                cj["normal_rules"] = strings(cn.normal_rules);
            conns.push_back(std::move(cj));
        }
        pj["connections"] = std::move(conns);
        ordered_json changes = ordered_json::array();
        for (const auto& t : p.terminal_changes)
            changes.push_back({{"fact", t.fact}, {"from", t.from}, {"to", t.to}});
        pj["terminal_changes"] = std::move(changes);
        paths.push_back(std::move(pj));
    }
    doc["paths"] = std::move(paths);

    const TraversalTallies& t = report.tallies;
    doc["tallies"] = {{"paths_popped", t.paths_popped},
                      {"candidates_evaluated", t.candidates_evaluated},
                      {"connections_committed", t.connections_committed},
                      {"dead_ended", t.dead_ended},
                      {"loop_terminated", t.loop_terminated},
                      {"skipped_postconditions", t.skipped_postconditions},
                      {"actions_triggered", t.actions_triggered},
                      {"actions_executed", t.actions_executed}};
    return doc.dump(2) + "\n";
}

RunReport parse_report(std::string_view text)
{
    const json doc = parse_text(text);
    if (!doc.is_object())
        fail("$", "expected an object at the top level");
    if (as_integer(require(doc, "format", "$"), "format") != kReportFormat)
        fail("format", "unsupported report format");

    RunReport r;
    const json& sc = require(doc, "scenario", "$");
    r.scenario.name = string_field(sc, "name", "scenario");
    r.scenario.description = optional_string(sc, "description", "scenario");
    r.scenario.start = string_field(sc, "start", "scenario");
    r.scenario.end = string_field(sc, "end", "scenario");
    r.scenario.omit_rules = string_list(sc, "omit_rules", "scenario");
    if (const json* f = optional_field(sc, "fact_overrides"))
        for (const auto& [k, v] : f->items())
            r.scenario.fact_overrides[k] = as_bool(v, "scenario.fact_overrides." + k);
    if (const json* g = optional_field(sc, "goal")) {
        r.scenario.goal.emplace();
        for (std::size_t i = 0; i < as_array(*g, "scenario.goal").size(); ++i) {
            const std::string p = item("scenario.goal", i);
            r.scenario.goal->push_back({string_field((*g)[i], "fact", p), as_bool(require((*g)[i], "value", p), p)});
        }
    }

    const json& cj = require(doc, "config", "$");
    r.config.rule_cap = static_cast<int>(as_integer(require(cj, "rule_cap", "config"), "config.rule_cap"));
    r.config.start = string_field(cj, "start", "config");
    r.config.end = string_field(cj, "end", "config");
    r.scenario.rule_cap = r.config.rule_cap;
    if (const json* st = optional_field(cj, "stop")) {
        if (const json* v = optional_field(*st, "max_paths"))
            r.config.stop.max_paths = as_count(*v, "config.stop.max_paths");
        if (const json* v = optional_field(*st, "max_seconds"))
            r.config.stop.max_seconds = as_number(*v, "config.stop.max_seconds");
    }
    if (const json* v = optional_field(cj, "normal_rules_authorize"))
        r.config.normal_rules_authorize = as_bool(*v, "config.normal_rules_authorize");

    const json& mj = require(doc, "metrics", "$");
    Metrics& m = r.metrics;
    if (const json* v = optional_field(mj, "elapsed_seconds"))
        m.fastest_completion_seconds = as_number(*v, "metrics.elapsed_seconds");
    m.final_reality_paths = as_count(require(mj, "final_reality_paths", "metrics"), "metrics.final_reality_paths");
    const json& goal = require(mj, "goal_achieving_paths", "metrics");
    if (!goal.is_string())
        m.goal_achieving_paths = as_count(goal, "metrics.goal_achieving_paths");
    m.total_connections = as_count(require(mj, "total_connections", "metrics"), "metrics.total_connections");
    m.longest_path = parse_extreme(mj, "longest_path", "metrics");
    m.shortest_path = parse_extreme(mj, "shortest_path", "metrics");
    m.variant_containers_created =
        as_count(require(mj, "variant_containers_created", "metrics"), "metrics.variant_containers_created");
    m.variant_links_created = as_count(require(mj, "variant_links_created", "metrics"), "metrics.variant_links_created");
    if (const json* v = optional_field(mj, "memory_estimate_bytes"))
        m.memory_estimate_bytes = as_count(*v, "metrics.memory_estimate_bytes");
    if (const json* v = optional_field(mj, "stopped_early"))
        m.stopped_early = as_bool(*v, "metrics.stopped_early");

    if (const json* v = optional_field(doc, "partial"))
        r.partial = as_bool(*v, "partial");
    if (const json* v = optional_field(doc, "stop_reason"))
        r.stop_reason = stop_reason_from(as_string(*v, "stop_reason"), "stop_reason");

    const json& paths = as_array(require(doc, "paths", "$"), "paths");
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const std::string p = item("paths", i);
        const json& pj = paths[i];
        ReportPath rp;
        rp.length = as_count(require(pj, "length", p), p + ".length");
        if (const json* g = optional_field(pj, "goal"))
            rp.goal = as_bool(*g, p + ".goal");
        const json& conns = as_array(require(pj, "connections", p), p + ".connections");
        for (std::size_t k = 0; k < conns.size(); ++k) {
            const std::string cp = item(p + ".connections", k);
            rp.connections.push_back({string_field(conns[k], "start", cp), string_field(conns[k], "link", cp),
                                      string_field(conns[k], "end", cp), string_list(conns[k], "rules", cp),
                                      string_list(conns[k], "normal_rules", cp)});
        }
        if (const json* ch = optional_field(pj, "terminal_changes"))
            for (std::size_t k = 0; k < as_array(*ch, p + ".terminal_changes").size(); ++k) {
                const std::string tp = item(p + ".terminal_changes", k);
                const json& t = (*ch)[k];
                rp.terminal_changes.push_back({string_field(t, "fact", tp), as_bool(require(t, "from", tp), tp),
                                               as_bool(require(t, "to", tp), tp)});
            }
        r.paths.push_back(std::move(rp));
    }

    if (const json* t = optional_field(doc, "tallies")) {
        auto count = [&](const char* key) {
            const json* v = optional_field(*t, key);
            return v ? as_count(*v, std::string("tallies.") + key) : 0;
        };
        r.tallies = {count("paths_popped"),          count("candidates_evaluated"), count("connections_committed"),
                     count("dead_ended"),            count("loop_terminated"),      count("skipped_postconditions"),
                     count("actions_triggered"),     count("actions_executed")};
    }
    return r;
}

} // namespace sonarpath
