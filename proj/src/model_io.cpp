#include "sonarpath/model_io.hpp"

#include "json_util.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sonarpath {

using namespace json_util;

const Scenario* ModelDocument::find_scenario(std::string_view name) const
{
    for (const auto& s : scenarios)
        if (s.name == name)
            return &s;
    return nullptr;
}

std::string read_file(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::vector<CustomProperty> parse_custom(const json& obj, const std::string& path)
{
    std::vector<CustomProperty> out;
    const json* v = optional_field(obj, "custom_properties");
    if (!v)
        return out;
    const std::string base = path + ".custom_properties";
    for (std::size_t i = 0; i < as_array(*v, base).size(); ++i) {
        const json& c = (*v)[i];
        const std::string p = item(base, i);
        out.push_back({string_field(c, "id", p), string_field(c, "value", p), optional_string(c, "common_property", p),
                       optional_string(c, "fact", p)});
    }
    return out;
}

RuleCondition parse_condition(const json& c, const std::string& p)
{
    RuleCondition rc;
    const std::string slot = string_field(c, "slot", p);
    const auto s = slot_from_string(slot);
    if (!s)
        fail(p + ".slot", "unknown slot '" + slot + "'");
    rc.slot = *s;
    rc.common_property = optional_string(c, "cp", p);
    rc.fact = optional_string(c, "fact", p);
    rc.value = as_bool(require(c, "value", p), p + ".value");
    return rc;
}

Rule parse_rule(const json& r, const std::string& p)
{
    Rule rule;
    rule.id = string_field(r, "id", p);
    rule.name = optional_string(r, "name", p).value_or("");
    const std::string kind = string_field(r, "kind", p);
    if (kind == "generic")
        rule.kind = RuleKind::generic;
    else if (kind == "normal")
        rule.kind = RuleKind::normal;
    else
        fail(p + ".kind", "expected \"generic\" or \"normal\"");
    if (const json* s = optional_field(r, "success"))
        rule.success = as_number(*s, p + ".success");
    for (const char* key : {"pre", "post"}) {
        const std::string base = p + "." + key;
        const json& list = as_array(require(r, key, p), base);
        auto& dest = std::string_view(key) == "pre" ? rule.pre : rule.post;
        for (std::size_t i = 0; i < list.size(); ++i)
            dest.push_back(parse_condition(list[i], item(base, i)));
    }
    if (const json* a = optional_field(r, "actions"))
        for (std::size_t i = 0; i < as_array(*a, p + ".actions").size(); ++i)
            rule.actions.push_back(as_string((*a)[i], item(p + ".actions", i)));
    return rule;
}

Scenario parse_scenario(const json& s, const std::string& p)
{
    Scenario sc;
    sc.name = string_field(s, "name", p);
    sc.description = optional_string(s, "description", p);
    sc.start = string_field(s, "start", p);
    sc.end = string_field(s, "end", p);
    if (const json* o = optional_field(s, "omit_rules"))
        for (std::size_t i = 0; i < as_array(*o, p + ".omit_rules").size(); ++i)
            sc.omit_rules.push_back(as_string((*o)[i], item(p + ".omit_rules", i)));
    if (const json* f = optional_field(s, "fact_overrides")) {
        if (!f->is_object())
            fail(p + ".fact_overrides", "expected an object");
        for (const auto& [k, v] : f->items())
            sc.fact_overrides[k] = as_bool(v, p + ".fact_overrides." + k);
    }
    if (const json* c = optional_field(s, "rule_cap"))
        sc.rule_cap = static_cast<int>(as_integer(*c, p + ".rule_cap"));
    if (const json* g = optional_field(s, "goal")) {
        sc.goal.emplace();
        for (std::size_t i = 0; i < as_array(*g, p + ".goal").size(); ++i) {
            const std::string gp = item(p + ".goal", i);
            sc.goal->push_back({string_field((*g)[i], "fact", gp), as_bool(require((*g)[i], "value", gp), gp)});
        }
    }
    if (const json* st = optional_field(s, "stop")) {
        StopConditions stop;
        if (!st->is_object())
            fail(p + ".stop", "expected an object");
        if (const json* m = optional_field(*st, "max_paths"))
            stop.max_paths = as_count(*m, p + ".stop.max_paths");
        if (const json* m = optional_field(*st, "max_seconds"))
            stop.max_seconds = as_number(*m, p + ".stop.max_seconds");
        sc.stop = stop;
    }
    return sc;
}

template <class Fn>
void each(const json& doc, const char* key, Fn fn)
{
    const json* list = optional_field(doc, key);
    if (!list)
        return;
    as_array(*list, key);
    for (std::size_t i = 0; i < list->size(); ++i)
        fn((*list)[i], item(key, i));
}

ordered_json custom_json(const std::vector<CustomProperty>& props)
{
    ordered_json out = ordered_json::array();
    for (const auto& c : props) {
        ordered_json j{{"id", c.id}, {"value", c.value}};
        if (c.common_property)
            j["common_property"] = *c.common_property;
        if (c.fact)
            j["fact"] = *c.fact;
        out.push_back(std::move(j));
    }
    return out;
}

ordered_json condition_json(const RuleCondition& c)
{
    ordered_json j{{"slot", to_string(c.slot)}};
    if (c.common_property)
        j["cp"] = *c.common_property;
    if (c.fact)
        j["fact"] = *c.fact;
    j["value"] = c.value;
    return j;
}

} // namespace

ModelDocument parse_model(std::string_view text)
{
    const json doc = parse_text(text);
    if (!doc.is_object())
        fail("$", "expected an object at the top level");
    if (const json* f = optional_field(doc, "format")) {
        if (as_integer(*f, "format") != kModelFormat)
            fail("format", "unsupported format version " + f->dump());
    }

    NetworkBuilder b;
    if (const auto name = optional_string(doc, "name", "$"))
        b.set_name(*name);
    each(doc, "common_properties", [&](const json& j, const std::string& p) {
        b.put(CommonProperty{string_field(j, "id", p), optional_string(j, "description", p).value_or("")});
    });
    each(doc, "facts", [&](const json& j, const std::string& p) {
        b.put(Fact{string_field(j, "id", p), as_bool(require(j, "value", p), p + ".value"),
                   optional_string(j, "common_property", p), optional_string(j, "owner", p)});
    });
    each(doc, "containers", [&](const json& j, const std::string& p) {
        b.put(Container{string_field(j, "id", p), optional_string(j, "name", p).value_or(""),
                        optional_string(j, "parent", p), parse_custom(j, p)});
    });
    each(doc, "links", [&](const json& j, const std::string& p) {
        Link l{string_field(j, "id", p), optional_string(j, "name", p).value_or(""), string_field(j, "from", p),
               string_field(j, "to", p), std::nullopt, parse_custom(j, p)};
        if (const json* t = optional_field(j, "traversability"))
            l.traversability = as_number(*t, p + ".traversability");
        b.put(std::move(l));
    });
    each(doc, "rules", [&](const json& j, const std::string& p) { b.put(parse_rule(j, p)); });
    each(doc, "actions", [&](const json& j, const std::string& p) {
        const json* en = optional_field(j, "enabled");
        b.put(Action{string_field(j, "id", p), string_field(j, "command", p),
                     en ? as_bool(*en, p + ".enabled") : false});
    });

    ModelDocument out;
    out.network = std::move(b).build();
    each(doc, "scenarios", [&](const json& j, const std::string& p) { out.scenarios.push_back(parse_scenario(j, p)); });
    each(doc, "notes", [&](const json& j, const std::string& p) { out.notes.push_back(as_string(j, p)); });
    return out;
}

ValidationReport validate_document(const ModelDocument& document)
{
    ValidationReport report = validate_network(document.network);
    const Network& net = document.network;
    auto add = [&](std::string code, std::string loc, std::string msg) {
        report.findings.push_back({Severity::error, std::move(code), std::move(loc), std::move(msg)});
    };
    std::set<std::string> names;
    for (std::size_t i = 0; i < document.scenarios.size(); ++i) {
        const Scenario& s = document.scenarios[i];
        const std::string p = item("scenarios", i);
        if (s.name.empty())
            add("empty-id", p, "scenario has an empty name");
        else if (!names.insert(s.name).second)
            add("duplicate-id", p, "duplicate scenario name '" + s.name + "'");
        if (!net.find_container(s.start))
            add("dangling-reference", p + ".start", "unknown start container '" + s.start + "'");
        if (!net.find_container(s.end))
            add("dangling-reference", p + ".end", "unknown end container '" + s.end + "'");
        for (std::size_t k = 0; k < s.omit_rules.size(); ++k)
            if (!net.find_rule(s.omit_rules[k]))
                add("dangling-reference", item(p + ".omit_rules", k), "unknown rule '" + s.omit_rules[k] + "'");
        for (const auto& [fact, value] : s.fact_overrides)
            if (!net.find_fact(fact))
                add("dangling-reference", p + ".fact_overrides." + fact, "unknown fact '" + fact + "'");
        if (s.goal)
            for (std::size_t k = 0; k < s.goal->size(); ++k)
                if (!net.find_fact((*s.goal)[k].fact))
                    add("dangling-reference", item(p + ".goal", k), "unknown fact '" + (*s.goal)[k].fact + "'");
        if (s.rule_cap < kMinRuleCap || s.rule_cap > kMaxRuleCap)
            add("out-of-range", p + ".rule_cap", "rule cap must lie in [1, 100]");
    }
    return report;
}

ModelDocument load_model(const std::filesystem::path& file) { return parse_model(read_file(file)); }

std::string serialize_model(const ModelDocument& document)
{
    const Network& net = document.network;
    ordered_json doc;
    doc["format"] = kModelFormat;
    doc["name"] = net.name();
    if (!document.notes.empty())
        doc["notes"] = document.notes;

    doc["common_properties"] = ordered_json::array();
    for (const auto& cp : net.common_properties())
        doc["common_properties"].push_back({{"id", cp.id}, {"description", cp.description}});

    doc["facts"] = ordered_json::array();
    for (const auto& f : net.facts()) {
        ordered_json j{{"id", f.id}, {"value", f.value}};
        if (f.common_property)
            j["common_property"] = *f.common_property;
        if (f.owner)
            j["owner"] = *f.owner;
        doc["facts"].push_back(std::move(j));
    }

    doc["containers"] = ordered_json::array();
    for (const auto& c : net.containers()) {
        ordered_json j{{"id", c.id}, {"name", c.name}};
        if (c.parent)
            j["parent"] = *c.parent;
        if (!c.custom_properties.empty())
            j["custom_properties"] = custom_json(c.custom_properties);
        doc["containers"].push_back(std::move(j));
    }

    doc["links"] = ordered_json::array();
    for (const auto& l : net.links()) {
        ordered_json j{{"id", l.id}, {"name", l.name}, {"from", l.from}, {"to", l.to}};
        if (l.traversability)
            j["traversability"] = *l.traversability;
        if (!l.custom_properties.empty())
            j["custom_properties"] = custom_json(l.custom_properties);
        doc["links"].push_back(std::move(j));
    }

    doc["rules"] = ordered_json::array();
    for (const auto& r : net.rules()) {
        ordered_json j{{"id", r.id}, {"name", r.name}, {"kind", to_string(r.kind)}, {"success", r.success}};
        j["pre"] = ordered_json::array();
        for (const auto& c : r.pre)
            j["pre"].push_back(condition_json(c));
        j["post"] = ordered_json::array();
        for (const auto& c : r.post)
            j["post"].push_back(condition_json(c));
        if (!r.actions.empty())
            j["actions"] = r.actions;
        doc["rules"].push_back(std::move(j));
    }

    doc["actions"] = ordered_json::array();
    for (const auto& a : net.actions())
        doc["actions"].push_back({{"id", a.id}, {"command", a.command}, {"enabled", a.enabled}});

    doc["scenarios"] = ordered_json::array();
    for (const auto& s : document.scenarios) {
        ordered_json j{{"name", s.name}};
        if (s.description)
            j["description"] = *s.description;
        j["start"] = s.start;
        j["end"] = s.end;
        j["omit_rules"] = s.omit_rules;
        j["fact_overrides"] = ordered_json::object();
        for (const auto& [k, v] : s.fact_overrides)
            j["fact_overrides"][k] = v;
        j["rule_cap"] = s.rule_cap;
        if (s.goal) {
            j["goal"] = ordered_json::array();
            for (const auto& g : *s.goal)
                j["goal"].push_back({{"fact", g.fact}, {"value", g.value}});
        }
        if (s.stop) {
            ordered_json st = ordered_json::object();
            if (s.stop->max_paths)
                st["max_paths"] = *s.stop->max_paths;
            if (s.stop->max_seconds)
                st["max_seconds"] = *s.stop->max_seconds;
            j["stop"] = std::move(st);
        }
        doc["scenarios"].push_back(std::move(j));
    }
    return doc.dump(2) + "\n";
}

void save_model(const ModelDocument& document, const std::filesystem::path& file)
{
    std::ofstream out(file, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + file.string() + "'");
    out << serialize_model(document);
}

} // namespace sonarpath
