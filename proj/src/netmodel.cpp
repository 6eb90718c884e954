#include "sonarpath/netmodel.hpp"

#include "sonarpath/error.hpp"
#include "sonarpath/ids.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace sonarpath {

const char* to_string(Slot slot) noexcept
{
    switch (slot) {
    case Slot::start: return "start";
    case Slot::link: return "link";
    case Slot::end: return "end";
    case Slot::global: return "global";
    }
    return "global";
}

const char* to_string(RuleKind kind) noexcept
{
    return kind == RuleKind::generic ? "generic" : "normal";
}

std::optional<Slot> slot_from_string(std::string_view text) noexcept
{
    if (text == "start")
        return Slot::start;
    if (text == "link")
        return Slot::link;
    if (text == "end")
        return Slot::end;
    if (text == "global")
        return Slot::global;
    return std::nullopt;
}

const char* to_string(EntityKind kind) noexcept
{
    return kind == EntityKind::container ? "container" : "link";
}

const char* to_string(Severity severity) noexcept
{
    return severity == Severity::error ? "error" : "warning";
}

// ---------------------------------------------------------------------------
// Network

namespace {

template <class T>
const T* lookup(const std::unordered_map<std::string, std::size_t>& index, const std::vector<T>& items,
                std::string_view id)
{
    auto it = index.find(std::string(id));
    return it == index.end() ? nullptr : &items[it->second];
}

template <class T>
void build_index(std::unordered_map<std::string, std::size_t>& index, const std::vector<T>& items)
{
    index.clear();
    index.reserve(items.size());
    // first occurrence wins; duplicates are a validation finding
    for (std::size_t i = 0; i < items.size(); ++i)
        index.emplace(items[i].id, i);
}

void hash_mix(std::size_t& seed, std::size_t value)
{
    seed ^= value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}

void hash_str(std::size_t& seed, std::string_view s) { hash_mix(seed, std::hash<std::string_view>{}(s)); }

void hash_opt(std::size_t& seed, const std::optional<std::string>& s)
{
    hash_mix(seed, s.has_value());
    if (s)
        hash_str(seed, *s);
}

void hash_custom(std::size_t& seed, const std::vector<CustomProperty>& props)
{
    for (const auto& p : props) {
        hash_str(seed, p.id);
        hash_str(seed, p.value);
        hash_opt(seed, p.common_property);
        hash_opt(seed, p.fact);
    }
}

void hash_conditions(std::size_t& seed, const std::vector<RuleCondition>& conds)
{
    for (const auto& c : conds) {
        hash_mix(seed, static_cast<std::size_t>(c.slot));
        hash_opt(seed, c.fact);
        hash_opt(seed, c.common_property);
        hash_mix(seed, c.value);
    }
}

} // namespace

void Network::reindex()
{
    build_index(cp_index_, common_properties_);
    build_index(fact_index_, facts_);
    build_index(container_index_, containers_);
    build_index(link_index_, links_);
    build_index(rule_index_, rules_);
    build_index(action_index_, actions_);
}

const CommonProperty* Network::find_common_property(std::string_view id) const
{
    return lookup(cp_index_, common_properties_, id);
}
const Fact* Network::find_fact(std::string_view id) const { return lookup(fact_index_, facts_, id); }
const Container* Network::find_container(std::string_view id) const
{
    return lookup(container_index_, containers_, id);
}
const Link* Network::find_link(std::string_view id) const { return lookup(link_index_, links_, id); }
const Rule* Network::find_rule(std::string_view id) const { return lookup(rule_index_, rules_, id); }
const Action* Network::find_action(std::string_view id) const { return lookup(action_index_, actions_, id); }

std::vector<const Fact*> Network::facts_of(std::string_view entity_id) const
{
    std::vector<const Fact*> out;
    for (const auto& f : facts_)
        if (f.owner && *f.owner == entity_id)
            out.push_back(&f);
    return out;
}

std::vector<const Fact*> Network::environment_facts() const
{
    std::vector<const Fact*> out;
    for (const auto& f : facts_)
        if (f.is_environment())
            out.push_back(&f);
    return out;
}

std::size_t Network::content_hash() const
{
    std::size_t seed = 0;
    hash_str(seed, name_);
    for (const auto& cp : common_properties_) {
        hash_str(seed, cp.id);
        hash_str(seed, cp.description);
    }
    for (const auto& f : facts_) {
        hash_str(seed, f.id);
        hash_mix(seed, f.value);
        hash_opt(seed, f.common_property);
        hash_opt(seed, f.owner);
    }
    for (const auto& c : containers_) {
        hash_str(seed, c.id);
        hash_str(seed, c.name);
        hash_opt(seed, c.parent);
        hash_custom(seed, c.custom_properties);
    }
    for (const auto& l : links_) {
        hash_str(seed, l.id);
        hash_str(seed, l.name);
        hash_str(seed, l.from);
        hash_str(seed, l.to);
        hash_mix(seed, l.traversability.has_value());
        if (l.traversability)
            hash_mix(seed, std::hash<double>{}(*l.traversability));
        hash_custom(seed, l.custom_properties);
    }
    for (const auto& r : rules_) {
        hash_str(seed, r.id);
        hash_str(seed, r.name);
        hash_mix(seed, static_cast<std::size_t>(r.kind));
        hash_mix(seed, std::hash<double>{}(r.success));
        hash_conditions(seed, r.pre);
        hash_conditions(seed, r.post);
        for (const auto& a : r.actions)
            hash_str(seed, a);
    }
    for (const auto& a : actions_) {
        hash_str(seed, a.id);
        hash_str(seed, a.command);
        hash_mix(seed, a.enabled);
    }
    return seed;
}

bool Network::operator==(const Network& other) const
{
    return name_ == other.name_ && common_properties_ == other.common_properties_ && facts_ == other.facts_ &&
           containers_ == other.containers_ && links_ == other.links_ && rules_ == other.rules_ &&
           actions_ == other.actions_;
}

// ---------------------------------------------------------------------------
// NetworkBuilder

NetworkBuilder::NetworkBuilder(Network base) : net_(std::move(base)) { net_.reindex(); }

NetworkBuilder& NetworkBuilder::set_name(std::string name)
{
    net_.name_ = std::move(name);
    return *this;
}

std::string NetworkBuilder::make_fact_id()
{
    return next_free_id("F", [&](const std::string& id) { return net_.find_fact(id) != nullptr; });
}

std::string NetworkBuilder::add_common_property(std::string description, std::optional<std::string> id)
{
    if (description.empty())
        throw ValidationError("common property description must not be empty");
    std::string cp_id =
        id ? *id : next_free_id("P", [&](const std::string& s) { return net_.find_common_property(s) != nullptr; });
    if (net_.find_common_property(cp_id))
        throw ValidationError("duplicate common property id '" + cp_id + "'");
    net_.common_properties_.push_back({cp_id, std::move(description)});
    net_.reindex();
    return cp_id;
}

std::string NetworkBuilder::add_fact(std::optional<std::string> owner, bool value,
                                     std::optional<std::string> common_property, std::optional<std::string> id)
{
    if (owner && !net_.is_entity(*owner))
        throw ReferenceError("unknown fact owner '" + *owner + "'");
    if (!owner && common_property)
        throw ValidationError("environment facts cannot carry a common property");
    if (common_property) {
        if (!net_.find_common_property(*common_property))
            throw ReferenceError("unknown common property '" + *common_property + "'");
        for (const Fact* f : net_.facts_of(*owner))
            if (f->common_property == common_property)
                throw ValidationError("entity '" + *owner + "' already has a fact for '" + *common_property + "'");
    }
    if (owner && net_.facts_of(*owner).size() >= kMaxFactsPerEntity)
        throw ValidationError("entity '" + *owner + "' exceeds the per-entity fact limit");
    std::string fact_id = id ? *id : make_fact_id();
    if (net_.find_fact(fact_id))
        throw ValidationError("duplicate fact id '" + fact_id + "'");
    net_.facts_.push_back({fact_id, value, std::move(common_property), std::move(owner)});
    net_.reindex();
    return fact_id;
}

std::string NetworkBuilder::add_container(std::string name, const std::vector<FactSpec>& facts,
                                          std::optional<std::string> parent, std::optional<std::string> id)
{
    if (parent && !net_.find_container(*parent))
        throw ReferenceError("unknown parent container '" + *parent + "'");
    std::string cid = id ? *id : next_free_id("C", [&](const std::string& s) { return net_.is_entity(s); });
    if (net_.is_entity(cid))
        throw ValidationError("duplicate entity id '" + cid + "'");

    // relatives are captured before insertion: the parent plus existing siblings
    std::vector<std::string> relatives;
    if (parent) {
        relatives.push_back(*parent);
        for (const auto& c : net_.containers_)
            if (c.parent == parent)
                relatives.push_back(c.id);
    }

    net_.containers_.push_back({cid, std::move(name), std::move(parent), {}});
    net_.reindex();
    for (const auto& spec : facts)
        add_fact(cid, spec.value, spec.common_property, spec.id);
    for (const auto& other : relatives) {
        add_link(cid, other);
        add_link(other, cid);
    }
    return cid;
}

std::string NetworkBuilder::add_link(const std::string& from, const std::string& to,
                                     const std::vector<FactSpec>& facts, std::optional<std::string> name,
                                     std::optional<std::string> id)
{
    if (!net_.find_container(from))
        throw ReferenceError("unknown link endpoint '" + from + "'");
    if (!net_.find_container(to))
        throw ReferenceError("unknown link endpoint '" + to + "'");
    std::string lid = id ? *id : next_free_id("L", [&](const std::string& s) { return net_.is_entity(s); });
    if (net_.is_entity(lid))
        throw ValidationError("duplicate entity id '" + lid + "'");
    net_.links_.push_back({lid, name ? *name : from + "->" + to, from, to, std::nullopt, {}});
    net_.reindex();
    for (const auto& spec : facts)
        add_fact(lid, spec.value, spec.common_property, spec.id);
    return lid;
}

std::string NetworkBuilder::add_action(std::string command, bool enabled, std::optional<std::string> id)
{
    std::string aid = id ? *id : next_free_id("A", [&](const std::string& s) { return net_.find_action(s) != nullptr; });
    if (net_.find_action(aid))
        throw ValidationError("duplicate action id '" + aid + "'");
    net_.actions_.push_back({aid, std::move(command), enabled});
    net_.reindex();
    return aid;
}

NetworkBuilder& NetworkBuilder::add_rule(Rule rule)
{
    if (net_.find_rule(rule.id))
        throw ValidationError("duplicate rule id '" + rule.id + "'");
    if (!(rule.success >= 0.0 && rule.success <= 1.0))
        throw ValidationError("rule '" + rule.id + "' success value outside [0, 1]");
    const bool generic = rule.kind == RuleKind::generic;
    auto check = [&](const RuleCondition& c) {
        if (c.fact.has_value() == c.common_property.has_value())
            throw ValidationError("rule '" + rule.id + "': condition must target exactly one of fact/common property");
        if (generic && (c.fact || c.slot == Slot::global))
            throw ValidationError("rule '" + rule.id + "': generic conditions use slotted common properties");
        if (!generic && c.common_property)
            throw ValidationError("rule '" + rule.id + "': normal conditions use fact ids");
        if (c.fact && !net_.find_fact(*c.fact))
            throw ReferenceError("rule '" + rule.id + "' references unknown fact '" + *c.fact + "'");
        if (c.common_property && !net_.find_common_property(*c.common_property))
            throw ReferenceError("rule '" + rule.id + "' references unknown common property '" +
                                 *c.common_property + "'");
    };
    for (const auto& c : rule.pre)
        check(c);
    for (const auto& c : rule.post)
        check(c);
    for (const auto& a : rule.actions)
        if (!net_.find_action(a))
            throw ReferenceError("rule '" + rule.id + "' references unknown action '" + a + "'");
    net_.rules_.push_back(std::move(rule));
    net_.reindex();
    return *this;
}

void NetworkBuilder::put(CommonProperty cp)
{
    net_.common_properties_.push_back(std::move(cp));
    net_.reindex();
}
void NetworkBuilder::put(Fact fact)
{
    net_.facts_.push_back(std::move(fact));
    net_.reindex();
}
void NetworkBuilder::put(Container container)
{
    net_.containers_.push_back(std::move(container));
    net_.reindex();
}
void NetworkBuilder::put(Link link)
{
    net_.links_.push_back(std::move(link));
    net_.reindex();
}
void NetworkBuilder::put(Rule rule)
{
    net_.rules_.push_back(std::move(rule));
    net_.reindex();
}
void NetworkBuilder::put(Action action)
{
    net_.actions_.push_back(std::move(action));
    net_.reindex();
}

NetworkBuilder& NetworkBuilder::remove_rule(std::string_view id)
{
    auto it = std::find_if(net_.rules_.begin(), net_.rules_.end(), [&](const Rule& r) { return r.id == id; });
    if (it == net_.rules_.end())
        throw ReferenceError("unknown rule '" + std::string(id) + "'");
    net_.rules_.erase(it);
    net_.reindex();
    return *this;
}

NetworkBuilder& NetworkBuilder::set_fact_value(std::string_view id, bool value)
{
    auto it = net_.fact_index_.find(std::string(id));
    if (it == net_.fact_index_.end())
        throw ReferenceError("unknown fact '" + std::string(id) + "'");
    net_.facts_[it->second].value = value;
    return *this;
}

NetworkBuilder& NetworkBuilder::set_link_traversability(std::string_view id, std::optional<double> value)
{
    auto it = net_.link_index_.find(std::string(id));
    if (it == net_.link_index_.end())
        throw ReferenceError("unknown link '" + std::string(id) + "'");
    net_.links_[it->second].traversability = value;
    return *this;
}

NetworkBuilder& NetworkBuilder::clear_custom_properties()
{
    for (auto& c : net_.containers_)
        c.custom_properties.clear();
    for (auto& l : net_.links_)
        l.custom_properties.clear();
    return *this;
}

Network NetworkBuilder::build() const&
{
    Network copy = net_;
    copy.reindex();
    return copy;
}

Network NetworkBuilder::build() &&
{
    net_.reindex();
    return std::move(net_);
}

// ---------------------------------------------------------------------------
// Validation

std::size_t ValidationReport::error_count() const noexcept
{
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [](const Finding& f) { return f.severity == Severity::error; }));
}

namespace {

std::string at(const char* section, std::size_t i) { return std::string(section) + "[" + std::to_string(i) + "]"; }

template <class T>
void check_duplicates(ValidationReport& report, const std::vector<T>& items, const char* section,
                      std::set<std::string>* shared = nullptr)
{
    std::set<std::string> seen;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& id = items[i].id;
        if (id.empty()) {
            report.findings.push_back({Severity::error, "empty-id", at(section, i), "object has an empty id"});
            continue;
        }
        const bool dup = !seen.insert(id).second || (shared && !shared->insert(id).second);
        if (dup)
            report.findings.push_back({Severity::error, "duplicate-id", at(section, i), "duplicate id '" + id + "'"});
    }
}

void check_custom(ValidationReport& report, const Network& net, const std::vector<CustomProperty>& props,
                  const std::string& where)
{
    for (std::size_t i = 0; i < props.size(); ++i) {
        const auto& p = props[i];
        const std::string loc = where + ".custom_properties[" + std::to_string(i) + "]";
        if (p.common_property && !net.find_common_property(*p.common_property))
            report.findings.push_back({Severity::error, "dangling-reference", loc,
                                       "custom property references unknown common property '" +
                                           *p.common_property + "'"});
        if (p.fact && !net.find_fact(*p.fact))
            report.findings.push_back(
                {Severity::error, "dangling-reference", loc, "custom property references unknown fact '" + *p.fact + "'"});
    }
}

} // namespace

ValidationReport validate_network(const Network& net)
{
    ValidationReport report;
    auto add = [&](Severity s, std::string code, std::string loc, std::string msg) {
        report.findings.push_back({s, std::move(code), std::move(loc), std::move(msg)});
    };

    check_duplicates(report, net.common_properties(), "common_properties");
    check_duplicates(report, net.facts(), "facts");
    std::set<std::string> entity_ids;
    check_duplicates(report, net.containers(), "containers", &entity_ids);
    check_duplicates(report, net.links(), "links", &entity_ids);
    check_duplicates(report, net.rules(), "rules");
    check_duplicates(report, net.actions(), "actions");

    for (std::size_t i = 0; i < net.common_properties().size(); ++i)
        if (net.common_properties()[i].description.empty())
            add(Severity::error, "empty-description", at("common_properties", i), "common property has no description");

    // facts
    std::map<std::string, std::size_t> per_entity;
    std::set<std::pair<std::string, std::string>> entity_cp;
    for (std::size_t i = 0; i < net.facts().size(); ++i) {
        const Fact& f = net.facts()[i];
        const std::string loc = at("facts", i);
        if (f.common_property && !net.find_common_property(*f.common_property))
            add(Severity::error, "dangling-reference", loc,
                "fact '" + f.id + "' references unknown common property '" + *f.common_property + "'");
        if (!f.owner) {
            if (f.common_property)
                add(Severity::error, "environment-fact-property", loc,
                    "environment fact '" + f.id + "' must not carry a common property");
            continue;
        }
        if (!net.is_entity(*f.owner)) {
            add(Severity::error, "dangling-reference", loc, "fact '" + f.id + "' owned by unknown entity '" + *f.owner + "'");
            continue;
        }
        if (++per_entity[*f.owner] == kMaxFactsPerEntity + 1)
            add(Severity::error, "fact-limit", loc,
                "entity '" + *f.owner + "' owns more than " + std::to_string(kMaxFactsPerEntity) + " facts");
        if (f.common_property && !entity_cp.emplace(*f.owner, *f.common_property).second)
            add(Severity::error, "shared-common-property", loc,
                "entity '" + *f.owner + "' has more than one fact for common property '" + *f.common_property + "'");
    }

    // containers: parents and cycles
    for (std::size_t i = 0; i < net.containers().size(); ++i) {
        const Container& c = net.containers()[i];
        const std::string loc = at("containers", i);
        if (c.parent && !net.find_container(*c.parent)) {
            add(Severity::error, "dangling-reference", loc,
                "container '" + c.id + "' has unknown parent '" + *c.parent + "'");
        } else if (c.parent) {
            std::set<std::string> seen{c.id};
            const Container* cur = net.find_container(*c.parent);
            while (cur) {
                if (!seen.insert(cur->id).second) {
                    add(Severity::error, "parent-cycle", loc, "container '" + c.id + "' is its own ancestor");
                    break;
                }
                cur = cur->parent ? net.find_container(*cur->parent) : nullptr;
            }
        }
        check_custom(report, net, c.custom_properties, loc);
    }

    for (std::size_t i = 0; i < net.links().size(); ++i) {
        const Link& l = net.links()[i];
        const std::string loc = at("links", i);
        if (!net.find_container(l.from))
            add(Severity::error, "dangling-reference", loc, "link '" + l.id + "' starts at unknown container '" + l.from + "'");
        if (!net.find_container(l.to))
            add(Severity::error, "dangling-reference", loc, "link '" + l.id + "' ends at unknown container '" + l.to + "'");
        if (l.traversability && !(*l.traversability >= 0.0 && *l.traversability <= 1.0))
            add(Severity::error, "out-of-range", loc, "link '" + l.id + "' traversability outside [0, 1]");
        check_custom(report, net, l.custom_properties, loc);
    }

    for (std::size_t i = 0; i < net.rules().size(); ++i) {
        const Rule& r = net.rules()[i];
        const std::string loc = at("rules", i);
        if (!(r.success >= 0.0 && r.success <= 1.0))
            add(Severity::error, "out-of-range", loc, "rule '" + r.id + "' success value outside [0, 1]");
        const bool generic = r.kind == RuleKind::generic;
        auto check_conditions = [&](const std::vector<RuleCondition>& conds, const char* part) {
            for (std::size_t k = 0; k < conds.size(); ++k) {
                const auto& c = conds[k];
                const std::string cloc = loc + "." + part + "[" + std::to_string(k) + "]";
                if (c.fact.has_value() == c.common_property.has_value()) {
                    add(Severity::error, "malformed-condition", cloc, "condition must target exactly one of fact/cp");
                    continue;
                }
                if (generic && c.fact)
                    add(Severity::error, "condition-kind", cloc,
                        "generic rule '" + r.id + "' uses a fact target; generic rules use common properties");
                if (generic && c.slot == Slot::global)
                    add(Severity::error, "condition-kind", cloc,
                        "generic rule '" + r.id + "' condition needs a start/link/end slot");
                if (!generic && c.common_property)
                    add(Severity::error, "condition-kind", cloc,
                        "normal rule '" + r.id + "' uses a common property target; normal rules use fact ids");
                if (c.fact && !net.find_fact(*c.fact))
                    add(Severity::error, "dangling-reference", cloc,
                        "rule '" + r.id + "' references unknown fact '" + *c.fact + "'");
                if (c.common_property && !net.find_common_property(*c.common_property))
                    add(Severity::error, "dangling-reference", cloc,
                        "rule '" + r.id + "' references unknown common property '" + *c.common_property + "'");
            }
        };
        check_conditions(r.pre, "pre");
        check_conditions(r.post, "post");
        for (std::size_t k = 0; k < r.actions.size(); ++k)
            if (!net.find_action(r.actions[k]))
                add(Severity::error, "dangling-reference", loc + ".actions[" + std::to_string(k) + "]",
                    "rule '" + r.id + "' references unknown action '" + r.actions[k] + "'");
    }
    return report;
}

} // namespace sonarpath
