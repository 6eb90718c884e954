#pragma once

#include "sonarpath/rules.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace sonarpath {

enum class EntityKind { container, link };

struct CommonProperty {
    std::string id;
    std::string description;

    bool operator==(const CommonProperty&) const = default;
};

// A boolean attribute. Facts without an owner are environment facts: they
// belong to the network as a whole and must not carry a common property.
struct Fact {
    std::string id;
    bool value = false;
    std::optional<std::string> common_property;
    std::optional<std::string> owner;

    [[nodiscard]] bool is_environment() const noexcept { return !owner.has_value(); }
    bool operator==(const Fact&) const = default;
};

// Descriptive annotation. Carried through load/save; never read by traversal.
struct CustomProperty {
    std::string id;
    std::string value;
    std::optional<std::string> common_property;
    std::optional<std::string> fact;

    bool operator==(const CustomProperty&) const = default;
};

struct Container {
    std::string id;
    std::string name;
    std::optional<std::string> parent;
    std::vector<CustomProperty> custom_properties;

    bool operator==(const Container&) const = default;
};

// Directed. Two-way connectivity is two links.
struct Link {
    std::string id;
    std::string name;
    std::string from;
    std::string to;
    std::optional<double> traversability; // stored and reported only
    std::vector<CustomProperty> custom_properties;

    bool operator==(const Link&) const = default;
};

// A host command a rule may trigger. Disabled actions are only recorded.
struct Action {
    std::string id;
    std::string command;
    bool enabled = false;

    bool operator==(const Action&) const = default;
};

// Input to the builder: a fact to create on a new entity.
struct FactSpec {
    std::optional<std::string> common_property;
    bool value = false;
    std::optional<std::string> id; // generated when empty
};

class NetworkBuilder;

// The base model. Immutable once built; copy it to derive a working model.
class Network {
public:
    Network() = default;

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<CommonProperty>& common_properties() const noexcept { return common_properties_; }
    [[nodiscard]] const std::vector<Fact>& facts() const noexcept { return facts_; }
    [[nodiscard]] const std::vector<Container>& containers() const noexcept { return containers_; }
    [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }
    [[nodiscard]] const std::vector<Rule>& rules() const noexcept { return rules_; }
    [[nodiscard]] const std::vector<Action>& actions() const noexcept { return actions_; }

    [[nodiscard]] const CommonProperty* find_common_property(std::string_view id) const;
    [[nodiscard]] const Fact* find_fact(std::string_view id) const;
    [[nodiscard]] const Container* find_container(std::string_view id) const;
    [[nodiscard]] const Link* find_link(std::string_view id) const;
    [[nodiscard]] const Rule* find_rule(std::string_view id) const;
    [[nodiscard]] const Action* find_action(std::string_view id) const;

    // Facts owned by an entity, in declaration order.
    [[nodiscard]] std::vector<const Fact*> facts_of(std::string_view entity_id) const;
    [[nodiscard]] std::vector<const Fact*> environment_facts() const;
    [[nodiscard]] bool is_entity(std::string_view id) const { return find_container(id) || find_link(id); }

    // Content hash over every object; used to prove traversal leaves the base untouched.
    [[nodiscard]] std::size_t content_hash() const;

    bool operator==(const Network& other) const;

private:
    friend class NetworkBuilder;

    void reindex();

    std::string name_;
    std::vector<CommonProperty> common_properties_;
    std::vector<Fact> facts_;
    std::vector<Container> containers_;
    std::vector<Link> links_;
    std::vector<Rule> rules_;
    std::vector<Action> actions_;

    std::unordered_map<std::string, std::size_t> cp_index_;
    std::unordered_map<std::string, std::size_t> fact_index_;
    std::unordered_map<std::string, std::size_t> container_index_;
    std::unordered_map<std::string, std::size_t> link_index_;
    std::unordered_map<std::string, std::size_t> rule_index_;
    std::unordered_map<std::string, std::size_t> action_index_;
};

// Assembles a Network. The add_* operations check references immediately and
// throw ReferenceError / ValidationError; the raw `put_*` operations used by
// the loader defer all checking to validate_network().
class NetworkBuilder {
public:
    NetworkBuilder() = default;
    explicit NetworkBuilder(Network base);

    NetworkBuilder& set_name(std::string name);

    std::string add_common_property(std::string description, std::optional<std::string> id = std::nullopt);

    // Adds a container owning `facts`. With a parent, two directed links with
    // empty fact sets are created between the new container and the parent and
    // between it and every existing container sharing that parent.
    std::string add_container(std::string name, const std::vector<FactSpec>& facts = {},
                              std::optional<std::string> parent = std::nullopt,
                              std::optional<std::string> id = std::nullopt);

    std::string add_link(const std::string& from, const std::string& to, const std::vector<FactSpec>& facts = {},
                         std::optional<std::string> name = std::nullopt, std::optional<std::string> id = std::nullopt);

    // Adds a fact to an existing entity, or an environment fact when owner is empty.
    std::string add_fact(std::optional<std::string> owner, bool value,
                         std::optional<std::string> common_property = std::nullopt,
                         std::optional<std::string> id = std::nullopt);

    std::string add_action(std::string command, bool enabled = false, std::optional<std::string> id = std::nullopt);
    NetworkBuilder& add_rule(Rule rule);

    // Raw insertion, no checks.
    void put(CommonProperty cp);
    void put(Fact fact);
    void put(Container container);
    void put(Link link);
    void put(Rule rule);
    void put(Action action);

    NetworkBuilder& remove_rule(std::string_view id);
    NetworkBuilder& set_fact_value(std::string_view id, bool value);
    NetworkBuilder& set_link_traversability(std::string_view id, std::optional<double> value);
    NetworkBuilder& clear_custom_properties();

    [[nodiscard]] const Network& peek() const noexcept { return net_; }
    [[nodiscard]] Network build() const&;
    [[nodiscard]] Network build() &&;

private:
    std::string make_fact_id();

    Network net_;
};

// ---------------------------------------------------------------------------
// Validation

enum class Severity { error, warning };

struct Finding {
    Severity severity = Severity::error;
    std::string code;     // stable machine-readable tag, e.g. "dangling-reference"
    std::string location; // document path such as "rules[3].pre[0]"
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    [[nodiscard]] std::size_t error_count() const noexcept;
    [[nodiscard]] bool ok() const noexcept { return error_count() == 0; }
};

// Reports dangling references, duplicate ids, two facts on one entity sharing
// a common property, rule conditions on unknown facts/properties or of the
// wrong form for the rule kind, environment facts carrying a property,
// parent cycles, out-of-range success/traversability values and entities
// exceeding the per-entity fact limit. Never throws.
[[nodiscard]] ValidationReport validate_network(const Network& network);

// Largest number of facts a single container or link may own.
inline constexpr std::size_t kMaxFactsPerEntity = 64;

[[nodiscard]] const char* to_string(EntityKind kind) noexcept;
[[nodiscard]] const char* to_string(Severity severity) noexcept;

} // namespace sonarpath
