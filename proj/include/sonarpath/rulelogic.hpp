#pragma once

#include "sonarpath/model_index.hpp"
#include "sonarpath/rules.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace sonarpath {

// Both rule kinds sorted by success descending, id ascending.
struct OrderedRuleSet {
    std::vector<Rule> generic;
    std::vector<Rule> normal;

    // Merge of both lists under the same order; the per-connection evaluation order.
    [[nodiscard]] std::vector<Rule> merged() const;
    [[nodiscard]] std::vector<Rule> flatten() const; // generic then normal
    bool operator==(const OrderedRuleSet&) const = default;
};

// Throws ValidationError when a success value lies outside [0, 1].
[[nodiscard]] OrderedRuleSet order_rules(const std::vector<Rule>& rules);

// True when `a` evaluates before `b`.
[[nodiscard]] bool evaluates_before(const Rule& a, const Rule& b) noexcept;

// ---------------------------------------------------------------------------
// Compiled rules

using RuleIndex = std::uint32_t;

struct CompiledCondition {
    Slot slot = Slot::global;
    std::uint32_t target = 0; // PropertyIndex for generic, FactIndex for normal
    bool value = true;
};

struct CompiledRule {
    RuleIndex index = 0; // position in Network::rules()
    RuleKind kind = RuleKind::generic;
    std::vector<CompiledCondition> pre;
    std::vector<CompiledCondition> post;
    std::vector<std::uint32_t> actions; // positions in Network::actions()
};

// Rules of a network resolved against its index, in merged evaluation order.
// Omitted rules are simply absent from the network.
[[nodiscard]] std::vector<CompiledRule> compile_rules(const ModelIndex& index);

// ---------------------------------------------------------------------------
// Evaluation views

// A private, mutable clone of one entity's fact values.
struct EntityState {
    EntitySlot slot = kNoEntity;
    FactBits bits = 0;

    bool operator==(const EntityState&) const = default;
};

// The three clones a generic rule is evaluated against. For a self-loop link
// `start` and `end` point at the same clone.
struct ConnectionView {
    std::array<EntityState*, 3> entities{}; // start, link, end

    [[nodiscard]] EntityState& at(Slot slot) const { return *entities[static_cast<std::size_t>(slot)]; }
};

struct FactChange {
    FactIndex fact = 0;
    bool from = false;
    bool to = false;

    bool operator==(const FactChange&) const = default;
};

struct ApplyOutcome {
    std::uint32_t applied = 0; // postconditions written, idempotent ones included
    std::uint32_t skipped = 0; // postconditions whose property the entity lacks
    std::vector<FactChange> changed;
};

// Every precondition's slotted entity owns a fact for the property and that
// fact currently has the required value. Read-only.
[[nodiscard]] bool match_generic_preconditions(const CompiledRule& rule, const ModelIndex& index,
                                               const ConnectionView& view);

// Writes each postcondition into its slotted clone. Never creates facts.
ApplyOutcome apply_generic_postconditions(const CompiledRule& rule, const ModelIndex& index,
                                          const ConnectionView& view);

// Resolves any fact id to its current value within one path, and accepts
// writes that stay private to that path.
class FactResolver {
public:
    virtual ~FactResolver() = default;
    [[nodiscard]] virtual bool read(FactIndex fact) const = 0;
    virtual void write(FactIndex fact, bool value) = 0;
};

struct NormalOutcome {
    bool triggered = false;
    std::vector<FactChange> changed;
};

NormalOutcome evaluate_normal_rule(const CompiledRule& rule, FactResolver& view);

} // namespace sonarpath
