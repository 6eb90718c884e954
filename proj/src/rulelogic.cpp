#include "sonarpath/rulelogic.hpp"

#include "sonarpath/error.hpp"
#include "sonarpath/ids.hpp"

#include <algorithm>
#include <unordered_map>

namespace sonarpath {

bool evaluates_before(const Rule& a, const Rule& b) noexcept
{
    if (a.success != b.success)
        return a.success > b.success;
    return natural_less(a.id, b.id);
}

OrderedRuleSet order_rules(const std::vector<Rule>& rules)
{
    OrderedRuleSet out;
    for (const auto& r : rules) {
        if (!(r.success >= 0.0 && r.success <= 1.0))
            throw ValidationError("rule '" + r.id + "' success value outside [0, 1]");
        (r.kind == RuleKind::generic ? out.generic : out.normal).push_back(r);
    }
    std::stable_sort(out.generic.begin(), out.generic.end(), evaluates_before);
    std::stable_sort(out.normal.begin(), out.normal.end(), evaluates_before);
    return out;
}

std::vector<Rule> OrderedRuleSet::merged() const
{
    std::vector<Rule> out;
    out.reserve(generic.size() + normal.size());
    std::merge(generic.begin(), generic.end(), normal.begin(), normal.end(), std::back_inserter(out),
               evaluates_before);
    return out;
}

std::vector<Rule> OrderedRuleSet::flatten() const
{
    std::vector<Rule> out = generic;
    out.insert(out.end(), normal.begin(), normal.end());
    return out;
}

std::vector<CompiledRule> compile_rules(const ModelIndex& index)
{
    const Network& net = index.network();
    std::unordered_map<std::string, RuleIndex> position;
    for (RuleIndex i = 0; i < net.rules().size(); ++i)
        position.emplace(net.rules()[i].id, i);
    std::unordered_map<std::string, std::uint32_t> action_position;
    for (std::uint32_t i = 0; i < net.actions().size(); ++i)
        action_position.emplace(net.actions()[i].id, i);

    auto compile_condition = [&](const RuleCondition& c) {
        CompiledCondition cc;
        cc.slot = c.slot;
        cc.value = c.value;
        cc.target = c.fact ? index.fact_index(*c.fact) : index.property_index(*c.common_property);
        return cc;
    };

    std::vector<CompiledRule> out;
    for (const Rule& r : order_rules(net.rules()).merged()) {
        CompiledRule cr;
        cr.index = position.at(r.id);
        cr.kind = r.kind;
        for (const auto& c : r.pre)
            cr.pre.push_back(compile_condition(c));
        for (const auto& c : r.post)
            cr.post.push_back(compile_condition(c));
        for (const auto& a : r.actions)
            cr.actions.push_back(action_position.at(a));
        out.push_back(std::move(cr));
    }
    return out;
}

bool match_generic_preconditions(const CompiledRule& rule, const ModelIndex& index, const ConnectionView& view)
{
    for (const auto& c : rule.pre) {
        const EntityState& e = view.at(c.slot);
        const int pos = index.property_position(e.slot, c.target);
        if (pos < 0 || bit_of(e.bits, static_cast<unsigned>(pos)) != c.value)
            return false;
    }
    return true;
}

ApplyOutcome apply_generic_postconditions(const CompiledRule& rule, const ModelIndex& index,
                                          const ConnectionView& view)
{
    ApplyOutcome out;
    for (const auto& c : rule.post) {
        EntityState& e = view.at(c.slot);
        const int pos = index.property_position(e.slot, c.target);
        if (pos < 0) {
            ++out.skipped;
            continue;
        }
        ++out.applied;
        const auto p = static_cast<unsigned>(pos);
        const bool before = bit_of(e.bits, p);
        if (before != c.value) {
            e.bits = with_bit(e.bits, p, c.value);
            out.changed.push_back({index.facts_of(e.slot)[p], before, c.value});
        }
    }
    return out;
}

NormalOutcome evaluate_normal_rule(const CompiledRule& rule, FactResolver& view)
{
    NormalOutcome out;
    for (const auto& c : rule.pre)
        if (view.read(c.target) != c.value)
            return out;
    out.triggered = true;
    for (const auto& c : rule.post) {
        const bool before = view.read(c.target);
        if (before != c.value) {
            view.write(c.target, c.value);
            out.changed.push_back({c.target, before, c.value});
        }
    }
    return out;
}

} // namespace sonarpath
