#include "sonarpath/brute_force.hpp"

#include "sonarpath/error.hpp"
#include "sonarpath/ids.hpp"

#include <algorithm>

namespace sonarpath {

namespace {

// Whole-network state: every fact id with its value.
using State = std::map<std::string, bool>;

struct Oracle {
    const Network& net;
    EngineConfig config;
    std::vector<Rule> order;
    std::map<std::string, std::vector<const Fact*>> owned;
    std::vector<OraclePath> out;

    Oracle(const Network& n, EngineConfig c) : net(n), config(std::move(c))
    {
        order = net.rules();
        std::stable_sort(order.begin(), order.end(), [](const Rule& a, const Rule& b) {
            if (a.success != b.success)
                return a.success > b.success;
            return natural_less(a.id, b.id);
        });
        for (const auto& f : net.facts())
            if (f.owner)
                owned[*f.owner].push_back(&f);
    }

    const Fact* fact_for(const std::string& entity, const std::string& cp) const
    {
        auto it = owned.find(entity);
        if (it == owned.end())
            return nullptr;
        for (const Fact* f : it->second)
            if (f->common_property == cp)
                return f;
        return nullptr;
    }

    FactValues entity_values(const State& s, const std::string& entity) const
    {
        FactValues v;
        auto it = owned.find(entity);
        if (it != owned.end())
            for (const Fact* f : it->second)
                v[f->id] = s.at(f->id);
        return v;
    }

    static const std::string& slot_entity(Slot slot, const std::string& a, const std::string& l,
                                          const std::string& b)
    {
        return slot == Slot::start ? a : slot == Slot::link ? l : b;
    }

    // Runs the rules for one step. Returns {generic fired, normal fired}.
    std::pair<int, int> run_rules(State& s, const std::string& a, const std::string& l, const std::string& b) const
    {
        std::vector<bool> done(order.size(), false);
        int generic = 0;
        int normal = 0;
        for (bool again = true; again;) {
            again = false;
            for (std::size_t i = 0; i < order.size(); ++i) {
                if (done[i])
                    continue;
                const Rule& r = order[i];
                bool ok = true;
                for (const auto& c : r.pre) {
                    if (r.kind == RuleKind::generic) {
                        const Fact* f = fact_for(slot_entity(c.slot, a, l, b), *c.common_property);
                        ok = f && s.at(f->id) == c.value;
                    } else {
                        ok = s.at(*c.fact) == c.value;
                    }
                    if (!ok)
                        break;
                }
                if (!ok)
                    continue;
                for (const auto& c : r.post) {
                    if (r.kind == RuleKind::generic) {
                        if (const Fact* f = fact_for(slot_entity(c.slot, a, l, b), *c.common_property))
                            s[f->id] = c.value;
                    } else {
                        s[*c.fact] = c.value;
                    }
                }
                done[i] = true;
                again = true;
                if (r.kind == RuleKind::generic)
                    ++generic;
                else
                    ++normal;
                if (generic >= config.rule_cap)
                    return {generic, normal};
            }
        }
        return {generic, normal};
    }

    void explore(const std::string& head, const State& state, std::vector<OracleConnection>& steps)
    {
        if (head == config.end && !steps.empty()) {
            out.push_back({steps, state});
            return;
        }
        for (const auto& link : net.links()) {
            if (link.from != head)
                continue;
            State s = state;
            const auto [generic, normal] = run_rules(s, link.from, link.id, link.to);
            if (generic == 0 && !(config.normal_rules_authorize && normal > 0))
                continue;
            OracleConnection c{link.from, link.id, link.to, entity_values(s, link.from),
                               entity_values(s, link.id), entity_values(s, link.to)};
            if (std::find(steps.begin(), steps.end(), c) != steps.end())
                continue;
            steps.push_back(std::move(c));
            explore(link.to, s, steps);
            steps.pop_back();
        }
    }
};

} // namespace

std::vector<OraclePath> brute_force_enumerate(const Network& working, const EngineConfig& config)
{
    if (working.containers().size() > kOracleMaxContainers || working.links().size() > kOracleMaxLinks ||
        working.rules().size() > kOracleMaxRules)
        throw GuardError("network too large for exhaustive enumeration (limits: " +
                         std::to_string(kOracleMaxContainers) + " containers, " + std::to_string(kOracleMaxLinks) +
                         " links, " + std::to_string(kOracleMaxRules) + " rules)");
    check_config(config);
    if (!working.find_container(config.start) || !working.find_container(config.end))
        throw ReferenceError("unknown start or end container");

    Oracle oracle(working, config);
    State initial;
    for (const auto& f : working.facts())
        initial[f.id] = f.value;
    std::vector<OracleConnection> steps;
    if (config.start == config.end)
        oracle.out.push_back({{}, initial});
    else
        oracle.explore(config.start, initial, steps);
    return oracle.out;
}

std::vector<OraclePath> brute_force_enumerate(const Network& network, const Scenario& scenario)
{
    const PreparedScenario prepared = apply_scenario(network, scenario);
    return brute_force_enumerate(prepared.network, prepared.config);
}

std::vector<OraclePath> oracle_view(const TraversalResult& result)
{
    const ModelIndex& index = result.model->index();
    const Network& net = result.model->network();

    auto values = [&](EntitySlot slot, FactBits bits) {
        FactValues v;
        const auto& facts = index.facts_of(slot);
        for (unsigned i = 0; i < facts.size(); ++i)
            v[index.fact_id(facts[i])] = bit_of(bits, i);
        return v;
    };

    std::vector<OraclePath> out;
    out.reserve(result.final_paths.size());
    for (const auto& path : result.final_paths) {
        OraclePath p;
        for (const ConnectionRecord* r : path.connections())
            p.connections.push_back({index.entity_id(r->start), index.entity_id(r->link), index.entity_id(r->end),
                                     values(r->start, result.variant_bits(r->start_variant)),
                                     values(r->link, result.variant_bits(r->link_variant)),
                                     values(r->end, result.variant_bits(r->end_variant))});
        for (FactIndex f = 0; f < net.facts().size(); ++f)
            p.terminal[index.fact_id(f)] = result.terminal_value(path, f);
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace sonarpath
