#include "sonarpath/model_index.hpp"

#include "sonarpath/error.hpp"
#include "sonarpath/ids.hpp"

#include <algorithm>

namespace sonarpath {

ModelIndex::ModelIndex(const Network& network) : network_(&network)
{
    const ValidationReport report = validate_network(network);
    if (!report.ok()) {
        const Finding& first = *std::find_if(report.findings.begin(), report.findings.end(),
                                             [](const Finding& f) { return f.severity == Severity::error; });
        throw ValidationError("network does not validate: " + first.location + ": " + first.message);
    }

    container_count_ = network.containers().size();
    property_count_ = network.common_properties().size();
    const std::size_t entities = container_count_ + network.links().size();

    entity_ids_.reserve(entities);
    for (const auto& c : network.containers())
        entity_ids_.push_back(c.id);
    for (const auto& l : network.links())
        entity_ids_.push_back(l.id);
    for (EntitySlot s = 0; s < entities; ++s)
        slot_by_id_.emplace(entity_ids_[s], s);

    for (PropertyIndex p = 0; p < property_count_; ++p)
        cp_by_id_.emplace(network.common_properties()[p].id, p);

    outgoing_.resize(container_count_);
    for (const auto& l : network.links()) {
        const EntitySlot slot = slot_by_id_.at(l.id);
        link_from_.push_back(slot_by_id_.at(l.from));
        link_to_.push_back(slot_by_id_.at(l.to));
        outgoing_[link_from_.back()].push_back(slot);
    }
    for (auto& out : outgoing_)
        std::sort(out.begin(), out.end(),
                  [&](EntitySlot a, EntitySlot b) { return natural_less(entity_ids_[a], entity_ids_[b]); });

    entity_facts_.resize(entities);
    base_bits_.assign(entities, 0);
    cp_position_.assign(entities * property_count_, -1);
    fact_owner_.resize(network.facts().size(), kNoEntity);
    fact_position_.resize(network.facts().size(), 0);

    for (FactIndex f = 0; f < network.facts().size(); ++f) {
        const Fact& fact = network.facts()[f];
        fact_by_id_.emplace(fact.id, f);
        if (!fact.owner) {
            fact_position_[f] = static_cast<unsigned>(env_facts_.size());
            env_facts_.push_back(f);
            base_env_.push_back(fact.value);
            continue;
        }
        const EntitySlot owner = slot_by_id_.at(*fact.owner);
        const auto pos = static_cast<unsigned>(entity_facts_[owner].size());
        entity_facts_[owner].push_back(f);
        fact_owner_[f] = owner;
        fact_position_[f] = pos;
        base_bits_[owner] = with_bit(base_bits_[owner], pos, fact.value);
        if (fact.common_property)
            cp_position_[owner * property_count_ + cp_by_id_.at(*fact.common_property)] = static_cast<std::int8_t>(pos);
    }
}

EntitySlot ModelIndex::slot_of(std::string_view entity_id) const
{
    auto it = slot_by_id_.find(std::string(entity_id));
    return it == slot_by_id_.end() ? kNoEntity : it->second;
}

FactIndex ModelIndex::fact_index(std::string_view fact_id) const
{
    auto it = fact_by_id_.find(std::string(fact_id));
    if (it == fact_by_id_.end())
        throw ReferenceError("unknown fact '" + std::string(fact_id) + "'");
    return it->second;
}

const std::string& ModelIndex::fact_id(FactIndex f) const { return network_->facts()[f].id; }

PropertyIndex ModelIndex::property_index(std::string_view cp_id) const
{
    auto it = cp_by_id_.find(std::string(cp_id));
    if (it == cp_by_id_.end())
        throw ReferenceError("unknown common property '" + std::string(cp_id) + "'");
    return it->second;
}

} // namespace sonarpath
