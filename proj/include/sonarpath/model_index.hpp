#pragma once

#include "sonarpath/netmodel.hpp"

#include <cstdint>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace sonarpath {

// Dense entity numbering: containers occupy [0, container_count), links follow.
using EntitySlot = std::uint32_t;
using FactIndex = std::uint32_t;
using PropertyIndex = std::uint32_t;

// An entity's fact values, one bit per owned fact in declaration order.
using FactBits = std::uint64_t;

inline constexpr EntitySlot kNoEntity = ~EntitySlot{0};

[[nodiscard]] inline bool bit_of(FactBits bits, unsigned position) noexcept { return ((bits >> position) & 1U) != 0; }
[[nodiscard]] inline FactBits with_bit(FactBits bits, unsigned position, bool value) noexcept
{
    const FactBits mask = FactBits{1} << position;
    return value ? (bits | mask) : (bits & ~mask);
}

// Read-only numeric view of a validated Network. Built once per traversal;
// everything the engine's hot loop touches is an array lookup here.
class ModelIndex {
public:
    // Throws ValidationError if the network does not validate.
    explicit ModelIndex(const Network& network);

    [[nodiscard]] const Network& network() const noexcept { return *network_; }

    [[nodiscard]] std::size_t container_count() const noexcept { return container_count_; }
    [[nodiscard]] std::size_t link_count() const noexcept { return link_from_.size(); }
    [[nodiscard]] std::size_t entity_count() const noexcept { return entity_ids_.size(); }
    [[nodiscard]] std::size_t property_count() const noexcept { return property_count_; }

    [[nodiscard]] bool is_link(EntitySlot slot) const noexcept { return slot >= container_count_; }
    [[nodiscard]] EntityKind kind(EntitySlot slot) const noexcept
    {
        return is_link(slot) ? EntityKind::link : EntityKind::container;
    }
    [[nodiscard]] const std::string& entity_id(EntitySlot slot) const { return entity_ids_[slot]; }
    [[nodiscard]] EntitySlot slot_of(std::string_view entity_id) const; // kNoEntity if unknown

    [[nodiscard]] EntitySlot link_from(EntitySlot link) const { return link_from_[link - container_count_]; }
    [[nodiscard]] EntitySlot link_to(EntitySlot link) const { return link_to_[link - container_count_]; }
    // Outgoing link slots of a container, in ascending (natural) link-id order.
    [[nodiscard]] const std::vector<EntitySlot>& outgoing(EntitySlot container) const { return outgoing_[container]; }

    [[nodiscard]] const std::vector<FactIndex>& facts_of(EntitySlot slot) const { return entity_facts_[slot]; }
    [[nodiscard]] FactBits base_bits(EntitySlot slot) const { return base_bits_[slot]; }

    // Bit position of the entity's fact for a common property, or -1.
    [[nodiscard]] int property_position(EntitySlot slot, PropertyIndex cp) const
    {
        return cp_position_[static_cast<std::size_t>(slot) * property_count_ + cp];
    }

    [[nodiscard]] std::size_t fact_count() const noexcept { return fact_owner_.size(); }
    [[nodiscard]] FactIndex fact_index(std::string_view fact_id) const; // throws ReferenceError
    [[nodiscard]] const std::string& fact_id(FactIndex f) const;
    // Owner slot, or kNoEntity for environment facts.
    [[nodiscard]] EntitySlot fact_owner(FactIndex f) const { return fact_owner_[f]; }
    // Bit position inside the owner, or index into the environment vector.
    [[nodiscard]] unsigned fact_position(FactIndex f) const { return fact_position_[f]; }

    [[nodiscard]] PropertyIndex property_index(std::string_view cp_id) const; // throws ReferenceError

    [[nodiscard]] std::size_t environment_size() const noexcept { return env_facts_.size(); }
    [[nodiscard]] const std::vector<FactIndex>& environment_facts() const noexcept { return env_facts_; }
    [[nodiscard]] const std::vector<bool>& base_environment() const noexcept { return base_env_; }

private:
    const Network* network_;
    std::size_t container_count_ = 0;
    std::size_t property_count_ = 0;
    std::vector<std::string> entity_ids_;
    std::unordered_map<std::string, EntitySlot> slot_by_id_;
    std::vector<EntitySlot> link_from_;
    std::vector<EntitySlot> link_to_;
    std::vector<std::vector<EntitySlot>> outgoing_;
    std::vector<std::vector<FactIndex>> entity_facts_;
    std::vector<FactBits> base_bits_;
    std::vector<std::int8_t> cp_position_;
    std::vector<EntitySlot> fact_owner_;
    std::vector<unsigned> fact_position_;
    std::unordered_map<std::string, FactIndex> fact_by_id_;
    std::unordered_map<std::string, PropertyIndex> cp_by_id_;
    std::vector<FactIndex> env_facts_;
    std::vector<bool> base_env_;
};

} // namespace sonarpath
