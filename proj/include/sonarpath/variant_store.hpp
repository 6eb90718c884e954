#pragma once

#include "sonarpath/model_index.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace sonarpath {

using VariantId = std::uint32_t;
inline constexpr VariantId kNoVariant = ~VariantId{0};

// An immutable snapshot of one entity's complete fact configuration.
struct Variant {
    EntitySlot entity = kNoEntity;
    EntityKind kind = EntityKind::container;
    FactBits configuration = 0;
};

// Global hash-consed collection of variants: each (entity, configuration)
// pair is stored once and shared by every path that produces it. Ids are
// dense and stable, so a path holds a variant by id. A store is tied to one
// network layout (entity numbering).
class VariantStore {
public:
    struct Interned {
        VariantId id;
        bool inserted;
    };

    Interned intern(EntitySlot entity, EntityKind kind, FactBits configuration);
    [[nodiscard]] std::optional<VariantId> find(EntitySlot entity, FactBits configuration) const;
    [[nodiscard]] const Variant& get(VariantId id) const { return variants_[id]; }

    [[nodiscard]] std::size_t size() const noexcept { return variants_.size(); }
    [[nodiscard]] std::size_t container_count() const noexcept { return containers_; }
    [[nodiscard]] std::size_t link_count() const noexcept { return variants_.size() - containers_; }
    [[nodiscard]] const std::vector<Variant>& variants() const noexcept { return variants_; }

private:
    struct Key {
        EntitySlot entity;
        FactBits configuration;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            std::uint64_t h = k.configuration * 0x9e3779b97f4a7c15ULL;
            h ^= (static_cast<std::uint64_t>(k.entity) + 0x632be59bd9b4e019ULL) + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    std::vector<Variant> variants_;
    std::unordered_map<Key, VariantId, KeyHash> lookup_;
    std::size_t containers_ = 0;
};

} // namespace sonarpath
