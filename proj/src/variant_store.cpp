#include "sonarpath/variant_store.hpp"

namespace sonarpath {

VariantStore::Interned VariantStore::intern(EntitySlot entity, EntityKind kind, FactBits configuration)
{
    const auto [it, inserted] = lookup_.try_emplace(Key{entity, configuration}, static_cast<VariantId>(variants_.size()));
    if (inserted) {
        variants_.push_back({entity, kind, configuration});
        if (kind == EntityKind::container)
            ++containers_;
    }
    return {it->second, inserted};
}

std::optional<VariantId> VariantStore::find(EntitySlot entity, FactBits configuration) const
{
    auto it = lookup_.find(Key{entity, configuration});
    if (it == lookup_.end())
        return std::nullopt;
    return it->second;
}

} // namespace sonarpath
