#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sonarpath {

// Which entity of a (start, link, end) connection a generic condition reads.
// Normal-rule conditions address facts directly and use `global`.
enum class Slot { start, link, end, global };

enum class RuleKind { generic, normal };

// One boolean equality test or assignment. Exactly one of `fact` and
// `common_property` is set: generic rules use common properties, normal
// rules use fact ids.
struct RuleCondition {
    Slot slot = Slot::global;
    std::optional<std::string> fact;
    std::optional<std::string> common_property;
    bool value = true;

    static RuleCondition on_fact(std::string fact_id, bool value)
    {
        return {Slot::global, std::move(fact_id), std::nullopt, value};
    }
    static RuleCondition on_property(Slot slot, std::string cp_id, bool value)
    {
        return {slot, std::nullopt, std::move(cp_id), value};
    }

    bool operator==(const RuleCondition&) const = default;
};

struct Rule {
    std::string id;
    std::string name;
    RuleKind kind = RuleKind::generic;
    double success = 1.0; // ordering priority in [0, 1]; never sampled
    std::vector<RuleCondition> pre;
    std::vector<RuleCondition> post;
    std::vector<std::string> actions;

    bool operator==(const Rule&) const = default;
};

[[nodiscard]] const char* to_string(Slot slot) noexcept;
[[nodiscard]] const char* to_string(RuleKind kind) noexcept;
[[nodiscard]] std::optional<Slot> slot_from_string(std::string_view text) noexcept;

} // namespace sonarpath
