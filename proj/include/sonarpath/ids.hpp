#pragma once

#include <string>
#include <string_view>

namespace sonarpath {

// Orders ids so that embedded numbers compare numerically ("L2" < "L10").
// Used for link exploration order and for the rule-ordering tie-break.
[[nodiscard]] bool natural_less(std::string_view a, std::string_view b) noexcept;

struct NaturalLess {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const noexcept { return natural_less(a, b); }
};

// Next unused id of the form <prefix><n>, n starting at 1.
template <class Exists>
std::string next_free_id(std::string_view prefix, Exists&& exists)
{
    for (unsigned n = 1;; ++n) {
        std::string candidate = std::string(prefix) + std::to_string(n);
        if (!exists(candidate))
            return candidate;
    }
}

} // namespace sonarpath
