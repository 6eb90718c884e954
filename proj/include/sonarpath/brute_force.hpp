#pragma once

#include "sonarpath/netmodel.hpp"
#include "sonarpath/scenario.hpp"
#include "sonarpath/traversal.hpp"

#include <map>
#include <string>
#include <vector>

namespace sonarpath {

inline constexpr std::size_t kOracleMaxContainers = 8;
inline constexpr std::size_t kOracleMaxLinks = 16;
inline constexpr std::size_t kOracleMaxRules = 12;

using FactValues = std::map<std::string, bool>; // fact id -> value

// One connection with the post-rule values of its three entities.
struct OracleConnection {
    std::string start;
    std::string link;
    std::string end;
    FactValues start_facts;
    FactValues link_facts;
    FactValues end_facts;

    auto operator<=>(const OracleConnection&) const = default;
};

struct OraclePath {
    std::vector<OracleConnection> connections;
    FactValues terminal; // every fact in the network, environment included

    auto operator<=>(const OraclePath&) const = default;
};

// Exhaustive reference enumeration over full copies of the network state.
// Throws GuardError when the working network exceeds the oracle's limits.
[[nodiscard]] std::vector<OraclePath> brute_force_enumerate(const Network& working, const EngineConfig& config);
[[nodiscard]] std::vector<OraclePath> brute_force_enumerate(const Network& network, const Scenario& scenario);

// The engine's final paths in the oracle's form.
[[nodiscard]] std::vector<OraclePath> oracle_view(const TraversalResult& result);

} // namespace sonarpath
