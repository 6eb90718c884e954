#pragma once

#include "sonarpath/netmodel.hpp"
#include "sonarpath/report.hpp"

#include <optional>
#include <string>

namespace sonarpath {

// Containers as nodes, links as directed edges, both in natural id order.
[[nodiscard]] std::string model_to_dot(const Network& network);

// One cluster per final path (or only the selected one), edges labelled with
// the rules that fired on each connection. Throws ReferenceError for an
// out-of-range path index.
[[nodiscard]] std::string report_to_dot(const RunReport& report, std::optional<std::size_t> path = std::nullopt);

} // namespace sonarpath
