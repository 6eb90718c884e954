#pragma once

#include "sonarpath/netmodel.hpp"
#include "sonarpath/scenario.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sonarpath {

inline constexpr int kModelFormat = 1;

// A model file: the network plus its named scenarios.
struct ModelDocument {
    Network network;
    std::vector<Scenario> scenarios;
    std::vector<std::string> notes; // free-form remarks kept across load/save

    [[nodiscard]] const Scenario* find_scenario(std::string_view name) const;
};

// Parses without validating the network; see validate_network. Throws
// ParseError for malformed text or a field of the wrong shape.
[[nodiscard]] ModelDocument parse_model(std::string_view text);
[[nodiscard]] ModelDocument load_model(const std::filesystem::path& file);

// Network findings plus scenario references (start/end containers, omitted
// rules, overridden and goal facts, rule cap range, duplicate names).
[[nodiscard]] ValidationReport validate_document(const ModelDocument& document);

// Canonical JSON; parse_model(serialize_model(d)) reproduces d.
[[nodiscard]] std::string serialize_model(const ModelDocument& document);
void save_model(const ModelDocument& document, const std::filesystem::path& file);

// Reads a whole file; throws Error when it cannot be opened.
[[nodiscard]] std::string read_file(const std::filesystem::path& file);

} // namespace sonarpath
