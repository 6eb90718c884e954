#pragma once

#include "sonarpath/scenario.hpp"
#include "sonarpath/traversal.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sonarpath {

inline constexpr int kReportFormat = 1;

struct ReportConnection {
    std::string start;
    std::string link;
    std::string end;
    std::vector<std::string> generic_rules; // firing order
    std::vector<std::string> normal_rules;

    bool operator==(const ReportConnection&) const = default;
};

struct TerminalChange {
    std::string fact;
    bool from = false;
    bool to = false;

    bool operator==(const TerminalChange&) const = default;
};

struct ReportPath {
    std::uint64_t length = 0;
    std::optional<bool> goal;
    std::vector<ReportConnection> connections;
    std::vector<TerminalChange> terminal_changes; // facts whose final value differs from the start

    bool operator==(const ReportPath&) const = default;
};

// A run as written to disk: enough to recompute every metric and to draw paths.
struct RunReport {
    Scenario scenario;
    EngineConfig config;
    Metrics metrics;
    std::vector<ReportPath> paths;
    TraversalTallies tallies;
    bool partial = false;
    StopReason stop_reason = StopReason::none;
};

// Without paths the report carries only the summary fields.
[[nodiscard]] RunReport make_report(const Scenario& scenario, const ScenarioRun& run, bool include_paths = true);

// Path-derived metrics recomputed from the per-path records; run counters
// (time, variants, memory) are carried over from the embedded metrics.
[[nodiscard]] Metrics recompute_metrics(const RunReport& report);

// JSON tree with top-level {format, scenario, config, metrics, paths, tallies}.
[[nodiscard]] std::string report_to_json(const RunReport& report, bool include_timing = true);
[[nodiscard]] RunReport parse_report(std::string_view text);

// "< 1 second" below one second, otherwise HH:MM:SS.
[[nodiscard]] std::string format_duration(double seconds);
[[nodiscard]] std::string format_memory(std::uint64_t bytes);
// Omitted rules and overrides in words, e.g. "Omit R8 and R9".
[[nodiscard]] std::string describe_configuration(const Scenario& scenario);

[[nodiscard]] const std::string& csv_header();
[[nodiscard]] std::string csv_row(const std::string& index, const RunReport& report);

} // namespace sonarpath
