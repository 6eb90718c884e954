// sonar-path: command-line front end over the sonarpath C API.

#include "sonarpath/sonarpath.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <unistd.h>

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

enum Exit {
    kExitOk = 0,
    kExitFailure = 1,
    kExitUsage = 2,
    kExitPartial = 3,
    kExitParse = 4,
    kExitValidation = 5,
    kExitUnknownScenario = 6,
    kExitReference = 7,
};

bool g_color = false;

std::string paint(const std::string& text, const char* code)
{
    return g_color ? std::string("\033[") + code + "m" + text + "\033[0m" : text;
}

struct CString {
    char* p = nullptr;
    ~CString() { sonar_string_free(p); }
    [[nodiscard]] std::string str() const { return p ? p : ""; }
};

struct Model {
    sonar_model* p = nullptr;
    ~Model() { sonar_model_free(p); }
};

struct Result {
    sonar_run_result* p = nullptr;
    ~Result() { sonar_run_free(p); }
};

int exit_for(sonar_status s)
{
    switch (s) {
    case SONAR_OK: return kExitOk;
    case SONAR_ERR_PARSE: return kExitParse;
    case SONAR_ERR_VALIDATION: return kExitValidation;
    case SONAR_ERR_UNKNOWN_SCENARIO: return kExitUnknownScenario;
    case SONAR_ERR_REFERENCE: return kExitReference;
    default: return kExitFailure;
    }
}

int report_error(sonar_status s, const std::string& file = {})
{
    std::string where;
    int line = 0;
    int column = 0;
    sonar_last_error_position(&line, &column);
    if (!file.empty())
        where = file + (line > 0 ? ":" + std::to_string(line) + ":" + std::to_string(column) : "") + ": ";
    std::cerr << paint("error", "1;31") << ": " << where << sonar_status_name(s) << ": " << sonar_last_error()
              << "\n";
    return exit_for(s);
}

// Prints findings; returns the error count.
std::size_t print_findings(const sonar_model* model, const std::string& file)
{
    CString findings;
    std::size_t errors = 0;
    if (sonar_model_validate(model, &findings.p, &errors) != SONAR_OK)
        return 1;
    for (const auto& f : nlohmann::json::parse(findings.str())) {
        const std::string sev = f["severity"].get<std::string>();
        std::cerr << file << ": " << paint(sev, sev == "error" ? "1;31" : "1;33") << ": ["
                  << f["code"].get<std::string>() << "] " << f["location"].get<std::string>() << ": "
                  << f["message"].get<std::string>() << "\n";
    }
    return errors;
}

bool write_text(const std::string& file, const std::string& text)
{
    if (file == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        std::cerr << paint("error", "1;31") << ": cannot write '" << file << "'\n";
        return false;
    }
    out << text;
    return static_cast<bool>(out);
}

std::optional<std::string> read_text(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

extern "C" void on_interrupt(int) { sonar_request_stop(); }

struct RunArgs {
    std::string model;
    std::string scenario;
    int rule_cap = 0;
    std::uint64_t max_paths = 0;
    double max_seconds = -1.0;
    bool allow_actions = false;
    std::string out;
    std::string csv;
};

int cmd_run(const RunArgs& a)
{
    Model model;
    if (auto s = sonar_model_load_file(a.model.c_str(), &model.p); s != SONAR_OK)
        return report_error(s, a.model);
    if (print_findings(model.p, a.model) > 0)
        return kExitValidation;

    sonar_run_options opts;
    sonar_run_options_init(&opts);
    opts.rule_cap = a.rule_cap;
    opts.max_paths = a.max_paths;
    opts.max_seconds = a.max_seconds;
    opts.allow_actions = a.allow_actions ? 1 : 0;

    sonar_clear_stop();
    std::signal(SIGINT, on_interrupt);
    Result result;
    const sonar_status s = sonar_run(model.p, a.scenario.c_str(), &opts, &result.p);
    std::signal(SIGINT, SIG_DFL);
    if (s != SONAR_OK)
        return report_error(s, a.model);

    sonar_metrics m;
    sonar_run_metrics(result.p, &m);
    const bool partial = sonar_run_partial(result.p) != 0;

    if (!a.out.empty()) {
        CString json;
        if (sonar_run_report_json(result.p, 1, &json.p) != SONAR_OK || !write_text(a.out, json.str()))
            return kExitFailure;
    }
    if (!a.csv.empty()) {
        CString csv;
        if (sonar_run_csv(result.p, nullptr, &csv.p) != SONAR_OK || !write_text(a.csv, csv.str()))
            return kExitFailure;
    }

    std::ostream& log = (a.out == "-" || a.csv == "-") ? std::cerr : std::cout;
    log << paint("scenario " + a.scenario, "1") << (partial ? paint(" (stopped early)", "33") : "") << "\n"
        << "  final reality paths:   " << m.final_reality_paths << "\n"
        << "  goal achieving paths:  " << (m.has_goal ? std::to_string(m.goal_achieving_paths) : "N/A") << "\n"
        << "  total connections:     " << m.total_connections << "\n"
        << "  longest path:          " << m.longest_length << " (" << m.longest_count << ")\n"
        << "  shortest path:         " << m.shortest_length << " (" << m.shortest_count << ")\n"
        << "  variant containers:    " << m.variant_containers_created << "\n"
        << "  variant links:         " << m.variant_links_created << "\n"
        << "  elapsed:               " << m.elapsed_seconds << " s\n";
    return partial ? kExitPartial : kExitOk;
}

int cmd_validate(const std::string& file)
{
    Model model;
    if (auto s = sonar_model_load_file(file.c_str(), &model.p); s != SONAR_OK)
        return report_error(s, file);
    const std::size_t errors = print_findings(model.p, file);
    if (errors > 0) {
        std::cerr << errors << " error(s)\n";
        return kExitValidation;
    }
    CString info;
    sonar_model_info(model.p, &info.p);
    const auto j = nlohmann::json::parse(info.str());
    std::cout << paint("ok", "1;32") << ": " << file << ": " << j["containers"] << " containers, " << j["links"]
              << " links, " << j["facts"] << " facts, " << j["common_properties"] << " common properties, "
              << j["generic_rules"] << " generic rules, " << j["normal_rules"] << " normal rules, "
              << j["scenarios"].size() << " scenarios\n";
    return kExitOk;
}

int cmd_export_dot(const std::string& model_file, const std::string& report_file, long long path,
                   const std::string& out)
{
    CString dot;
    if (!model_file.empty()) {
        Model model;
        if (auto s = sonar_model_load_file(model_file.c_str(), &model.p); s != SONAR_OK)
            return report_error(s, model_file);
        if (auto s = sonar_model_to_dot(model.p, &dot.p); s != SONAR_OK)
            return report_error(s, model_file);
    } else {
        const auto text = read_text(report_file);
        if (!text) {
            std::cerr << paint("error", "1;31") << ": cannot open '" << report_file << "'\n";
            return kExitFailure;
        }
        if (auto s = sonar_report_to_dot(text->data(), text->size(), path, &dot.p); s != SONAR_OK)
            return report_error(s, report_file);
    }
    return write_text(out, dot.str()) ? kExitOk : kExitFailure;
}

} // namespace

int main(int argc, char** argv)
{
    g_color = std::getenv("SONAR_PATH_NO_COLOR") == nullptr && isatty(STDERR_FILENO) && isatty(STDOUT_FILENO);

    CLI::App app{"Enumerate reality paths through a rule-driven network model"};
    app.set_version_flag("--version", std::string(sonar_version()));
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Traverse one scenario of a model");
    run_cmd->add_option("--model", run.model, "Model file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--scenario", run.scenario, "Scenario name")->required();
    run_cmd->add_option("--rule-cap", run.rule_cap, "Generic rules per connection (1-100)")
        ->check(CLI::Range(1, 100));
    run_cmd->add_option("--max-paths", run.max_paths, "Stop after this many final paths")->check(CLI::PositiveNumber);
    run_cmd->add_option("--max-seconds", run.max_seconds, "Stop after this many seconds")
        ->check(CLI::NonNegativeNumber);
    run_cmd->add_flag("--allow-actions", run.allow_actions, "Execute enabled rule actions");
    run_cmd->add_option("--out", run.out, "Write the JSON report here ('-' for stdout)");
    run_cmd->add_option("--csv", run.csv, "Write the CSV summary here ('-' for stdout)");

    std::string validate_model;
    auto* validate_cmd = app.add_subcommand("validate", "Check a model file");
    validate_cmd->add_option("--model", validate_model, "Model file")->required()->check(CLI::ExistingFile);

    std::string dot_model;
    std::string dot_report;
    long long dot_path = -1;
    std::string dot_out = "-";
    auto* dot_cmd = app.add_subcommand("export-dot", "Write Graphviz DOT for a model or a run report");
    auto* dm = dot_cmd->add_option("--model", dot_model, "Model file")->check(CLI::ExistingFile);
    auto* dr = dot_cmd->add_option("--report", dot_report, "Report file")->check(CLI::ExistingFile);
    dm->excludes(dr);
    dot_cmd->add_option("--path", dot_path, "Only this path index of the report")->check(CLI::NonNegativeNumber)->needs(dr);
    dot_cmd->add_option("--out", dot_out, "Output file ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*run_cmd)
        return cmd_run(run);
    if (*validate_cmd)
        return cmd_validate(validate_model);
    if (dot_model.empty() && dot_report.empty()) {
        std::cerr << paint("error", "1;31") << ": export-dot needs --model or --report\n";
        return kExitUsage;
    }
    return cmd_export_dot(dot_model, dot_report, dot_path, dot_out);
}
