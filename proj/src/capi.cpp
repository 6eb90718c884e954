#include "sonarpath/sonarpath.h"

#include "sonarpath/dot.hpp"
#include "sonarpath/error.hpp"
#include "sonarpath/model_io.hpp"
#include "sonarpath/report.hpp"
#include "sonarpath/scenario.hpp"

#include "json_util.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

using namespace sonarpath;

struct sonar_model {
    ModelDocument document;
};

struct sonar_run_result {
    Scenario scenario;
    ScenarioRun run;
    std::optional<RunReport> report; // built on first request

    const RunReport& full_report()
    {
        if (!report)
            report = make_report(scenario, run);
        return *report;
    }
};

namespace {

thread_local std::string g_last_error;
thread_local int g_error_line = 0;
thread_local int g_error_column = 0;
std::atomic<bool> g_stop{false};

void clear_error()
{
    g_last_error.clear();
    g_error_line = 0;
    g_error_column = 0;
}

sonar_status fail(sonar_status status, const std::string& message)
{
    g_last_error = message;
    return status;
}

// Maps the exception in flight to a status code.
sonar_status translate()
{
    try {
        throw;
    } catch (const ParseError& e) {
        g_error_line = e.line();
        g_error_column = e.column();
        return fail(SONAR_ERR_PARSE, e.what());
    } catch (const ValidationError& e) {
        return fail(SONAR_ERR_VALIDATION, e.what());
    } catch (const ReferenceError& e) {
        return fail(SONAR_ERR_REFERENCE, e.what());
    } catch (const GuardError& e) {
        return fail(SONAR_ERR_GUARD, e.what());
    } catch (const Error& e) {
        return fail(SONAR_ERR_IO, e.what());
    } catch (const std::invalid_argument& e) {
        return fail(SONAR_ERR_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return fail(SONAR_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SONAR_ERR_INTERNAL, "unknown error");
    }
}

char* duplicate(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class Fn>
sonar_status guarded(Fn&& fn)
{
    clear_error();
    try {
        return fn();
    } catch (...) {
        return translate();
    }
}

} // namespace

extern "C" {

const char* sonar_version(void) { return "1.0.0"; }

const char* sonar_status_name(sonar_status status)
{
    switch (status) {
    case SONAR_OK: return "ok";
    case SONAR_ERR_IO: return "io error";
    case SONAR_ERR_PARSE: return "parse error";
    case SONAR_ERR_VALIDATION: return "validation error";
    case SONAR_ERR_REFERENCE: return "reference error";
    case SONAR_ERR_UNKNOWN_SCENARIO: return "unknown scenario";
    case SONAR_ERR_ARGUMENT: return "invalid argument";
    case SONAR_ERR_GUARD: return "guard exceeded";
    case SONAR_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* sonar_last_error(void) { return g_last_error.c_str(); }

void sonar_last_error_position(int* line, int* column)
{
    if (line)
        *line = g_error_line;
    if (column)
        *column = g_error_column;
}

void sonar_string_free(char* text) { std::free(text); }

sonar_status sonar_model_load_file(const char* path, sonar_model** out)
{
    return guarded([&] {
        if (!path || !out)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *out = nullptr;
        std::string text;
        try {
            text = read_file(path);
        } catch (const Error& e) {
            return fail(SONAR_ERR_IO, e.what());
        }
        auto model = std::make_unique<sonar_model>();
        model->document = parse_model(text);
        *out = model.release();
        return SONAR_OK;
    });
}

sonar_status sonar_model_load_string(const char* text, size_t length, sonar_model** out)
{
    return guarded([&] {
        if (!text || !out)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *out = nullptr;
        auto model = std::make_unique<sonar_model>();
        model->document = parse_model(std::string_view(text, length));
        *out = model.release();
        return SONAR_OK;
    });
}

void sonar_model_free(sonar_model* model) { delete model; }

sonar_status sonar_model_validate(const sonar_model* model, char** findings_json, size_t* error_count)
{
    return guarded([&] {
        if (!model)
            return fail(SONAR_ERR_ARGUMENT, "null model");
        const ValidationReport report = validate_document(model->document);
        if (error_count)
            *error_count = report.error_count();
        if (findings_json) {
            json_util::ordered_json out = json_util::ordered_json::array();
            for (const auto& f : report.findings)
                out.push_back({{"severity", to_string(f.severity)},
                               {"code", f.code},
                               {"location", f.location},
                               {"message", f.message}});
            *findings_json = duplicate(out.dump(2));
        }
        return SONAR_OK;
    });
}

sonar_status sonar_model_info(const sonar_model* model, char** info_json)
{
    return guarded([&] {
        if (!model || !info_json)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        const Network& net = model->document.network;
        std::size_t generic = 0;
        for (const auto& r : net.rules())
            generic += r.kind == RuleKind::generic ? 1 : 0;
        json_util::ordered_json out{{"name", net.name()},
                                    {"containers", net.containers().size()},
                                    {"links", net.links().size()},
                                    {"facts", net.facts().size()},
                                    {"common_properties", net.common_properties().size()},
                                    {"generic_rules", generic},
                                    {"normal_rules", net.rules().size() - generic},
                                    {"scenarios", json_util::ordered_json::array()}};
        for (const auto& s : model->document.scenarios)
            out["scenarios"].push_back(s.name);
        *info_json = duplicate(out.dump(2));
        return SONAR_OK;
    });
}

sonar_status sonar_model_to_dot(const sonar_model* model, char** dot)
{
    return guarded([&] {
        if (!model || !dot)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *dot = duplicate(model_to_dot(model->document.network));
        return SONAR_OK;
    });
}

sonar_status sonar_model_to_json(const sonar_model* model, char** json)
{
    return guarded([&] {
        if (!model || !json)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *json = duplicate(serialize_model(model->document));
        return SONAR_OK;
    });
}

void sonar_run_options_init(sonar_run_options* options)
{
    if (!options)
        return;
    options->rule_cap = 0;
    options->max_paths = 0;
    options->max_seconds = -1.0;
    options->allow_actions = 0;
    options->normal_rules_authorize = 0;
    options->on_action = nullptr;
    options->action_user_data = nullptr;
}

sonar_status sonar_run(const sonar_model* model, const char* scenario, const sonar_run_options* options,
                       sonar_run_result** out)
{
    return guarded([&] {
        if (!model || !scenario || !out)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *out = nullptr;
        const Scenario* found = model->document.find_scenario(scenario);
        if (!found)
            return fail(SONAR_ERR_UNKNOWN_SCENARIO, std::string("unknown scenario '") + scenario + "'");

        sonar_run_options opts;
        sonar_run_options_init(&opts);
        if (options)
            opts = *options;

        Scenario sc = *found;
        if (opts.rule_cap != 0)
            sc.rule_cap = opts.rule_cap;
        StopConditions stop = sc.stop.value_or(StopConditions{});
        if (opts.max_paths != 0)
            stop.max_paths = opts.max_paths;
        if (opts.max_seconds >= 0.0)
            stop.max_seconds = opts.max_seconds;
        sc.stop = stop;

        PreparedScenario prepared = apply_scenario(model->document.network, sc);
        prepared.config.normal_rules_authorize = opts.normal_rules_authorize != 0;

        RunHooks hooks;
        hooks.stop_flag = &g_stop;
        if (opts.allow_actions) {
            hooks.execute_action = [fn = opts.on_action, data = opts.action_user_data](const Action& a) {
                if (fn)
                    fn(a.id.c_str(), a.command.c_str(), data);
                else
                    if (std::system(a.command.c_str()) != 0)
                        g_last_error = "action " + a.id + " exited with a nonzero status";
            };
        }

        auto result = std::make_unique<sonar_run_result>();
        result->scenario = sc;
        Traversal engine(CompiledModel::compile(std::move(prepared.network)), prepared.config, std::move(hooks));
        result->run.result = engine.run();
        const auto& goal = sc.goal;
        result->run.metrics = compute_metrics(result->run.result, goal);
        if (goal && !goal->empty()) {
            std::vector<bool> flags;
            for (const auto& p : result->run.result.final_paths)
                flags.push_back(*goal_check(result->run.result, p, goal));
            result->run.goal_flags = std::move(flags);
        }
        *out = result.release();
        return SONAR_OK;
    });
}

int sonar_run_partial(const sonar_run_result* result) { return result && result->run.result.partial ? 1 : 0; }

sonar_status sonar_run_metrics(const sonar_run_result* result, sonar_metrics* metrics)
{
    if (!result || !metrics)
        return fail(SONAR_ERR_ARGUMENT, "null argument");
    const Metrics& m = result->run.metrics;
    metrics->elapsed_seconds = m.fastest_completion_seconds;
    metrics->final_reality_paths = m.final_reality_paths;
    metrics->has_goal = m.goal_achieving_paths ? 1 : 0;
    metrics->goal_achieving_paths = m.goal_achieving_paths.value_or(0);
    metrics->total_connections = m.total_connections;
    metrics->longest_length = m.longest_path.length;
    metrics->longest_count = m.longest_path.count;
    metrics->shortest_length = m.shortest_path.length;
    metrics->shortest_count = m.shortest_path.count;
    metrics->variant_containers_created = m.variant_containers_created;
    metrics->variant_links_created = m.variant_links_created;
    metrics->memory_estimate_bytes = m.memory_estimate_bytes;
    metrics->partial = m.stopped_early ? 1 : 0;
    return SONAR_OK;
}

sonar_status sonar_run_report_json(sonar_run_result* result, int include_timing, char** json)
{
    return guarded([&] {
        if (!result || !json)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        *json = duplicate(report_to_json(result->full_report(), include_timing != 0));
        return SONAR_OK;
    });
}

sonar_status sonar_run_csv(const sonar_run_result* result, const char* row_label, char** csv)
{
    return guarded([&] {
        if (!result || !csv)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        const std::string label = row_label ? row_label : result->scenario.name;
        *csv = duplicate(csv_header() + "\n" + csv_row(label, make_report(result->scenario, result->run, false)) + "\n");
        return SONAR_OK;
    });
}

void sonar_run_free(sonar_run_result* result) { delete result; }

sonar_status sonar_report_to_dot(const char* report_json, size_t length, long long path_index, char** dot)
{
    return guarded([&] {
        if (!report_json || !dot)
            return fail(SONAR_ERR_ARGUMENT, "null argument");
        const RunReport report = parse_report(std::string_view(report_json, length));
        std::optional<std::size_t> path;
        if (path_index >= 0)
            path = static_cast<std::size_t>(path_index);
        *dot = duplicate(report_to_dot(report, path));
        return SONAR_OK;
    });
}

void sonar_request_stop(void) { g_stop.store(true); }
void sonar_clear_stop(void) { g_stop.store(false); }

} // extern "C"
