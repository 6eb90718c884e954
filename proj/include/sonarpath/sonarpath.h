/* C interface to the sonarpath engine. All strings are UTF-8 and
 * NUL-terminated; strings returned through char** must be released with
 * sonar_string_free. */
#ifndef SONARPATH_H
#define SONARPATH_H

#include <stddef.h>
#include <stdint.h>

#if defined(SONARPATH_BUILDING_LIBRARY)
#define SONARPATH_API __attribute__((visibility("default")))
#else
#define SONARPATH_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct sonar_model sonar_model;
typedef struct sonar_run_result sonar_run_result;

typedef enum sonar_status {
    SONAR_OK = 0,
    SONAR_ERR_IO = 1,
    SONAR_ERR_PARSE = 2,
    SONAR_ERR_VALIDATION = 3,
    SONAR_ERR_REFERENCE = 4,
    SONAR_ERR_UNKNOWN_SCENARIO = 5,
    SONAR_ERR_ARGUMENT = 6,
    SONAR_ERR_GUARD = 7,
    SONAR_ERR_INTERNAL = 8
} sonar_status;

/* Called for each enabled action on a committed connection when actions are
 * allowed. Without a callback the action's command runs through the shell. */
typedef void (*sonar_action_fn)(const char* action_id, const char* command, void* user_data);

typedef struct sonar_run_options {
    int rule_cap;          /* 0: use the scenario's cap */
    uint64_t max_paths;    /* 0: no limit beyond the scenario's */
    double max_seconds;    /* < 0: no limit beyond the scenario's */
    int allow_actions;     /* nonzero: execute enabled actions */
    int normal_rules_authorize;
    sonar_action_fn on_action;
    void* action_user_data;
} sonar_run_options;

typedef struct sonar_metrics {
    double elapsed_seconds;
    uint64_t final_reality_paths;
    int has_goal; /* 0: goal-achieving count is N/A */
    uint64_t goal_achieving_paths;
    uint64_t total_connections;
    uint64_t longest_length;
    uint64_t longest_count;
    uint64_t shortest_length;
    uint64_t shortest_count;
    uint64_t variant_containers_created;
    uint64_t variant_links_created;
    uint64_t memory_estimate_bytes;
    int partial;
} sonar_metrics;

SONARPATH_API const char* sonar_version(void);
SONARPATH_API const char* sonar_status_name(sonar_status status);

/* Message of the last failure on the calling thread, or "". */
SONARPATH_API const char* sonar_last_error(void);
/* 1-based position of the last parse error on this thread, 0 when unknown. */
SONARPATH_API void sonar_last_error_position(int* line, int* column);
SONARPATH_API void sonar_string_free(char* text);

SONARPATH_API sonar_status sonar_model_load_file(const char* path, sonar_model** out);
SONARPATH_API sonar_status sonar_model_load_string(const char* text, size_t length, sonar_model** out);
SONARPATH_API void sonar_model_free(sonar_model* model);

/* Findings as a JSON array of {severity, code, location, message}. */
SONARPATH_API sonar_status sonar_model_validate(const sonar_model* model, char** findings_json, size_t* error_count);
/* {name, containers, links, facts, common_properties, generic_rules, normal_rules, scenarios: [name]} */
SONARPATH_API sonar_status sonar_model_info(const sonar_model* model, char** info_json);
SONARPATH_API sonar_status sonar_model_to_dot(const sonar_model* model, char** dot);
SONARPATH_API sonar_status sonar_model_to_json(const sonar_model* model, char** json);

SONARPATH_API void sonar_run_options_init(sonar_run_options* options);
/* options may be NULL. */
SONARPATH_API sonar_status sonar_run(const sonar_model* model, const char* scenario, const sonar_run_options* options,
                                     sonar_run_result** out);
SONARPATH_API int sonar_run_partial(const sonar_run_result* result);
SONARPATH_API sonar_status sonar_run_metrics(const sonar_run_result* result, sonar_metrics* metrics);
/* The per-path report is assembled on first call and kept with the result. */
SONARPATH_API sonar_status sonar_run_report_json(sonar_run_result* result, int include_timing, char** json);
/* Header line plus one row; row_label fills the "Scenario #" column. */
SONARPATH_API sonar_status sonar_run_csv(const sonar_run_result* result, const char* row_label, char** csv);
SONARPATH_API void sonar_run_free(sonar_run_result* result);

/* path_index < 0 draws every path. */
SONARPATH_API sonar_status sonar_report_to_dot(const char* report_json, size_t length, long long path_index,
                                               char** dot);

/* Process-wide stop request polled by running traversals. Async-signal-safe. */
SONARPATH_API void sonar_request_stop(void);
SONARPATH_API void sonar_clear_stop(void);

#ifdef __cplusplus
}
#endif

#endif
