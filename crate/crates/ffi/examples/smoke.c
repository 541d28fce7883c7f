/* Loads the bundled obstacle scenario, runs 2 s and prints the final
 * follower position and the minimum obstacle distance. */
#include <stdio.h>
#include <string.h>

#include "consensus_lab.h"

int main(void) {
    ClScenario *scenario = NULL;
    ClTrace *trace = NULL;
    if (cl_scenario_builtin("obstacle", &scenario) != CL_STATUS_OK) {
        fprintf(stderr, "load: %s\n", cl_last_error());
        return 1;
    }
    if (cl_scenario_set_duration(scenario, 2.0) != CL_STATUS_OK) {
        fprintf(stderr, "duration: %s\n", cl_last_error());
        return 1;
    }
    ClStatus status = cl_run(scenario, &trace);
    if (status != CL_STATUS_OK) {
        fprintf(stderr, "run (%d): %s\n", (int)status, cl_last_error());
        return 2;
    }
    size_t len = 0;
    double s = 0.0;
    cl_trace_len(trace, &len);
    cl_trace_agent_state(trace, len - 1, 0, 0, &s);
    char *json = NULL;
    cl_trace_metrics_json(trace, &json);
    printf("version %s records %zu final_s %.6f\n", cl_version(), len, s);
    printf("%s", strstr(json, "\"min_obstacle_distance\"") ? "has_obstacle_metric\n" : "");
    cl_string_free(json);
    cl_trace_free(trace);
    cl_scenario_free(scenario);
    return 0;
}
