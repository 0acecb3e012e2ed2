/* Exercises the C interface from plain C. */
#include "halfline_nls.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define EXPECT(cond)                                                          \
    do {                                                                      \
        if (!(cond)) {                                                        \
            fprintf(stderr, "%s:%d: expected %s\n", __FILE__, __LINE__, #cond); \
            ++failures;                                                       \
        }                                                                     \
    } while (0)

static const char* kSolve =
    "{\"schema_version\": 1, \"name\": \"capi_solve\", \"experiment\": \"solve\","
    " \"grid\": {\"L\": 6, \"N\": 63}, \"potential\": \"harmonic\","
    " \"nonlinearity\": \"power(-1, 3)\", \"initial\": \"gaussian(3, 0.6, 1, 0.5)\","
    " \"solver\": {\"T\": 0.2, \"window_T0\": 0.05, \"output_dt\": 0.05, \"quad_nodes\": 9}}";

static const char* kIncompatible =
    "{\"schema_version\": 1, \"name\": \"capi_bad\", \"grid\": {\"L\": 6, \"N\": 63},"
    " \"force\": \"constant(1)\", \"initial\": \"eigenmode(1)\"}";

static void test_basics(void)
{
    EXPECT(strlen(hl_version()) > 0);
    EXPECT(strcmp(hl_status_name(HL_ERR_OUT_OF_RANGE), "out_of_range") == 0);
    char* presets = NULL;
    EXPECT(hl_presets_json(&presets) == HL_OK);
    EXPECT(presets != NULL && strstr(presets, "harmonic") != NULL);
    hl_string_free(presets);
    EXPECT(hl_presets_json(NULL) == HL_ERR_NULL_ARGUMENT);
}

static void test_errors(void)
{
    hl_config* cfg = NULL;
    EXPECT(hl_config_parse("{not json", NULL, &cfg) == HL_ERR_PARSE);
    EXPECT(cfg == NULL);
    EXPECT(strstr(hl_last_error(), "\"code\"") != NULL);
    EXPECT(hl_last_error_exit_code() == HL_EXIT_VALIDATION);
    EXPECT(hl_config_load("/nonexistent/config.json", &cfg) == HL_ERR_IO);
    EXPECT(hl_last_error_exit_code() == HL_EXIT_FAILURE);
    EXPECT(hl_config_parse(NULL, NULL, &cfg) == HL_ERR_NULL_ARGUMENT);
    EXPECT(hl_config_run_count(NULL) == 0);
    hl_config_free(NULL);
    hl_result_free(NULL);
    hl_trajectory_free(NULL);

    EXPECT(hl_config_parse(kIncompatible, NULL, &cfg) == HL_OK);
    EXPECT(hl_config_validate(cfg) == HL_ERR_CONFIGURATION);
    EXPECT(strstr(hl_last_error(), "\"hypothesis\": \"") != NULL);
    hl_config_free(cfg);
}

static void test_solve(void)
{
    hl_config* cfg = NULL;
    EXPECT(hl_config_parse(kSolve, NULL, &cfg) == HL_OK);
    EXPECT(hl_config_run_count(cfg) == 1);
    EXPECT(hl_config_validate(cfg) == HL_OK);
    EXPECT(strcmp(hl_last_error(), "") == 0);

    hl_trajectory* tr = NULL;
    EXPECT(hl_solve(cfg, 1, &tr) == HL_ERR_OUT_OF_RANGE);
    EXPECT(hl_solve(cfg, 0, &tr) == HL_OK);
    EXPECT(hl_trajectory_length(tr) == 5);
    EXPECT(hl_trajectory_nodes(tr) == 65);
    EXPECT(strcmp(hl_trajectory_status(tr), "completed") == 0);
    double t = -1.0;
    EXPECT(hl_trajectory_time(tr, 4, &t) == HL_OK);
    EXPECT(fabs(t - 0.2) < 1e-12);
    EXPECT(hl_trajectory_time(tr, 5, &t) == HL_ERR_OUT_OF_RANGE);

    double re[65], im[65];
    EXPECT(hl_trajectory_field(tr, 0, re, im, 64) == HL_ERR_INVALID_ARGUMENT);
    EXPECT(hl_trajectory_field(tr, 0, re, im, 65) == HL_OK);
    EXPECT(re[0] == 0.0 && im[0] == 0.0 && re[64] == 0.0);
    double mass0 = 0.0;
    for (int j = 0; j < 65; ++j)
        mass0 += re[j] * re[j] + im[j] * im[j];
    EXPECT(hl_trajectory_field(tr, 4, re, im, 65) == HL_OK);
    double mass1 = 0.0;
    for (int j = 0; j < 65; ++j)
        mass1 += re[j] * re[j] + im[j] * im[j];
    EXPECT(mass0 > 0.0);
    EXPECT(fabs(mass1 - mass0) < 1e-3 * mass0);
    hl_trajectory_free(tr);

    EXPECT(hl_config_set_output_dir(cfg, "capi_out") == HL_OK);
    hl_result* res = NULL;
    EXPECT(hl_run(cfg, 1, &res) == HL_OK);
    EXPECT(hl_result_count(res) == 1);
    EXPECT(strcmp(hl_result_name(res, 0), "capi_solve") == 0);
    EXPECT(hl_result_exit_code(res, 0) == HL_EXIT_OK);
    EXPECT(hl_result_overall_exit_code(res) == HL_EXIT_OK);
    EXPECT(strstr(hl_result_summary(res, 0), "\"trajectory\"") != NULL);
    EXPECT(hl_result_name(res, 3) == NULL);
    hl_result_free(res);
    hl_config_free(cfg);

    FILE* f = fopen("capi_out/capi_solve_identities.csv", "r");
    EXPECT(f != NULL);
    if (f) {
        int lines = 0, c;
        while ((c = fgetc(f)) != EOF)
            lines += c == '\n';
        fclose(f);
        EXPECT(lines == 6);
    }
}

static void test_batch_failure(void)
{
    char text[2048];
    snprintf(text, sizeof text, "{\"schema_version\": 1, \"batch\": [%s, %s]}",
             "{\"name\": \"ok\", \"grid\": {\"L\": 4, \"N\": 15}, \"solver\": {\"T\": 0.1, \"output_dt\": 0.05}}",
             "{\"name\": \"bad\", \"grid\": {\"L\": 4, \"N\": 15}, \"force\": \"constant(1)\"}");
    hl_config* cfg = NULL;
    EXPECT(hl_config_parse(text, NULL, &cfg) == HL_OK);
    EXPECT(hl_config_run_count(cfg) == 2);
    EXPECT(hl_config_set_output_dir(cfg, "capi_out") == HL_OK);
    hl_result* res = NULL;
    EXPECT(hl_run(cfg, 2, &res) == HL_OK);
    EXPECT(hl_result_exit_code(res, 0) == HL_EXIT_OK);
    EXPECT(hl_result_exit_code(res, 1) == HL_EXIT_VALIDATION);
    EXPECT(hl_result_overall_exit_code(res) == HL_EXIT_VALIDATION);
    EXPECT(strstr(hl_result_summary(res, 1), "\"error\"") != NULL);
    hl_result_free(res);
    hl_config_free(cfg);
}

int main(void)
{
    test_basics();
    test_errors();
    test_solve();
    test_batch_failure();
    if (failures)
        fprintf(stderr, "%d failures\n", failures);
    else
        printf("all C API checks passed\n");
    return failures ? 1 : 0;
}
