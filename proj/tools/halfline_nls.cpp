// Command-line front end; talks to the library only through halfline_nls.h.
#include "halfline_nls.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int report_error()
{
    std::fprintf(stderr, "%s\n", hl_last_error());
    const int code = hl_last_error_exit_code();
    return code ? code : HL_EXIT_FAILURE;
}

int do_run(const std::string& path, int threads, const std::string& out_dir, bool quiet)
{
    hl_config* cfg = nullptr;
    if (hl_config_load(path.c_str(), &cfg) != HL_OK)
        return report_error();
    if (!out_dir.empty() && hl_config_set_output_dir(cfg, out_dir.c_str()) != HL_OK) {
        hl_config_free(cfg);
        return report_error();
    }
    hl_result* res = nullptr;
    const hl_status s = hl_run(cfg, threads, &res);
    hl_config_free(cfg);
    if (s != HL_OK)
        return report_error();
    const size_t n = hl_result_count(res);
    for (size_t i = 0; i < n; ++i) {
        const int code = hl_result_exit_code(res, i);
        if (code == HL_EXIT_VALIDATION || code == HL_EXIT_FAILURE)
            std::fprintf(stderr, "%s\n", hl_result_summary(res, i));
        else if (!quiet)
            std::printf("%s\n", hl_result_summary(res, i));
    }
    const int code = hl_result_overall_exit_code(res);
    hl_result_free(res);
    return code;
}

int do_validate(const std::string& path)
{
    hl_config* cfg = nullptr;
    if (hl_config_load(path.c_str(), &cfg) != HL_OK)
        return report_error();
    const hl_status s = hl_config_validate(cfg);
    const size_t n = hl_config_run_count(cfg);
    hl_config_free(cfg);
    if (s != HL_OK)
        return report_error();
    std::printf("{\"valid\": true, \"runs\": %zu}\n", n);
    return HL_EXIT_OK;
}

int do_presets()
{
    char* text = nullptr;
    if (hl_presets_json(&text) != HL_OK)
        return report_error();
    std::printf("%s\n", text);
    hl_string_free(text);
    return HL_EXIT_OK;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Forced NLS on the half-line: solve, validate and study runs described by a JSON config"};
    app.require_subcommand(1);

    std::string run_path, validate_path, out_dir;
    int threads = 0;
    bool quiet = false;
    auto* run = app.add_subcommand("run", "execute the experiments in a config file");
    run->add_option("config", run_path, "config file")->required();
    run->add_option("-j,--threads", threads, "worker threads (default: HALFLINE_NLS_THREADS or all cores)");
    run->add_option("-o,--output-dir", out_dir, "override the output directory of every run");
    run->add_flag("-q,--quiet", quiet, "do not print summaries");
    auto* validate = app.add_subcommand("validate", "parse and validate a config without running it");
    validate->add_option("config", validate_path, "config file")->required();
    auto* presets = app.add_subcommand("presets", "list preset families as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : HL_EXIT_VALIDATION;
    }
    if (*run)
        return do_run(run_path, threads, out_dir, quiet);
    if (*validate)
        return do_validate(validate_path);
    if (*presets)
        return do_presets();
    return HL_EXIT_FAILURE;
}
