#include "halfline_nls.h"

#include "halfline/config.hpp"
#include "halfline/error.hpp"
#include "halfline/experiments.hpp"
#include "halfline/parallel.hpp"
#include "halfline/solver.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

using namespace halfline;

struct hl_config {
    std::vector<RunConfig> runs;
};

struct hl_result {
    std::vector<ExperimentResult> results;
};

struct hl_trajectory {
    Trajectory traj;
};

namespace {

thread_local std::string last_error;
thread_local int last_exit = 0;

hl_status status_of(ErrorCode c)
{
    switch (c) {
    case ErrorCode::InvalidArgument: return HL_ERR_INVALID_ARGUMENT;
    case ErrorCode::DomainTooShort: return HL_ERR_DOMAIN_TOO_SHORT;
    case ErrorCode::Configuration: return HL_ERR_CONFIGURATION;
    case ErrorCode::DomainViolation: return HL_ERR_DOMAIN_VIOLATION;
    case ErrorCode::InternalConsistency: return HL_ERR_INTERNAL;
    case ErrorCode::Parse: return HL_ERR_PARSE;
    case ErrorCode::Io: return HL_ERR_IO;
    }
    return HL_ERR_INTERNAL;
}

hl_status fail(const Error& e)
{
    last_error = error_json(e);
    last_exit = exit_code_for(e);
    return status_of(e.code());
}

hl_status fail(hl_status s, ErrorCode code, const std::string& message) { return (void)fail(Error(code, message)), s; }

template <class Fn>
hl_status guarded(Fn&& fn)
{
    last_error.clear();
    last_exit = 0;
    try {
        return fn();
    } catch (const Error& e) {
        return fail(e);
    } catch (const std::bad_alloc&) {
        return fail(Error(ErrorCode::InternalConsistency, "out of memory"));
    } catch (const std::exception& e) {
        return fail(Error(ErrorCode::InternalConsistency, e.what()));
    }
}

char* dup(const std::string& s)
{
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p)
        throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

} // namespace

extern "C" {

const char* hl_version(void) { return "1.0.0"; }

const char* hl_status_name(hl_status s)
{
    switch (s) {
    case HL_OK: return "ok";
    case HL_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case HL_ERR_DOMAIN_TOO_SHORT: return "domain_too_short";
    case HL_ERR_CONFIGURATION: return "configuration";
    case HL_ERR_DOMAIN_VIOLATION: return "domain_violation";
    case HL_ERR_INTERNAL: return "internal";
    case HL_ERR_PARSE: return "parse";
    case HL_ERR_IO: return "io";
    case HL_ERR_NULL_ARGUMENT: return "null_argument";
    case HL_ERR_OUT_OF_RANGE: return "out_of_range";
    }
    return "unknown";
}

const char* hl_last_error(void) { return last_error.c_str(); }
int hl_last_error_exit_code(void) { return last_exit; }

void hl_string_free(char* s) { std::free(s); }

hl_status hl_presets_json(char** out)
{
    return guarded([&] {
        if (!out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "out is null");
        *out = dup(presets_json());
        return HL_OK;
    });
}

hl_status hl_config_load(const char* path, hl_config** out)
{
    return guarded([&] {
        if (!path || !out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "path or out is null");
        *out = nullptr;
        auto cfg = std::make_unique<hl_config>();
        cfg->runs = load_run_configs(path);
        *out = cfg.release();
        return HL_OK;
    });
}

hl_status hl_config_parse(const char* text, const char* base_dir, hl_config** out)
{
    return guarded([&] {
        if (!text || !out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "text or out is null");
        *out = nullptr;
        auto cfg = std::make_unique<hl_config>();
        cfg->runs = parse_run_configs(text, base_dir ? std::filesystem::path(base_dir) : std::filesystem::path());
        *out = cfg.release();
        return HL_OK;
    });
}

void hl_config_free(hl_config* c) { delete c; }

size_t hl_config_run_count(const hl_config* c) { return c ? c->runs.size() : 0; }

hl_status hl_config_validate(const hl_config* c)
{
    return guarded([&] {
        if (!c)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "config is null");
        for (const auto& r : c->runs)
            validate_run_config(r);
        return HL_OK;
    });
}

hl_status hl_config_set_output_dir(hl_config* c, const char* dir)
{
    return guarded([&] {
        if (!c || !dir)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "config or dir is null");
        for (auto& r : c->runs)
            r.output_dir = dir;
        return HL_OK;
    });
}

hl_status hl_run(const hl_config* c, int threads, hl_result** out)
{
    return guarded([&] {
        if (!c || !out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "config or out is null");
        *out = nullptr;
        auto res = std::make_unique<hl_result>();
        res->results = run_batch(c->runs, threads > 0 ? threads : thread_cap());
        *out = res.release();
        return HL_OK;
    });
}

void hl_result_free(hl_result* r) { delete r; }
size_t hl_result_count(const hl_result* r) { return r ? r->results.size() : 0; }

const char* hl_result_name(const hl_result* r, size_t i)
{
    return r && i < r->results.size() ? r->results[i].name.c_str() : nullptr;
}

int hl_result_exit_code(const hl_result* r, size_t i)
{
    return r && i < r->results.size() ? r->results[i].exit_code : -1;
}

int hl_result_overall_exit_code(const hl_result* r)
{
    if (!r)
        return HL_EXIT_FAILURE;
    for (const auto& e : r->results)
        if (e.exit_code != 0)
            return e.exit_code;
    return 0;
}

const char* hl_result_summary(const hl_result* r, size_t i)
{
    return r && i < r->results.size() ? r->results[i].summary_json.c_str() : nullptr;
}

hl_status hl_solve(const hl_config* c, size_t index, hl_trajectory** out)
{
    return guarded([&] {
        if (!c || !out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "config or out is null");
        *out = nullptr;
        if (index >= c->runs.size())
            return fail(HL_ERR_OUT_OF_RANGE, ErrorCode::InvalidArgument, "run index out of range");
        const RunConfig& rc = c->runs[index];
        validate_run_config(rc);
        auto t = std::make_unique<hl_trajectory>();
        t->traj = solve(build_problem(rc), rc.solver);
        *out = t.release();
        return HL_OK;
    });
}

void hl_trajectory_free(hl_trajectory* t) { delete t; }
size_t hl_trajectory_length(const hl_trajectory* t) { return t ? t->traj.times.size() : 0; }

size_t hl_trajectory_nodes(const hl_trajectory* t)
{
    return t && !t->traj.fields.empty() ? static_cast<size_t>(t->traj.fields.front().size()) : 0;
}

const char* hl_trajectory_status(const hl_trajectory* t) { return t ? to_string(t->traj.status) : nullptr; }
double hl_trajectory_status_time(const hl_trajectory* t) { return t ? t->traj.status_time : 0.0; }

hl_status hl_trajectory_time(const hl_trajectory* t, size_t k, double* out)
{
    return guarded([&] {
        if (!t || !out)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "trajectory or out is null");
        if (k >= t->traj.times.size())
            return fail(HL_ERR_OUT_OF_RANGE, ErrorCode::InvalidArgument, "time index out of range");
        *out = t->traj.times[k];
        return HL_OK;
    });
}

hl_status hl_trajectory_field(const hl_trajectory* t, size_t k, double* re, double* im, size_t n)
{
    return guarded([&] {
        if (!t || !re || !im)
            return fail(HL_ERR_NULL_ARGUMENT, ErrorCode::InvalidArgument, "trajectory or buffers are null");
        if (k >= t->traj.fields.size())
            return fail(HL_ERR_OUT_OF_RANGE, ErrorCode::InvalidArgument, "time index out of range");
        const ComplexField& u = t->traj.fields[k];
        if (n != static_cast<size_t>(u.size()))
            return fail(HL_ERR_INVALID_ARGUMENT, ErrorCode::InvalidArgument, "buffer length must equal the node count");
        for (size_t j = 0; j < n; ++j) {
            re[j] = u[static_cast<int>(j)].real();
            im[j] = u[static_cast<int>(j)].imag();
        }
        return HL_OK;
    });
}

} // extern "C"
