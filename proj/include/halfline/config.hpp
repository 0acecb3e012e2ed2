#pragma once

#include "halfline/lift.hpp"
#include "halfline/nonlinearity.hpp"
#include "halfline/potential.hpp"
#include "halfline/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace halfline {

inline constexpr int kSchemaVersion = 1;

/// "name" or "name(a, b, ...)"; arguments are complex literals such as 2, -0.5, i, 2i, 1-3i.
struct PresetCall {
    std::string name;
    std::vector<cplx> args;
};

PresetCall parse_preset(const std::string& text);
cplx parse_complex(const std::string& text);

NonlinearitySpec make_nonlinearity(const std::string& preset);
/// Exponent p of a power or saturating preset (3 for "zero").
double nonlinearity_exponent(const std::string& preset);
BoundaryForce make_force(const std::string& preset);
/// zero, gaussian(x0, w, k0[, A]) corrected near both ends so that phi(0) = f(0) and phi(L) = 0,
/// eigenmode(k[, A]) with k = 1 the ground state of the discrete H.
ComplexField make_initial(const std::string& preset, const PotentialSpec& potential, const BoundaryForce& force);

struct RunConfig {
    std::string name = "run";
    std::string experiment = "solve";
    double L = 20.0;
    int N = 255;
    std::string potential = "zero";
    PotentialParams potential_params;
    std::optional<std::filesystem::path> potential_file;  // CSV x,V1,V2
    std::optional<double> potential_delta_reg;            // for sampled potentials
    std::string nonlinearity = "zero";
    std::string force = "zero";
    std::string initial = "zero";
    SolverConfig solver;
    bool identity_use_dV = false;
    bool expect_blowup = false;

    // convergence
    int levels = 3;
    bool oracle = true;
    std::optional<double> oracle_dt;  // level-0 CN step; quartered per level

    // dependence
    std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::string eta = "zero";
    std::string zeta = "zero";

    // hypotheses / inequalities
    int samples = 1000;
    int calibration_samples = 1000;
    std::vector<double> gn_p{2.0, 3.0, 4.0};
    std::vector<double> young_eps{0.1, 1.0, 10.0};
    std::vector<double> kato_eps{0.1, 1.0};
    std::uint64_t seed = 1;

    std::filesystem::path output_dir = ".";
};

/// A config file holds one run object or {"schema_version": 1, "batch": [run, ...]}.
/// Relative paths resolve against base_dir.
std::vector<RunConfig> parse_run_configs(const std::string& json_text, const std::filesystem::path& base_dir = {});
std::vector<RunConfig> load_run_configs(const std::filesystem::path& file);

const std::vector<std::string>& experiment_kinds();

PotentialSpec build_potential(const RunConfig& cfg, const Grid& grid);
/// Builds the problem on the given grid and checks compatibility and force consistency.
Problem build_problem(const RunConfig& cfg, const Grid& grid);
Problem build_problem(const RunConfig& cfg);

/// Full validation without running: presets, solver config, compatibility, Assumption A probe.
void validate_run_config(const RunConfig& cfg);

/// JSON listing every preset family.
std::string presets_json();

} // namespace halfline
