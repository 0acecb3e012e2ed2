#pragma once

#include "halfline/config.hpp"
#include "halfline/error.hpp"
#include "halfline/identities.hpp"
#include "halfline/solver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace halfline {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,        // I/O or internal error
    kExitValidation = 2,     // config does not parse or violates a hypothesis
    kExitBlowUp = 3,         // blow-up that the config did not expect
    kExitContraction = 4,    // window fell below the minimum
};

struct ExperimentResult {
    std::string name;
    std::string experiment;
    int exit_code = kExitOk;
    std::string summary_json;
    std::vector<std::filesystem::path> files;
};

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

ExperimentResult run_experiment(const RunConfig& cfg, int threads = 1);
/// Runs independent experiments on up to `threads` threads; results keep the input order.
std::vector<ExperimentResult> run_batch(const std::vector<RunConfig>& configs, int threads);

/// Relative drifts over the trajectory.
double mass_drift(const Trajectory& tr);
double energy_drift(const Trajectory& tr, const PotentialSpec& potential, const NonlinearitySpec& nonlinearity);

/// Identity report on the uniformly spaced prefix of the output times.
IdentityReport uniform_identity_report(const Trajectory& tr, const Problem& problem, bool use_dV = false);

struct ConvergenceLevel {
    int N = 0;
    double h = 0.0;
    double window = 0.0;
    double output_dt = 0.0;
    double oracle_dt = 0.0;
    SolveStatus status = SolveStatus::Completed;
    double residual_mass = 0.0;
    double residual_energy = 0.0;
    double residual_momentum = 0.0;
    double integrated_mass_defect = 0.0;
    double mass_drift = 0.0;
    double energy_drift = 0.0;
    double oracle_distance = 0.0;  // NaN without the oracle
};

struct ConvergenceStudy {
    std::vector<ConvergenceLevel> levels;
    /// Pairwise observed orders log2(e_k / e_{k+1}) per metric.
    std::map<std::string, std::vector<double>> orders;
    std::map<std::string, double> min_order;
};

/// Joint refinement: level k uses N_k + 1 = (N + 1) 2^k, window and output_dt halved,
/// quadrature nodes per window fixed, and the oracle step divided by 4^k.
ConvergenceStudy convergence_study(const RunConfig& cfg, int threads = 1);

/// Exit code for a library error: I/O and internal failures map to kExitFailure, the rest to kExitValidation.
int exit_code_for(const Error& e);
/// {"error": {"code", "message", "hypothesis"}}.
std::string error_json(const Error& e);

/// log2(a / b) for positive a, b; NaN otherwise.
double observed_order(double coarse, double fine);

} // namespace halfline
