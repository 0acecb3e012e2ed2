#pragma once

#include "halfline/field.hpp"
#include "halfline/hamiltonian.hpp"
#include "halfline/lift.hpp"
#include "halfline/nonlinearity.hpp"
#include "halfline/potential.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace halfline {

struct SolverConfig {
    double T = 1.0;
    double window_T0 = 0.1;
    double picard_tol = 1e-10;
    int picard_max_iter = 60;
    int quad_nodes = 33;
    double contraction_guard = 0.9;
    double blowup_threshold = 1e6;
    double output_dt = 0.1;
    double min_window = 1e-6;
    /// Lift width; default_lift_delta(potential) when unset.
    std::optional<double> lift_delta;
    LiftLaplacian lift_laplacian = LiftLaplacian::Discrete;
    /// Re-solve every window from a zero initial iterate and record the gap.
    bool check_uniqueness = false;
    /// Record h2_norm(u) at every output time.
    bool monitor_h2 = false;

    void validate() const;
};

struct Problem {
    PotentialSpec potential;
    NonlinearitySpec nonlinearity;
    BoundaryForce force;
    ComplexField phi;

    const Grid& grid() const noexcept { return potential.grid(); }
};

enum class SolveStatus { Completed, BlowUp, ContractionFailure };
const char* to_string(SolveStatus s) noexcept;

struct WindowDiagnostics {
    double t_start = 0.0;
    double t_end = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> residuals;  // sup_m L2 update per sweep
    std::vector<double> ratios;     // residuals[k] / residuals[k-1]
    double max_ratio = 0.0;         // over sweeps whose residual is above 100 picard_tol
    std::optional<double> uniqueness_gap;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<ComplexField> fields;  // u = v + r
    std::vector<double> h1;
    std::vector<double> h2;            // only with monitor_h2
    std::vector<WindowDiagnostics> windows;
    SolveStatus status = SolveStatus::Completed;
    /// Last valid time for BlowUp / ContractionFailure, T otherwise.
    double status_time = 0.0;
    std::vector<std::string> warnings;
    double lift_delta = 0.0;
};

enum class InitialIterate { FreeFlow, Zero };

/// Quadrature nodes, free flow and lift data of one window [t_start, t_end].
/// The state is held as modal coefficients of v, one column per node.
class PicardWindow {
public:
    PicardWindow(const Hamiltonian& H, const Lift& lift, const ComplexField& v_start, double t_start, double t_end,
                 int nodes);

    const std::vector<double>& nodes() const noexcept { return tau_; }
    const ModalBlock& free_flow() const noexcept { return C0_; }
    /// P(C) = free flow - i G F1(v + r).
    ModalBlock apply(const ModalBlock& C) const;
    /// sup over nodes of the L2 norm of the difference.
    double distance(const ModalBlock& a, const ModalBlock& b) const;
    /// u = v + r at node m (boundary value f(tau_m)).
    ComplexField solution(const ModalBlock& C, int m) const;
    ComplexField v_field(const ModalBlock& C, int m) const;

private:
    const Hamiltonian& H_;
    const Lift& lift_;
    std::vector<double> tau_;
    ExpQuadratureWeights weights_;
    ModalBlock C0_;
    Eigen::MatrixXcd R_;  // r at interior nodes, one column per node
    Eigen::MatrixXcd S_;  // iteration-independent part of F1
};

struct WindowResult {
    ModalBlock C;
    WindowDiagnostics diagnostics;
    std::string failure;
};

WindowResult picard_window(const PicardWindow& window, const SolverConfig& cfg,
                           InitialIterate init = InitialIterate::FreeFlow);
WindowResult picard_window(const Hamiltonian& H, const Lift& lift, const ComplexField& v_start, double t_start,
                           double t_end, const SolverConfig& cfg, InitialIterate init = InitialIterate::FreeFlow);

/// Output times k * output_dt, k = 0.., with T appended when it is not a multiple.
std::vector<double> output_times(double T, double output_dt);

/// Grid match, force consistency on [0, T], compatibility phi(0) = f(0) and a finiteness probe of F.
void validate_problem(const Problem& problem, double T);

Trajectory solve(const Problem& problem, const SolverConfig& cfg);

struct OracleConfig {
    double T = 1.0;
    double dt = 1e-3;
    double output_dt = 0.1;
    int inner_max_iter = 20;
    double inner_tol = 1e-12;
    double min_dt = 1e-9;
};

/// Crank-Nicolson on u with the boundary value eliminated into the right-hand side.
Trajectory oracle_solve(const Problem& problem, const OracleConfig& cfg);

/// max over common output times of the L2 norm of the difference.
double sup_l2_distance(const Trajectory& a, const Trajectory& b);

struct Perturbation {
    std::string label;
    ComplexField phi;
    BoundaryForce force;
};

/// phi + eps eta and f + eps zeta; eta(0) = zeta(0) keeps compatibility.
Perturbation scaled_perturbation(const Problem& base, const ComplexField& eta, const BoundaryForce& zeta, double eps,
                                 std::string label = {});

struct DependenceRun {
    std::string label;
    double input_deviation = 0.0;   // max(h1(phi_n - phi), C2 distance of forces)
    double output_deviation = 0.0;  // sup over output times of h1(u_n - u)
    double ratio = 0.0;
    SolveStatus status = SolveStatus::Completed;
    double status_time = 0.0;
};

struct DependenceReport {
    SolveStatus base_status = SolveStatus::Completed;
    std::vector<DependenceRun> runs;
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    bool monotone = true;  // output deviation increases with input deviation
};

DependenceReport continuous_dependence_experiment(const Problem& base, std::span<const Perturbation> perturbations,
                                                  const SolverConfig& cfg, int threads = 1);

} // namespace halfline
