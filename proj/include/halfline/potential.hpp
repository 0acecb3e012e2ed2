#pragma once

#include "halfline/field.hpp"

#include <optional>
#include <string>
#include <vector>

namespace halfline {

/// (V')_+ <= C V1 + Q, the derivative bound used for global existence.
struct DerivativeSplit {
    double C = 0.0;
    RealField Q;
};

/// V = V1 + V2 with V1 >= 0 and V2 locally integrable uniformly on unit windows.
struct PotentialSpec {
    std::string name;
    RealField V1;
    RealField V2;
    /// V is known to be W_{1,2} on (0, delta_reg); required for boundary forcing.
    std::optional<double> delta_reg;
    /// Distributional derivative of V = V1 + V2, when known analytically.
    std::optional<RealField> dV;
    std::optional<DerivativeSplit> dV_split;
    /// Human-readable notes about sampling (clipping of singularities, jumps ...).
    std::vector<std::string> notes;

    PotentialSpec(std::string name, RealField v1, RealField v2);

    const Grid& grid() const noexcept { return V1.grid(); }
    RealField total() const;
    RealField q() const { return sqrt_field(V1); }
    /// dV when supplied, centred differences of V otherwise (jumps are lost).
    RealField derivative_or_estimate() const;
};

struct PotentialParams {
    double omega = 1.0;  // harmonic
    double Z = 1.0;      // coulomb_like
    double depth = 1.0;  // well
    double a = 1.0;      // well
    double b = 2.0;      // well
    double c = 1.0;      // constant
};

/// Named presets: zero, harmonic, exp, coulomb_like, well, constant.
PotentialSpec make_potential(const Grid& grid, const std::string& preset, const PotentialParams& params = {});
std::vector<std::string> potential_presets();

/// Potential from samples at arbitrary abscissae (linear interpolation onto the grid).
PotentialSpec potential_from_samples(const Grid& grid, std::span<const double> xs, std::span<const double> v1,
                                     std::span<const double> v2);

/// max over window starts x_j of the integral of |W| over [x_j, min(x_j + window, L)].
double local_l1_sup(const RealField& W, double window = 1.0);

/// K_eps = C + C^2/eps for the form bound  int |V2||phi|^2 <= eps ||phi'||^2 + K_eps ||phi||^2.
double kato_constant(double C, double eps);
/// Constant for ||V2 phi||^2 <= eps ||H0 phi||^2 + K ||phi||^2, where C bounds the local L1 norm of |V2|^2.
double kato_constant_l2(double C, double eps);

struct RelativeBoundReport {
    double eps = 0.0;
    double C = 0.0;
    double K = 0.0;
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;          // min over samples of (rhs - lhs)/max(rhs, tiny)
    bool pass = true;
    // Operator-bound variant (only with check_operator_bound).
    bool operator_bound_checked = false;
    double C_sq = 0.0;
    double K_sq = 0.0;
    int operator_violations = 0;
    double operator_worst_margin = 0.0;
};

struct RelativeBoundOptions {
    double tolerance = 1e-8;
    bool check_operator_bound = false;
};

RelativeBoundReport verify_relative_bound(const PotentialSpec& spec, double eps, std::span<const ComplexField> samples,
                                          const RelativeBoundOptions& options = {});

struct DerivativeSplitReport {
    bool holds = true;
    double max_violation = 0.0;         // max over nodes of (dV)_+ - (C V1 + Q), clipped at 0
    double Q_local_l1 = 0.0;
    double negative_part_local_l1 = 0.0;  // reported only
};

DerivativeSplitReport verify_derivative_split(const PotentialSpec& spec);

} // namespace halfline
