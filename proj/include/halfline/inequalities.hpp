#pragma once

#include "halfline/field.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace halfline {

struct GNParameters {
    double p = 3.0;
    double a = 0.25;   // 1/2 - 1/(p+1)
    double nu = 3.0;   // 1 + 2(p-1)/(5-p)
    double k = 0.5;    // (5-p)/4
};

/// Throws InvalidArgument unless 1 <= p < 5.
GNParameters gn_parameters(double p);

/// max of |2(1-k) - a(p+1)| and |2 nu k - (1-a)(p+1)|.
double gn_identity_defect(const GNParameters& g);

/// int |u|^q dx by the trapezoidal rule.
double lp_power(const ComplexField& u, double q);

struct GNSample {
    double lhs = 0.0;     // ||u||_{p+1}^{p+1}
    double factor = 0.0;  // ||u_x||^{a(p+1)} ||u||^{(p+1)(1-a)}
    double ratio = 0.0;   // lhs / factor (0 when both vanish)
};

GNSample gn_sample(const ComplexField& u, double p);

struct GNCheck {
    double lhs = 0.0;
    double rhs = 0.0;  // C * factor
    bool holds = true;
};

GNCheck check_gn(const ComplexField& u, double p, double C);

/// Largest observed ratio times `safety`.
double calibrate_gn_constant(std::span<const ComplexField> samples, double p, double safety = 1.05);

struct YoungCheck {
    double lhs = 0.0;
    double rhs = 0.0;  // C eps ||u_x||^2 + C eps^{-(nu-1)/2} ||u||^{2 nu}
    bool holds = true;
};

YoungCheck check_young_split(const ComplexField& u, double p, double eps, double C);

/// a^{1-k} b^k against eps a + eps^{-(1/k - 1)} b; returns {lhs, rhs}.
std::pair<double, double> young_scalar(double a, double b, double k, double eps);

struct SmoothFieldOptions {
    int bumps = 4;             // Gaussian bumps with random centre, width, phase and chirp
    double min_width = 0.3;    // relative to 1
    double max_width = 2.0;
    bool vanish_at_zero = true;
    bool vanish_at_L = true;
};

/// Random smooth complex field; deterministic for a given engine state.
ComplexField random_smooth_field(const Grid& grid, std::mt19937_64& rng, const SmoothFieldOptions& options = {});

std::vector<ComplexField> random_smooth_fields(const Grid& grid, int count, std::uint64_t seed,
                                               const SmoothFieldOptions& options = {});

} // namespace halfline
