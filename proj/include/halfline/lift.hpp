#pragma once

#include "halfline/field.hpp"
#include "halfline/nonlinearity.hpp"
#include "halfline/potential.hpp"

#include <functional>
#include <optional>
#include <string>

namespace halfline {

using TimeFn = std::function<cplx(double t)>;

/// Dirichlet data u(0, t) = f(t) with its first two (optionally three) derivatives.
struct BoundaryForce {
    std::string name = "zero";
    TimeFn f;
    TimeFn df;
    TimeFn d2f;
    std::optional<TimeFn> d3f;
    bool identically_zero = false;

    static BoundaryForce zero();
    /// A sin(omega t).
    static BoundaryForce sinusoid(double A, double omega);
    /// A (1 - exp(-(t/T_r)^2)): smooth ramp from 0 to A.
    static BoundaryForce ramp(double A, double T_r);
    /// A exp(i omega t).
    static BoundaryForce phase(double A, double omega);
    /// Constant c.
    static BoundaryForce constant(cplx c);
};

std::vector<std::string> force_presets();

/// Spot-check df, d2f (and d3f) against central differences of f on [0, T]; returns the worst relative error.
double force_consistency_error(const BoundaryForce& force, double T, int samples = 33);
/// Throws a configuration error naming the C^2 hypothesis when the spot-check exceeds 1e-6.
void require_force_consistency(const BoundaryForce& force, double T);

/// sup over [0, T] of max(|g|, |g'|, |g''|) sampled on `samples` points.
double c2_distance(const BoundaryForce& a, const BoundaryForce& b, double T, int samples = 2001);

/// g and its first three derivatives at a point.
struct CutoffValue {
    double g = 0.0, dg = 0.0, d2g = 0.0, d3g = 0.0;
};

/// Smooth cutoff: 1 on [0, delta/2], 0 on [delta, inf), built from exp(-1/t).
CutoffValue cutoff_g(double x, double delta);

struct LiftSpec {
    double delta = 0.0;
    RealField g, dg, d2g, d3g;

    LiftSpec(const Grid& grid, double delta);
};

/// |phi(0) - f(0)| <= 1e-10 (1 + |f(0)|).
bool compatibility_check(const ComplexField& phi, const BoundaryForce& force);

struct LiftSample {
    ComplexField r, r_t, r_x, r_xx;
};

enum class LiftLaplacian {
    /// Three-point Laplacian of the sampled lift; consistent with the discrete H.
    Discrete,
    /// Analytic second derivative of the lift.
    Analytic,
};

/// Boundary lift r(x, t) = [f + x^2 A(t)/2] g(x), A = V(0) f + F(0, t, f) - i f',
/// and the transformed source F1(v) = F(x, t, v + r) - i r_t + V r - r_xx.
/// V(0) is the potential at the first interior node.
class Lift {
public:
    Lift(const PotentialSpec& potential, const NonlinearitySpec& nonlinearity, const BoundaryForce& force,
         double delta, LiftLaplacian laplacian = LiftLaplacian::Discrete);

    const LiftSpec& spec() const noexcept { return spec_; }
    const Grid& grid() const noexcept { return spec_.g.grid(); }
    double delta() const noexcept { return spec_.delta; }
    bool trivial() const noexcept { return force_.identically_zero; }

    LiftSample lift_r(double t) const;
    /// Iteration-independent part of F1: -i r_t + V r - r_xx (r_xx per the Laplacian choice).
    ComplexField source(double t) const;
    ComplexField f1_eval(const ComplexField& v, double t) const;

    const NonlinearitySpec& nonlinearity() const noexcept { return F_; }
    const BoundaryForce& force() const noexcept { return force_; }
    const RealField& potential() const noexcept { return V_; }
    LiftLaplacian laplacian() const noexcept { return laplacian_; }

private:
    cplx boundary_A(double t) const;

    LiftSpec spec_;
    RealField V_;
    double V0_;
    NonlinearitySpec F_;
    BoundaryForce force_;
    LiftLaplacian laplacian_;
};

/// Default lift width min(1, L/4), further limited by the potential's regularity interval.
double default_lift_delta(const PotentialSpec& potential);

} // namespace halfline
