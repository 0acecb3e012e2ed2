#pragma once

#include "halfline/field.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace halfline {

using ComplexFn = std::function<cplx(double x, double t, cplx z)>;
using RealFn = std::function<double(double x, double t, cplx z)>;

/// A nonlinearity F(x, t, z) with optional analytic derivatives and an optional
/// real density h with F = 2 dh/dzbar. Missing derivatives fall back to central
/// differences with step 1e-6 (1 + |argument|).
class NonlinearitySpec {
public:
    std::string name;
    ComplexFn F;
    std::optional<ComplexFn> dFdz;
    std::optional<ComplexFn> dFdzbar;
    std::optional<ComplexFn> dFdx;
    std::optional<ComplexFn> dFdt;
    std::optional<RealFn> h;
    std::optional<RealFn> dh_dx;
    std::optional<RealFn> dh_dt;
    /// Set by presets whose F and h do not depend on x or t.
    bool autonomous = false;

    cplx eval(double x, double t, cplx z) const { return F(x, t, z); }
    cplx wirtinger_z(double x, double t, cplx z) const;
    cplx wirtinger_zbar(double x, double t, cplx z) const;
    cplx partial_x(double x, double t, cplx z) const;
    cplx partial_t(double x, double t, cplx z) const;
    bool is_zero() const noexcept { return zero_; }

    static NonlinearitySpec zero();
    /// F = lambda |z|^{p-1} z; h = lambda |z|^{p+1}/(p+1) when lambda is real.
    static NonlinearitySpec power(cplx lambda, double p);
    /// F = lambda |z|^{p-1} z / (1 + s |z|^{p-1}).
    static NonlinearitySpec saturating(cplx lambda, double p, double s);

private:
    bool zero_ = false;
};

std::vector<std::string> nonlinearity_presets();

/// Finite-difference Wirtinger derivatives in a = Re z, b = Im z.
cplx fd_wirtinger_z(const ComplexFn& F, double x, double t, cplx z, double step);
cplx fd_wirtinger_zbar(const ComplexFn& F, double x, double t, cplx z, double step);

/// F'(z) v = (dF/dz) v + (dF/dzbar) conj(v); real-linear in v.
cplx wirtinger_apply(const NonlinearitySpec& spec, double x, double t, cplx z, cplx v);

struct SampleSet {
    std::vector<double> xs;
    std::vector<double> ts;
    std::vector<cplx> zs;

    /// Lattice of xs x ts x {r e^{i theta}} with radii in (0, R] plus z = 0.
    static SampleSet lattice(double x_max, double t_max, double R, int nx = 5, int nt = 4, int nr = 8, int ntheta = 8);
    /// Geometric radii from r_min to r_max (for growth-rate probes).
    static SampleSet radial(double x_max, double t_max, double r_min, double r_max, int nr = 25, int ntheta = 6);
};

struct CheckReport {
    bool applicable = true;
    bool pass = true;
    double max_error = 0.0;
    int samples = 0;
};

/// |Im(conj(z) F)| <= 1e-12 (1 + |z||F|) on every sample.
CheckReport check_sign_condition(const NonlinearitySpec& spec, const SampleSet& samples);
/// F against 2 dh/dzbar by central differences, step 1e-5 (1 + |z|); relative tolerance 1e-6.
CheckReport check_hamiltonian_structure(const NonlinearitySpec& spec, const SampleSet& samples);
/// Supplied dF/dz, dF/dzbar against finite differences (relative).
CheckReport check_wirtinger_consistency(const NonlinearitySpec& spec, const SampleSet& samples, double tol = 1e-6);

struct AssumptionAProbe {
    double derivative_bound = 0.0;  // sup |dF/dz| + |dF/dzbar|
    double x_derivative_ratio = 0.0;  // sup |dF/dx| / |z|
    double t_derivative_at_boundary = 0.0;  // sup |dF/dt (0, t, z)|
    double F_at_zero = 0.0;  // sup |F(x, t, 0)|
    bool finite = true;
};

AssumptionAProbe probe_assumption_a(const NonlinearitySpec& spec, double R, double t0, double t1,
                                    std::span<const double> x_samples, int n_radii = 12, int n_angles = 12,
                                    int n_times = 6);

struct GrowthBound {
    double C = 0.0;       // smallest constant consistent with the samples
    bool bounded = true;  // false when the ratio keeps growing at the sample extremes
};

struct GrowthReport {
    bool applicable = true;
    GrowthBound space;   // (dh/dx)_+ <= C |z|^2
    GrowthBound time;    // (dh/dt)_+ <= C (|z|^2 + |z|^{p+1})
    GrowthBound lower;   // h >= -C (|z|^2 + |z|^{p+1})
};

GrowthReport check_growth_hypotheses(const NonlinearitySpec& spec, double p, const SampleSet& samples);

} // namespace halfline
