#include "halfline/lift.hpp"

#include "halfline/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace halfline {

BoundaryForce BoundaryForce::zero()
{
    BoundaryForce b;
    const TimeFn z = [](double) { return cplx{}; };
    b.f = b.df = b.d2f = z;
    b.d3f = z;
    b.identically_zero = true;
    return b;
}

BoundaryForce BoundaryForce::sinusoid(double A, double w)
{
    BoundaryForce b;
    b.name = "sinusoid(" + std::to_string(A) + "," + std::to_string(w) + ")";
    b.f = [=](double t) { return cplx(A * std::sin(w * t)); };
    b.df = [=](double t) { return cplx(A * w * std::cos(w * t)); };
    b.d2f = [=](double t) { return cplx(-A * w * w * std::sin(w * t)); };
    b.d3f = [=](double t) { return cplx(-A * w * w * w * std::cos(w * t)); };
    b.identically_zero = A == 0.0;
    return b;
}

BoundaryForce BoundaryForce::ramp(double A, double Tr)
{
    if (!(Tr > 0.0))
        throw Error(ErrorCode::Configuration, "ramp time must be positive");
    BoundaryForce b;
    b.name = "ramp(" + std::to_string(A) + "," + std::to_string(Tr) + ")";
    // f = A (1 - e^{-s^2}), s = t/Tr
    b.f = [=](double t) {
        const double s = t / Tr;
        return cplx(A * (1.0 - std::exp(-s * s)));
    };
    b.df = [=](double t) {
        const double s = t / Tr;
        return cplx(A * 2.0 * s * std::exp(-s * s) / Tr);
    };
    b.d2f = [=](double t) {
        const double s = t / Tr;
        return cplx(A * (2.0 - 4.0 * s * s) * std::exp(-s * s) / (Tr * Tr));
    };
    b.d3f = [=](double t) {
        const double s = t / Tr;
        return cplx(A * (8.0 * s * s * s - 12.0 * s) * std::exp(-s * s) / (Tr * Tr * Tr));
    };
    b.identically_zero = A == 0.0;
    return b;
}

BoundaryForce BoundaryForce::phase(double A, double w)
{
    BoundaryForce b;
    b.name = "phase(" + std::to_string(A) + "," + std::to_string(w) + ")";
    const cplx iw(0.0, w);
    b.f = [=](double t) { return A * std::exp(iw * t); };
    b.df = [=](double t) { return A * iw * std::exp(iw * t); };
    b.d2f = [=](double t) { return A * iw * iw * std::exp(iw * t); };
    b.d3f = [=](double t) { return A * iw * iw * iw * std::exp(iw * t); };
    b.identically_zero = A == 0.0;
    return b;
}

BoundaryForce BoundaryForce::constant(cplx c)
{
    BoundaryForce b = zero();
    b.name = "constant";
    b.f = [=](double) { return c; };
    b.identically_zero = c == cplx{};
    return b;
}

std::vector<std::string> force_presets() { return {"zero", "sinusoid(A,omega)", "ramp(A,T_r)", "phase(A,omega)", "constant(c)"}; }

double force_consistency_error(const BoundaryForce& force, double T, int samples)
{
    if (!force.f || !force.df || !force.d2f)
        return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    auto check = [&](const TimeFn& fn, const TimeFn& dfn, double t) {
        const double s = 1e-4 * (1.0 + std::abs(t));
        const cplx fd = (fn(t + s) - fn(t - s)) / (2.0 * s);
        const cplx an = dfn(t);
        const double scale = 1.0 + std::abs(an) + std::abs(fn(t));
        worst = std::max(worst, std::abs(fd - an) / scale);
    };
    for (int i = 0; i < samples; ++i) {
        const double t = T * i / std::max(1, samples - 1);
        check(force.f, force.df, t);
        check(force.df, force.d2f, t);
        if (force.d3f)
            check(force.d2f, *force.d3f, t);
    }
    return worst;
}

void require_force_consistency(const BoundaryForce& force, double T)
{
    if (force.identically_zero)
        return;
    if (!force.df || !force.d2f)
        throw Error(ErrorCode::Configuration, "boundary force needs f, f' and f''",
                    "Assumption B: f must be C^2 (d2f missing)");
    const double e = force_consistency_error(force, T);
    if (!(e <= 1e-6))
        throw Error(ErrorCode::Configuration,
                    "boundary force derivatives disagree with finite differences (relative error " +
                        std::to_string(e) + ")",
                    "Assumption B: f must be C^2 with consistent derivatives");
}

double c2_distance(const BoundaryForce& a, const BoundaryForce& b, double T, int samples)
{
    double d = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = T * i / std::max(1, samples - 1);
        d = std::max({d, std::abs(a.f(t) - b.f(t)), std::abs(a.df(t) - b.df(t)), std::abs(a.d2f(t) - b.d2f(t))});
    }
    return d;
}

namespace {

/// Truncated Taylor series (value and three derivatives / k!).
struct Jet {
    std::array<double, 4> c{};

    static Jet variable(double x) { return Jet{{x, 1.0, 0.0, 0.0}}; }
    static Jet constant(double x) { return Jet{{x, 0.0, 0.0, 0.0}}; }

    friend Jet operator+(const Jet& a, const Jet& b)
    {
        Jet r;
        for (int k = 0; k < 4; ++k)
            r.c[k] = a.c[k] + b.c[k];
        return r;
    }
    friend Jet operator-(const Jet& a)
    {
        Jet r;
        for (int k = 0; k < 4; ++k)
            r.c[k] = -a.c[k];
        return r;
    }
    friend Jet operator*(const Jet& a, const Jet& b)
    {
        Jet r;
        for (int k = 0; k < 4; ++k)
            for (int j = 0; j <= k; ++j)
                r.c[k] += a.c[j] * b.c[k - j];
        return r;
    }
    Jet reciprocal() const
    {
        Jet r;
        r.c[0] = 1.0 / c[0];
        for (int k = 1; k < 4; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j)
                s += c[j] * r.c[k - j];
            r.c[k] = -s * r.c[0];
        }
        return r;
    }
    Jet exp() const
    {
        Jet r;
        r.c[0] = std::exp(c[0]);
        for (int k = 1; k < 4; ++k) {
            double s = 0.0;
            for (int j = 1; j <= k; ++j)
                s += j * c[j] * r.c[k - j];
            r.c[k] = s / k;
        }
        return r;
    }
};

// exp(-1/t) for t > 0, 0 otherwise; below t = 1/700 the value underflows anyway.
Jet bump_rho(const Jet& t)
{
    if (t.c[0] <= 1.0 / 700.0)
        return Jet{};
    return (-t.reciprocal()).exp();
}

} // namespace

CutoffValue cutoff_g(double x, double delta)
{
    if (!(delta > 0.0))
        throw Error(ErrorCode::InvalidArgument, "cutoff width delta must be positive");
    const double s = (delta - x) / (0.5 * delta);
    if (s >= 1.0)
        return {1.0, 0.0, 0.0, 0.0};
    if (s <= 0.0)
        return {};
    const Jet js = Jet::variable(s);
    const Jet a = bump_rho(js);
    const Jet b = bump_rho(Jet::constant(1.0) + (-js));
    const Jet psi = a * (a + b).reciprocal();
    const double ds = -2.0 / delta;
    return {psi.c[0], psi.c[1] * ds, 2.0 * psi.c[2] * ds * ds, 6.0 * psi.c[3] * ds * ds * ds};
}

LiftSpec::LiftSpec(const Grid& grid, double d) : delta(d), g(grid), dg(grid), d2g(grid), d3g(grid)
{
    if (!(d > 0.0) || d >= grid.length())
        throw Error(ErrorCode::Configuration, "lift width delta must satisfy 0 < delta < L");
    for (int j = 0; j < grid.size(); ++j) {
        const CutoffValue c = cutoff_g(grid.x(j), d);
        g[j] = c.g;
        dg[j] = c.dg;
        d2g[j] = c.d2g;
        d3g[j] = c.d3g;
    }
}

bool compatibility_check(const ComplexField& phi, const BoundaryForce& force)
{
    const cplx f0 = force.f(0.0);
    return std::abs(phi[0] - f0) <= 1e-10 * (1.0 + std::abs(f0));
}

double default_lift_delta(const PotentialSpec& potential)
{
    double d = std::min(1.0, potential.grid().length() / 4.0);
    if (potential.delta_reg)
        d = std::min(d, *potential.delta_reg);
    return d;
}

Lift::Lift(const PotentialSpec& potential, const NonlinearitySpec& nonlinearity, const BoundaryForce& force,
           double delta, LiftLaplacian laplacian)
    : spec_(potential.grid(), delta), V_(potential.total()), V0_(V_[1]), F_(nonlinearity), force_(force),
      laplacian_(laplacian)
{
    if (!force_.identically_zero) {
        if (!force_.f || !force_.df || !force_.d2f)
            throw Error(ErrorCode::Configuration, "boundary force needs f, f' and f''",
                        "Assumption B: f must be C^2 (d2f missing)");
        if (!potential.delta_reg)
            throw Error(ErrorCode::Configuration,
                        "boundary forcing needs a potential known to be W_{1,2} near x = 0 (delta_reg missing)",
                        "Assumption B: V in W_{1,2}((0, delta)) when f is not identically zero");
        if (delta > *potential.delta_reg + 1e-14)
            throw Error(ErrorCode::Configuration, "lift width exceeds the potential's regularity interval",
                        "Assumption B: V in W_{1,2}((0, delta)) when f is not identically zero");
    }
}

cplx Lift::boundary_A(double t) const
{
    const cplx f = force_.f(t);
    return V0_ * f + F_.eval(0.0, t, f) - cplx(0.0, 1.0) * force_.df(t);
}

LiftSample Lift::lift_r(double t) const
{
    const Grid& g = grid();
    LiftSample s{ComplexField(g), ComplexField(g), ComplexField(g), ComplexField(g)};
    if (force_.identically_zero)
        return s;
    const cplx f = force_.f(t);
    const cplx df = force_.df(t);
    const cplx d2f = force_.d2f(t);
    const cplx A = boundary_A(t);
    const cplx At = V0_ * df + F_.partial_t(0.0, t, f) + wirtinger_apply(F_, 0.0, t, f, df) - cplx(0.0, 1.0) * d2f;
    for (int j = 0; j < g.size(); ++j) {
        const double gj = spec_.g[j];
        if (gj == 0.0 && spec_.dg[j] == 0.0 && spec_.d2g[j] == 0.0)
            continue;
        const double x = g.x(j);
        const cplx base = f + 0.5 * x * x * A;
        s.r[j] = base * gj;
        s.r_x[j] = x * A * gj + base * spec_.dg[j];
        s.r_xx[j] = A * gj + 2.0 * x * A * spec_.dg[j] + base * spec_.d2g[j];
        s.r_t[j] = (df + 0.5 * x * x * At) * gj;
    }
    return s;
}

ComplexField Lift::source(double t) const
{
    ComplexField out(grid());
    if (force_.identically_zero)
        return out;
    const LiftSample s = lift_r(t);
    const int n = out.size();
    const double ih2 = 1.0 / (grid().spacing() * grid().spacing());
    const cplx I(0.0, 1.0);
    for (int j = 1; j < n - 1; ++j) {
        const cplx rxx = laplacian_ == LiftLaplacian::Discrete ? (s.r[j + 1] - 2.0 * s.r[j] + s.r[j - 1]) * ih2
                                                               : s.r_xx[j];
        out[j] = -I * s.r_t[j] + V_[j] * s.r[j] - rxx;
    }
    // x = 0 uses the same V(0) as A(t) so the boundary cancellation is exact.
    out[0] = -I * s.r_t[0] + V0_ * s.r[0] - s.r_xx[0];
    out[n - 1] = -I * s.r_t[n - 1] + V_[n - 1] * s.r[n - 1] - s.r_xx[n - 1];
    return out;
}

ComplexField Lift::f1_eval(const ComplexField& v, double t) const
{
    const Grid& g = grid();
    const ComplexField r = lift_r(t).r;
    ComplexField out = source(t);
    for (int j = 0; j < g.size(); ++j)
        out[j] += F_.eval(g.x(j), t, v[j] + r[j]);
    const cplx f = force_.f(t);
    const double scale = 1.0 + std::abs(F_.eval(0.0, t, f)) + std::abs(force_.df(t)) + std::abs(V0_ * f) + std::abs(f);
    if (std::abs(v[0]) <= 1e-12 * (1.0 + sup_norm(v)) && std::abs(out[0]) > 1e-10 * scale)
        throw Error(ErrorCode::InternalConsistency, "transformed source does not vanish at x = 0");
    return out;
}

} // namespace halfline
