#include "halfline/nonlinearity.hpp"

#include "halfline/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace halfline {

namespace {

constexpr double kDerivStep = 1e-6;

double real_step(double v) { return kDerivStep * (1.0 + std::abs(v)); }

} // namespace

cplx fd_wirtinger_z(const ComplexFn& F, double x, double t, cplx z, double step)
{
    const cplx da = (F(x, t, z + step) - F(x, t, z - step)) / (2.0 * step);
    const cplx db = (F(x, t, z + cplx(0, step)) - F(x, t, z - cplx(0, step))) / (2.0 * step);
    return 0.5 * (da - cplx(0, 1) * db);
}

cplx fd_wirtinger_zbar(const ComplexFn& F, double x, double t, cplx z, double step)
{
    const cplx da = (F(x, t, z + step) - F(x, t, z - step)) / (2.0 * step);
    const cplx db = (F(x, t, z + cplx(0, step)) - F(x, t, z - cplx(0, step))) / (2.0 * step);
    return 0.5 * (da + cplx(0, 1) * db);
}

cplx NonlinearitySpec::wirtinger_z(double x, double t, cplx z) const
{
    if (dFdz)
        return (*dFdz)(x, t, z);
    return fd_wirtinger_z(F, x, t, z, real_step(std::abs(z)));
}

cplx NonlinearitySpec::wirtinger_zbar(double x, double t, cplx z) const
{
    if (dFdzbar)
        return (*dFdzbar)(x, t, z);
    return fd_wirtinger_zbar(F, x, t, z, real_step(std::abs(z)));
}

cplx NonlinearitySpec::partial_x(double x, double t, cplx z) const
{
    if (dFdx)
        return (*dFdx)(x, t, z);
    const double s = real_step(x);
    return (F(x + s, t, z) - F(std::max(0.0, x - s), t, z)) / (x + s - std::max(0.0, x - s));
}

cplx NonlinearitySpec::partial_t(double x, double t, cplx z) const
{
    if (dFdt)
        return (*dFdt)(x, t, z);
    const double s = real_step(t);
    return (F(x, t + s, z) - F(x, t - s, z)) / (2.0 * s);
}

NonlinearitySpec NonlinearitySpec::zero()
{
    NonlinearitySpec s;
    s.name = "zero";
    const ComplexFn zero_fn = [](double, double, cplx) { return cplx{}; };
    const RealFn zero_real = [](double, double, cplx) { return 0.0; };
    s.F = zero_fn;
    s.dFdz = zero_fn;
    s.dFdzbar = zero_fn;
    s.dFdx = zero_fn;
    s.dFdt = zero_fn;
    s.h = zero_real;
    s.dh_dx = zero_real;
    s.dh_dt = zero_real;
    s.autonomous = true;
    s.zero_ = true;
    return s;
}

namespace {

void set_autonomous_partials(NonlinearitySpec& s)
{
    const ComplexFn zero_fn = [](double, double, cplx) { return cplx{}; };
    s.dFdx = zero_fn;
    s.dFdt = zero_fn;
    s.autonomous = true;
    if (s.h) {
        const RealFn zero_real = [](double, double, cplx) { return 0.0; };
        s.dh_dx = zero_real;
        s.dh_dt = zero_real;
    }
}

std::string format_params(cplx lambda, double p)
{
    char buf[128];
    if (lambda.imag() == 0.0)
        std::snprintf(buf, sizeof buf, "%g,%g", lambda.real(), p);
    else
        std::snprintf(buf, sizeof buf, "%g%+gi,%g", lambda.real(), lambda.imag(), p);
    return buf;
}

} // namespace

NonlinearitySpec NonlinearitySpec::power(cplx lambda, double p)
{
    if (!(p > 1.0))
        throw Error(ErrorCode::Configuration, "power nonlinearity needs p > 1", "Assumption A (F is C^1 in the real sense)");
    NonlinearitySpec s;
    s.name = "power(" + format_params(lambda, p) + ")";
    if (lambda == cplx{}) {
        s = zero();
        s.name = "power(0," + std::to_string(p) + ")";
        return s;
    }
    s.F = [=](double, double, cplx z) {
        const double r = std::abs(z);
        return r == 0.0 ? cplx{} : lambda * std::pow(r, p - 1.0) * z;
    };
    s.dFdz = [=](double, double, cplx z) {
        const double r = std::abs(z);
        return r == 0.0 ? cplx{} : lambda * (0.5 * (p + 1.0)) * std::pow(r, p - 1.0);
    };
    s.dFdzbar = [=](double, double, cplx z) {
        const double r = std::abs(z);
        return r == 0.0 ? cplx{} : lambda * (0.5 * (p - 1.0)) * std::pow(r, p - 3.0) * z * z;
    };
    if (lambda.imag() == 0.0) {
        const double lr = lambda.real();
        s.h = [=](double, double, cplx z) { return lr * std::pow(std::abs(z), p + 1.0) / (p + 1.0); };
    }
    set_autonomous_partials(s);
    return s;
}

NonlinearitySpec NonlinearitySpec::saturating(cplx lambda, double p, double sat)
{
    if (!(p > 1.0))
        throw Error(ErrorCode::Configuration, "saturating nonlinearity needs p > 1", "Assumption A (F is C^1 in the real sense)");
    if (!(sat >= 0.0))
        throw Error(ErrorCode::Configuration, "saturation parameter s must be nonnegative");
    NonlinearitySpec s;
    s.name = "saturating(" + format_params(lambda, p) + "," + std::to_string(sat) + ")";
    s.F = [=](double, double, cplx z) {
        const double r = std::abs(z);
        if (r == 0.0)
            return cplx{};
        const double w = std::pow(r, p - 1.0);
        return lambda * w / (1.0 + sat * w) * z;
    };
    s.dFdz = [=](double, double, cplx z) {
        const double r = std::abs(z);
        if (r == 0.0)
            return cplx{};
        const double w = std::pow(r, p - 1.0);
        const double d = 1.0 + sat * w;
        return lambda * (w / d + 0.5 * (p - 1.0) * w / (d * d));
    };
    s.dFdzbar = [=](double, double, cplx z) {
        const double r = std::abs(z);
        if (r == 0.0)
            return cplx{};
        const double w = std::pow(r, p - 1.0);
        const double d = 1.0 + sat * w;
        return lambda * (0.5 * (p - 1.0)) * std::pow(r, p - 3.0) * z * z / (d * d);
    };
    if (lambda.imag() == 0.0) {
        const double lr = lambda.real();
        // h = (lambda/2) int_0^{|z|^2} w(s)/(1 + sat w(s)) ds, w(s) = s^{(p-1)/2}; substitute s = |z|^2 u^2.
        s.h = [=](double, double, cplx z) {
            const double sigma = std::norm(z);
            if (sigma == 0.0)
                return 0.0;
            auto integrand = [&](double u) {
                const double w = std::pow(sigma * u * u, 0.5 * (p - 1.0));
                return 2.0 * u * w / (1.0 + sat * w);
            };
            const double I = boost::math::quadrature::gauss<double, 60>::integrate(integrand, 0.0, 1.0);
            return 0.5 * lr * sigma * I;
        };
    }
    set_autonomous_partials(s);
    return s;
}

std::vector<std::string> nonlinearity_presets() { return {"zero", "power(lambda,p)", "saturating(lambda,p,s)"}; }

cplx wirtinger_apply(const NonlinearitySpec& spec, double x, double t, cplx z, cplx v)
{
    return spec.wirtinger_z(x, t, z) * v + spec.wirtinger_zbar(x, t, z) * std::conj(v);
}

SampleSet SampleSet::lattice(double x_max, double t_max, double R, int nx, int nt, int nr, int ntheta)
{
    SampleSet s;
    for (int i = 0; i < nx; ++i)
        s.xs.push_back(nx == 1 ? 0.0 : x_max * i / (nx - 1));
    for (int i = 0; i < nt; ++i)
        s.ts.push_back(nt == 1 ? 0.0 : t_max * i / (nt - 1));
    s.zs.push_back(0.0);
    for (int k = 1; k <= nr; ++k)
        for (int a = 0; a < ntheta; ++a)
            s.zs.push_back(std::polar(R * k / nr, 2.0 * std::numbers::pi * (a + 0.25) / ntheta));
    return s;
}

SampleSet SampleSet::radial(double x_max, double t_max, double r_min, double r_max, int nr, int ntheta)
{
    SampleSet s = lattice(x_max, t_max, 1.0, 3, 3, 1, 1);
    s.zs.clear();
    for (int k = 0; k < nr; ++k) {
        const double r = r_min * std::pow(r_max / r_min, static_cast<double>(k) / (nr - 1));
        for (int a = 0; a < ntheta; ++a)
            s.zs.push_back(std::polar(r, 2.0 * std::numbers::pi * (a + 0.25) / ntheta));
    }
    return s;
}

namespace {

template <class Fn>
void for_each_sample(const SampleSet& s, Fn&& fn)
{
    for (double x : s.xs)
        for (double t : s.ts)
            for (cplx z : s.zs)
                fn(x, t, z);
}

} // namespace

CheckReport check_sign_condition(const NonlinearitySpec& spec, const SampleSet& samples)
{
    CheckReport rep;
    for_each_sample(samples, [&](double x, double t, cplx z) {
        const cplx f = spec.eval(x, t, z);
        const double v = std::abs((std::conj(z) * f).imag());
        rep.max_error = std::max(rep.max_error, v);
        if (!(v <= 1e-12 * (1.0 + std::abs(z) * std::abs(f))))
            rep.pass = false;
        ++rep.samples;
    });
    return rep;
}

CheckReport check_hamiltonian_structure(const NonlinearitySpec& spec, const SampleSet& samples)
{
    CheckReport rep;
    if (!spec.h) {
        rep.applicable = false;
        rep.pass = false;
        return rep;
    }
    const RealFn& h = *spec.h;
    for_each_sample(samples, [&](double x, double t, cplx z) {
        const double step = 1e-5 * (1.0 + std::abs(z));
        const double ha = (h(x, t, z + step) - h(x, t, z - step)) / (2.0 * step);
        const double hb = (h(x, t, z + cplx(0, step)) - h(x, t, z - cplx(0, step))) / (2.0 * step);
        const cplx two_dzbar_h(ha, hb);  // 2 * (1/2)(d_a + i d_b) h
        const cplx f = spec.eval(x, t, z);
        const double err = std::abs(f - two_dzbar_h) / std::max(std::abs(f), 1e-12);
        const double rel = std::abs(f) == 0.0 && std::abs(two_dzbar_h) < 1e-12 ? 0.0 : err;
        rep.max_error = std::max(rep.max_error, rel);
        if (!(rel <= 1e-6))
            rep.pass = false;
        ++rep.samples;
    });
    return rep;
}

CheckReport check_wirtinger_consistency(const NonlinearitySpec& spec, const SampleSet& samples, double tol)
{
    CheckReport rep;
    for_each_sample(samples, [&](double x, double t, cplx z) {
        const double step = real_step(std::abs(z));
        const cplx a = spec.wirtinger_z(x, t, z);
        const cplx b = spec.wirtinger_zbar(x, t, z);
        const cplx fa = fd_wirtinger_z(spec.F, x, t, z, step);
        const cplx fb = fd_wirtinger_zbar(spec.F, x, t, z, step);
        const double scale = std::max(std::abs(a) + std::abs(b), 1e-12);
        const double err = (std::abs(a - fa) + std::abs(b - fb)) / scale;
        // at z = 0 the derivative of |z|^{p-1} z is only Holder for p < 3, so compare absolutely there
        const double rel = z == cplx{} ? std::abs(a - fa) + std::abs(b - fb) : err;
        rep.max_error = std::max(rep.max_error, rel);
        if (!(rel <= tol))
            rep.pass = false;
        ++rep.samples;
    });
    return rep;
}

AssumptionAProbe probe_assumption_a(const NonlinearitySpec& spec, double R, double t0, double t1,
                                    std::span<const double> x_samples, int n_radii, int n_angles, int n_times)
{
    if (!(R > 0.0))
        throw Error(ErrorCode::InvalidArgument, "probe radius R must be positive");
    AssumptionAProbe out;
    auto track = [&](double& slot, double v) {
        if (!std::isfinite(v))
            out.finite = false;
        else
            slot = std::max(slot, v);
    };
    for (int it = 0; it < n_times; ++it) {
        const double t = n_times == 1 ? t0 : t0 + (t1 - t0) * it / (n_times - 1);
        for (double x : x_samples) {
            track(out.F_at_zero, std::abs(spec.eval(x, t, 0.0)));
            for (int k = 1; k <= n_radii; ++k) {
                for (int a = 0; a < n_angles; ++a) {
                    const cplx z = std::polar(R * k / n_radii, 2.0 * std::numbers::pi * (a + 0.25) / n_angles);
                    track(out.derivative_bound,
                          std::abs(spec.wirtinger_z(x, t, z)) + std::abs(spec.wirtinger_zbar(x, t, z)));
                    track(out.x_derivative_ratio, std::abs(spec.partial_x(x, t, z)) / std::abs(z));
                }
            }
        }
        for (int k = 1; k <= n_radii; ++k)
            for (int a = 0; a < n_angles; ++a) {
                const cplx z = std::polar(R * k / n_radii, 2.0 * std::numbers::pi * (a + 0.25) / n_angles);
                track(out.t_derivative_at_boundary, std::abs(spec.partial_t(0.0, t, z)));
            }
    }
    return out;
}

namespace {

struct RatioBook {
    std::vector<std::pair<double, double>> entries;  // (|z|, ratio)

    void add(double r, double ratio) { entries.emplace_back(r, ratio); }

    GrowthBound finish() const
    {
        GrowthBound b;
        double r_lo = std::numeric_limits<double>::infinity(), r_hi = 0.0;
        for (auto [r, q] : entries) {
            if (!std::isfinite(q)) {
                b.bounded = false;
                continue;
            }
            b.C = std::max(b.C, q);
            r_lo = std::min(r_lo, r);
            r_hi = std::max(r_hi, r);
        }
        auto band_max = [&](double lo, double hi, bool& any) {
            double m = 0.0;
            any = false;
            for (auto [r, q] : entries)
                if (r >= lo && r <= hi && std::isfinite(q)) {
                    m = std::max(m, q);
                    any = true;
                }
            return m;
        };
        bool a1 = false, a2 = false;
        const double top = band_max(r_hi / 2.0, r_hi, a1);
        const double inner_top = band_max(0.0, r_hi / 10.0, a2);
        if (a1 && a2 && top > 1.5 * inner_top + 1e-12)
            b.bounded = false;
        const double bottom = band_max(r_lo, 2.0 * r_lo, a1);
        const double inner_bottom = band_max(10.0 * r_lo, r_hi, a2);
        if (a1 && a2 && bottom > 1.5 * inner_bottom + 1e-12)
            b.bounded = false;
        return b;
    }
};

} // namespace

GrowthReport check_growth_hypotheses(const NonlinearitySpec& spec, double p, const SampleSet& samples)
{
    GrowthReport rep;
    if (!spec.h || (!spec.autonomous && (!spec.dh_dx || !spec.dh_dt))) {
        rep.applicable = false;
        return rep;
    }
    const RealFn zero_real = [](double, double, cplx) { return 0.0; };
    const RealFn& hx = spec.dh_dx ? *spec.dh_dx : zero_real;
    const RealFn& ht = spec.dh_dt ? *spec.dh_dt : zero_real;
    RatioBook space, time, lower;
    for_each_sample(samples, [&](double x, double t, cplx z) {
        const double r = std::abs(z);
        if (r == 0.0)
            return;
        const double r2 = r * r;
        const double mixed = r2 + std::pow(r, p + 1.0);
        space.add(r, std::max(0.0, hx(x, t, z)) / r2);
        time.add(r, std::max(0.0, ht(x, t, z)) / mixed);
        lower.add(r, std::max(0.0, -(*spec.h)(x, t, z)) / mixed);
    });
    rep.space = space.finish();
    rep.time = time.finish();
    rep.lower = lower.finish();
    return rep;
}

} // namespace halfline
