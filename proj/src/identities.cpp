#include "halfline/identities.hpp"

#include "halfline/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace halfline {

namespace {

const cplx I(0.0, 1.0);
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

double max_finite(const std::vector<double>& v, bool applicable)
{
    if (!applicable)
        return nan;
    double m = 0.0;
    for (double x : v)
        if (!std::isnan(x))
            m = std::max(m, x);
    return m;
}

} // namespace

cplx boundary_flux(const ComplexField& u)
{
    const double h = u.grid().spacing();
    return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
}

std::optional<double> hamiltonian_W(const ComplexField& u, const RealField& V, const NonlinearitySpec& F, double t)
{
    if (!F.is_zero() && !F.h)
        return std::nullopt;
    const Grid& g = u.grid();
    const double h = g.spacing();
    double kinetic = 0.0;
    for (int j = 0; j + 1 < u.size(); ++j)
        kinetic += std::norm(u[j + 1] - u[j]);
    kinetic *= 0.5 / h;
    RealField density(g);
    for (int j = 0; j < u.size(); ++j) {
        density[j] = 0.5 * V[j] * std::norm(u[j]);
        if (!F.is_zero())
            density[j] += (*F.h)(g.x(j), t, u[j]);
    }
    return kinetic + integrate(density);
}

cplx momentum_pairing(const ComplexField& u)
{
    const ComplexField ux = derivative(u);
    ComplexField p(u.grid());
    for (int j = 0; j < u.size(); ++j)
        p[j] = u[j] * std::conj(ux[j]);
    return integrate(p);
}

namespace {

double minus_two_re_Vu_ux(const ComplexField& u, const RealField& V, const ComplexField& ux)
{
    RealField w(u.grid());
    for (int j = 0; j < u.size(); ++j)
        w[j] = V[j] * std::real(u[j] * std::conj(ux[j]));
    return -2.0 * integrate(w);
}

double potential_derivative_form(const ComplexField& u, const RealField& V, const RealField& dV)
{
    RealField w(u.grid());
    for (int j = 0; j < u.size(); ++j)
        w[j] = dV[j] * std::norm(u[j]);
    return V[0] * std::norm(u[0]) + integrate(w);
}

} // namespace

std::pair<double, double> potential_term_check(const ComplexField& u, const PotentialSpec& potential)
{
    const RealField V = potential.total();
    const RealField dV = potential.derivative_or_estimate();
    return {minus_two_re_Vu_ux(u, V, derivative(u)), potential_derivative_form(u, V, dV)};
}

namespace {

template <class T>
std::vector<T> differentiate(const std::vector<T>& y, double dt)
{
    const std::size_t n = y.size();
    std::vector<T> d(n, T{});
    if (n < 2)
        return d;
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / dt;
        return d;
    }
    for (std::size_t k = 1; k + 1 < n; ++k)
        d[k] = (y[k + 1] - y[k - 1]) / (2.0 * dt);
    d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dt);
    return d;
}

} // namespace

std::vector<double> time_derivative(const std::vector<double>& y, double dt) { return differentiate(y, dt); }
std::vector<cplx> time_derivative(const std::vector<cplx>& y, double dt) { return differentiate(y, dt); }

IdentityReport identity_residuals(const Trajectory& traj, const PotentialSpec& potential,
                                  const NonlinearitySpec& nl, const BoundaryForce& force,
                                  const IdentityOptions& options)
{
    IdentityReport rep;
    const std::size_t n = traj.times.size();
    rep.times = traj.times;
    if (n == 0)
        return rep;
    const double dt = n > 1 ? traj.times[1] - traj.times[0] : 1.0;
    for (std::size_t k = 1; k < n; ++k)
        if (std::abs(traj.times[k] - traj.times[k - 1] - dt) > 1e-9 * dt)
            throw Error(ErrorCode::InvalidArgument, "identity residuals need uniformly spaced output times");

    const bool zero_nl = nl.is_zero();
    rep.energy_applicable = zero_nl || nl.h.has_value();
    rep.momentum_applicable = rep.energy_applicable;
    const bool forced = !force.identically_zero;
    if (rep.energy_applicable && !zero_nl && !nl.autonomous) {
        if (!nl.dh_dt)
            throw Error(ErrorCode::Configuration, "energy identity needs dh/dt for a time-dependent density",
                        "Hamiltonian structure: dh/dt callback missing");
        if (!nl.dh_dx)
            throw Error(ErrorCode::Configuration, "momentum identity needs dh/dx for an x-dependent density",
                        "Hamiltonian structure: dh/dx callback missing");
    }
    if (options.use_potential_derivative && !potential.dV)
        throw Error(ErrorCode::Configuration, "potential derivative requested but dV is not supplied",
                    "V differentiable with known V'");

    const Grid& g = potential.grid();
    const RealField V = potential.total();
    std::vector<cplx> f(n), df(n);
    for (std::size_t k = 0; k < n; ++k) {
        f[k] = forced ? force.f(traj.times[k]) : cplx{};
        df[k] = forced ? force.df(traj.times[k]) : cplx{};
    }

    std::vector<double> ht_int(n, 0.0), hx_int(n, 0.0), h0(n, 0.0), pot_term(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const ComplexField& u = traj.fields[k];
        const double t = traj.times[k];
        const ComplexField ux = derivative(u);
        rep.P.push_back(boundary_flux(u));
        rep.mass.push_back(integrate_abs2(u));
        rep.momentum_pairing.push_back(momentum_pairing(u));
        rep.W.push_back(rep.energy_applicable ? *hamiltonian_W(u, V, nl, t) : nan);
        if (options.use_potential_derivative)
            pot_term[k] = V[0] * std::norm(f[k]) + [&] {
                RealField w(g);
                for (int j = 0; j < u.size(); ++j)
                    w[j] = (*potential.dV)[j] * std::norm(u[j]);
                return integrate(w);
            }();
        else
            pot_term[k] = minus_two_re_Vu_ux(u, V, ux);
        if (rep.energy_applicable && !zero_nl) {
            h0[k] = (*nl.h)(0.0, t, f[k]);
            if (!nl.autonomous) {
                RealField wt(g), wx(g);
                for (int j = 0; j < u.size(); ++j) {
                    wt[j] = (*nl.dh_dt)(g.x(j), t, u[j]);
                    wx[j] = (*nl.dh_dx)(g.x(j), t, u[j]);
                }
                ht_int[k] = integrate(wt);
                hx_int[k] = integrate(wx);
            }
        }
    }

    const std::vector<double> dmass = time_derivative(rep.mass, dt);
    const std::vector<double> dW = time_derivative(rep.W, dt);
    const std::vector<cplx> dpair = time_derivative(rep.momentum_pairing, dt);
    double acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const cplx P = rep.P[k];
        const double mass_rhs = 2.0 * std::imag(P * std::conj(f[k]));
        rep.residual_mass.push_back(std::abs(dmass[k] - mass_rhs));
        if (k > 0)
            acc += 0.5 * dt * (2.0 * std::imag(rep.P[k - 1] * std::conj(f[k - 1])) + mass_rhs);
        rep.integrated_mass_defect.push_back(std::abs(rep.mass[k] - rep.mass[0] - acc));
        if (rep.energy_applicable) {
            const double energy_rhs = -std::real(df[k] * std::conj(P)) + ht_int[k];
            rep.residual_energy.push_back(std::abs(dW[k] - energy_rhs));
            const cplx mom_rhs = -I * std::norm(P) + 2.0 * I * h0[k] - f[k] * std::conj(df[k]) + I * pot_term[k] +
                                 2.0 * I * hx_int[k];
            rep.residual_momentum.push_back(std::abs(dpair[k] - mom_rhs));
        } else {
            rep.residual_energy.push_back(nan);
            rep.residual_momentum.push_back(nan);
        }
    }
    return rep;
}

double IdentityReport::max_residual_mass() const { return max_finite(residual_mass, true); }
double IdentityReport::max_residual_energy() const { return max_finite(residual_energy, energy_applicable); }
double IdentityReport::max_residual_momentum() const { return max_finite(residual_momentum, momentum_applicable); }
double IdentityReport::max_integrated_mass_defect() const { return max_finite(integrated_mass_defect, true); }

const std::vector<std::string>& identity_csv_columns()
{
    static const std::vector<std::string> cols{"time",          "mass",          "W",
                                               "re_P",          "im_P",          "re_pairing",
                                               "im_pairing",    "residual_mass", "residual_energy",
                                               "residual_momentum", "integrated_mass_defect"};
    return cols;
}

namespace {

void put(std::string& out, double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out += buf;
}

} // namespace

std::string identity_csv(const IdentityReport& r)
{
    std::string out;
    const auto& cols = identity_csv_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out += cols[c];
        out += c + 1 < cols.size() ? ',' : '\n';
    }
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double row[] = {r.times[k],
                              r.mass[k],
                              r.W[k],
                              r.P[k].real(),
                              r.P[k].imag(),
                              r.momentum_pairing[k].real(),
                              r.momentum_pairing[k].imag(),
                              r.residual_mass[k],
                              r.residual_energy[k],
                              r.residual_momentum[k],
                              r.integrated_mass_defect[k]};
        for (std::size_t c = 0; c < std::size(row); ++c) {
            put(out, row[c]);
            out += c + 1 < std::size(row) ? ',' : '\n';
        }
    }
    return out;
}

IdentityReport parse_identity_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::Parse, "identity CSV is empty");
    std::string expected;
    for (const auto& c : identity_csv_columns())
        expected += (expected.empty() ? "" : ",") + c;
    if (line != expected)
        throw Error(ErrorCode::Parse, "identity CSV header does not match");
    IdentityReport r;
    const std::size_t ncol = identity_csv_columns().size();
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<double> v;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            const double x = std::strtod(p, &end);
            if (end == p)
                throw Error(ErrorCode::Parse, "identity CSV: bad number on line " + std::to_string(lineno));
            v.push_back(x);
            if (*end == ',')
                p = end + 1;
            else if (*end == '\0' || *end == '\r')
                break;
            else
                throw Error(ErrorCode::Parse, "identity CSV: bad separator on line " + std::to_string(lineno));
        }
        if (v.size() != ncol)
            throw Error(ErrorCode::Parse, "identity CSV: wrong column count on line " + std::to_string(lineno));
        r.times.push_back(v[0]);
        r.mass.push_back(v[1]);
        r.W.push_back(v[2]);
        r.P.emplace_back(v[3], v[4]);
        r.momentum_pairing.emplace_back(v[5], v[6]);
        r.residual_mass.push_back(v[7]);
        r.residual_energy.push_back(v[8]);
        r.residual_momentum.push_back(v[9]);
        r.integrated_mass_defect.push_back(v[10]);
    }
    const auto all_nan = [](const std::vector<double>& x) {
        return !x.empty() && std::all_of(x.begin(), x.end(), [](double y) { return std::isnan(y); });
    };
    r.energy_applicable = !all_nan(r.W);
    r.momentum_applicable = !all_nan(r.residual_momentum);
    return r;
}

} // namespace halfline
