#include "halfline/potential.hpp"

#include "halfline/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace halfline {

PotentialSpec::PotentialSpec(std::string n, RealField v1, RealField v2)
    : name(std::move(n)), V1(std::move(v1)), V2(std::move(v2))
{
    if (!(V1.grid() == V2.grid()))
        throw Error(ErrorCode::InvalidArgument, "V1 and V2 must live on the same grid");
    if (!V1.all_finite() || !V2.all_finite())
        throw Error(ErrorCode::Configuration, "potential samples must be finite", "potential decomposition V = V1 + V2");
    for (const double v : V1.values())
        if (v < 0.0)
            throw Error(ErrorCode::Configuration, "V1 must be nonnegative at every node",
                        "potential decomposition V = V1 + V2 with V1 >= 0");
}

RealField PotentialSpec::total() const { return V1 + V2; }

RealField PotentialSpec::derivative_or_estimate() const
{
    if (dV)
        return *dV;
    return derivative(total());
}

namespace {

void set_smooth(PotentialSpec& spec)
{
    spec.delta_reg = spec.grid().length();
}

} // namespace

std::vector<std::string> potential_presets()
{
    return {"zero", "harmonic", "exp", "coulomb_like", "well", "constant"};
}

PotentialSpec make_potential(const Grid& grid, const std::string& preset, const PotentialParams& p)
{
    const RealField zero(grid);
    const double h = grid.spacing();

    if (preset == "zero") {
        PotentialSpec spec("zero", zero, zero);
        set_smooth(spec);
        spec.dV = zero;
        spec.dV_split = DerivativeSplit{0.0, zero};
        return spec;
    }
    if (preset == "harmonic") {
        const double w2 = p.omega * p.omega;
        PotentialSpec spec("harmonic", RealField::sample(grid, [w2](double x) { return w2 * x * x; }), zero);
        set_smooth(spec);
        spec.dV = RealField::sample(grid, [w2](double x) { return 2.0 * w2 * x; });
        // 2 w^2 x <= w^2 x^2 + w^2
        spec.dV_split = DerivativeSplit{1.0, RealField::sample(grid, [w2](double) { return w2; })};
        return spec;
    }
    if (preset == "exp") {
        PotentialSpec spec("exp", RealField::sample(grid, [](double x) { return std::exp(x); }), zero);
        set_smooth(spec);
        spec.dV = spec.V1;
        spec.dV_split = DerivativeSplit{1.0, zero};
        return spec;
    }
    if (preset == "coulomb_like") {
        const double Z = p.Z;
        PotentialSpec spec("coulomb_like", zero,
                           RealField::sample(grid, [Z, h](double x) { return -Z / std::max(x, h); }));
        spec.dV = RealField::sample(grid, [Z, h](double x) { return x > h ? Z / (x * x) : 0.0; });
        spec.dV_split = DerivativeSplit{0.0, *spec.dV};
        spec.notes.push_back("singularity -Z/x clipped at the first interior node x = h");
        return spec;
    }
    if (preset == "well") {
        if (!(p.a >= 0.0 && p.b > p.a))
            throw Error(ErrorCode::InvalidArgument, "well needs 0 <= a < b");
        const double a = p.a, b = p.b, depth = p.depth;
        PotentialSpec spec("well", zero, RealField::sample(grid, [=](double x) {
                               return (x >= a && x <= b) ? -depth : 0.0;
                           }));
        if (a > 0.0)
            spec.delta_reg = a;
        spec.dV = zero;
        spec.dV_split = DerivativeSplit{0.0, zero};
        spec.notes.push_back("jumps of the well at x = a and x = b are not captured by dV");
        return spec;
    }
    if (preset == "constant") {
        const double c = p.c;
        PotentialSpec spec("constant", zero, RealField::sample(grid, [c](double) { return c; }));
        set_smooth(spec);
        spec.dV = zero;
        spec.dV_split = DerivativeSplit{0.0, zero};
        return spec;
    }
    throw Error(ErrorCode::Configuration, "unknown potential preset '" + preset + "'");
}

PotentialSpec potential_from_samples(const Grid& grid, std::span<const double> xs, std::span<const double> v1,
                                     std::span<const double> v2)
{
    if (xs.size() < 2 || xs.size() != v1.size() || xs.size() != v2.size())
        throw Error(ErrorCode::InvalidArgument, "potential samples need matching x, V1, V2 columns of length >= 2");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw Error(ErrorCode::InvalidArgument, "potential sample abscissae must be increasing");
    auto interp = [&](std::span<const double> ys) {
        return RealField::sample(grid, [&](double x) {
            if (x <= xs.front())
                return ys.front();
            if (x >= xs.back())
                return ys.back();
            const auto it = std::upper_bound(xs.begin(), xs.end(), x);
            const std::size_t i = static_cast<std::size_t>(it - xs.begin());
            const double s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
            return (1.0 - s) * ys[i - 1] + s * ys[i];
        });
    };
    PotentialSpec spec("samples", interp(v1), interp(v2));
    spec.notes.push_back("potential interpolated linearly from samples; dV estimated by centred differences");
    return spec;
}

double local_l1_sup(const RealField& W, double window)
{
    const Grid& g = W.grid();
    if (!(window > 0.0))
        throw Error(ErrorCode::InvalidArgument, "window must be positive");
    if (window > g.length())
        throw Error(ErrorCode::DomainTooShort, "local L1 window exceeds the domain length");
    const int n = W.size();
    const double h = g.spacing();

    // prefix[j] = integral of |W| over [0, x_j]
    std::vector<double> prefix(n, 0.0);
    for (int j = 1; j < n; ++j)
        prefix[j] = prefix[j - 1] + 0.5 * h * (std::abs(W[j - 1]) + std::abs(W[j]));
    auto integral_to = [&](double x) {
        if (x >= g.length())
            return prefix[n - 1];
        const int j = std::min(static_cast<int>(x / h), n - 2);
        const double s = (x - g.x(j)) / h;
        const double a = std::abs(W[j]);
        const double b = std::abs(W[j + 1]);
        // exact integral of the linear interpolant over [x_j, x]
        return prefix[j] + h * (a * s + 0.5 * (b - a) * s * s);
    };

    double best = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x0 = g.x(j);
        const double x1 = std::min(x0 + window, g.length());
        best = std::max(best, integral_to(x1) - prefix[j]);
        if (x1 >= g.length())
            break;
    }
    return best;
}

double kato_constant(double C, double eps)
{
    if (!(eps > 0.0))
        throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (C <= 0.0)
        return 0.0;
    return C + C * C / eps;
}

double kato_constant_l2(double C, double eps)
{
    if (!(eps > 0.0))
        throw Error(ErrorCode::InvalidArgument, "eps must be positive");
    if (C <= 0.0)
        return 0.0;
    // delta = 2 eps / C in the unit-window bound, then ||phi'||^2 <= ||H0 phi||^2/2 + ||phi||^2/2
    return eps + C + C * C / (2.0 * eps);
}

namespace {

double weighted_mass(const RealField& w, const ComplexField& f)
{
    RealField a(f.grid());
    for (int j = 0; j < f.size(); ++j)
        a[j] = std::abs(w[j]) * std::norm(f[j]);
    return integrate(a);
}

ComplexField dirichlet_laplacian(const ComplexField& f)
{
    const double h2 = f.grid().spacing() * f.grid().spacing();
    ComplexField out(f.grid());
    for (int j = 1; j < f.size() - 1; ++j)
        out[j] = -(f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
    return out;
}

} // namespace

RelativeBoundReport verify_relative_bound(const PotentialSpec& spec, double eps, std::span<const ComplexField> samples,
                                          const RelativeBoundOptions& options)
{
    RelativeBoundReport rep;
    rep.eps = eps;
    rep.C = local_l1_sup(spec.V2, std::min(1.0, spec.grid().length()));
    rep.K = kato_constant(rep.C, eps);
    rep.samples = static_cast<int>(samples.size());
    rep.worst_margin = std::numeric_limits<double>::infinity();

    RealField v2sq(spec.grid());
    if (options.check_operator_bound) {
        for (int j = 0; j < v2sq.size(); ++j)
            v2sq[j] = spec.V2[j] * spec.V2[j];
        rep.operator_bound_checked = true;
        rep.C_sq = local_l1_sup(v2sq, std::min(1.0, spec.grid().length()));
        rep.K_sq = kato_constant_l2(rep.C_sq, eps);
        rep.operator_worst_margin = std::numeric_limits<double>::infinity();
    }

    for (const auto& phi : samples) {
        const double lhs = weighted_mass(spec.V2, phi);
        const double rhs = eps * integrate_abs2(derivative(phi)) + rep.K * integrate_abs2(phi);
        const double scale = std::max(rhs, std::numeric_limits<double>::min());
        const double margin = (rhs - lhs) / scale;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -options.tolerance)
            ++rep.violations;

        if (options.check_operator_bound) {
            const double lhs2 = weighted_mass(v2sq, phi);
            const double rhs2 = eps * integrate_abs2(dirichlet_laplacian(phi)) + rep.K_sq * integrate_abs2(phi);
            const double m2 = (rhs2 - lhs2) / std::max(rhs2, std::numeric_limits<double>::min());
            rep.operator_worst_margin = std::min(rep.operator_worst_margin, m2);
            if (m2 < -options.tolerance)
                ++rep.operator_violations;
        }
    }
    if (samples.empty()) {
        rep.worst_margin = 0.0;
        rep.operator_worst_margin = 0.0;
    }
    rep.pass = rep.violations == 0 && rep.operator_violations == 0;
    return rep;
}

DerivativeSplitReport verify_derivative_split(const PotentialSpec& spec)
{
    if (!spec.dV || !spec.dV_split)
        throw Error(ErrorCode::Configuration, "derivative split needs dV and (C, Q)",
                    "derivative bound (V')_+ <= C V1 + Q");
    const RealField& dV = *spec.dV;
    const auto& split = *spec.dV_split;
    DerivativeSplitReport rep;
    RealField negative(spec.grid());
    for (int j = 0; j < dV.size(); ++j) {
        const double pos = std::max(0.0, dV[j]);
        const double bound = split.C * spec.V1[j] + split.Q[j];
        const double excess = pos - bound;
        if (excess > 1e-12 * (1.0 + std::abs(bound)))
            rep.holds = false;
        rep.max_violation = std::max(rep.max_violation, excess);
        negative[j] = std::max(0.0, -dV[j]);
    }
    const double window = std::min(1.0, spec.grid().length());
    rep.Q_local_l1 = local_l1_sup(split.Q, window);
    rep.negative_part_local_l1 = local_l1_sup(negative, window);
    return rep;
}

} // namespace halfline
