#include "halfline/inequalities.hpp"

#include "halfline/error.hpp"

#include <algorithm>
#include <cmath>

namespace halfline {

GNParameters gn_parameters(double p)
{
    if (!(p >= 1.0 && p < 5.0))
        throw Error(ErrorCode::InvalidArgument, "Gagliardo-Nirenberg exponent p must satisfy 1 <= p < 5");
    return {p, 0.5 - 1.0 / (p + 1.0), 1.0 + 2.0 * (p - 1.0) / (5.0 - p), (5.0 - p) / 4.0};
}

double gn_identity_defect(const GNParameters& g)
{
    return std::max(std::abs(2.0 * (1.0 - g.k) - g.a * (g.p + 1.0)),
                    std::abs(2.0 * g.nu * g.k - (1.0 - g.a) * (g.p + 1.0)));
}

double lp_power(const ComplexField& u, double q)
{
    RealField w(u.grid());
    for (int j = 0; j < u.size(); ++j)
        w[j] = std::pow(std::abs(u[j]), q);
    return integrate(w);
}

GNSample gn_sample(const ComplexField& u, double p)
{
    const GNParameters g = gn_parameters(p);
    GNSample s;
    s.lhs = lp_power(u, p + 1.0);
    const double dx = l2_norm(derivative(u));
    const double l2 = l2_norm(u);
    s.factor = std::pow(dx, g.a * (p + 1.0)) * std::pow(l2, (p + 1.0) * (1.0 - g.a));
    s.ratio = s.factor > 0.0 ? s.lhs / s.factor : 0.0;
    return s;
}

GNCheck check_gn(const ComplexField& u, double p, double C)
{
    const GNSample s = gn_sample(u, p);
    GNCheck c{s.lhs, C * s.factor, true};
    c.holds = c.lhs <= c.rhs;
    return c;
}

double calibrate_gn_constant(std::span<const ComplexField> samples, double p, double safety)
{
    double worst = 0.0;
    for (const auto& u : samples)
        worst = std::max(worst, gn_sample(u, p).ratio);
    return worst * safety;
}

YoungCheck check_young_split(const ComplexField& u, double p, double eps, double C)
{
    if (!(eps > 0.0))
        throw Error(ErrorCode::InvalidArgument, "Young split needs eps > 0");
    const GNParameters g = gn_parameters(p);
    const double dx = l2_norm(derivative(u));
    const double l2 = l2_norm(u);
    YoungCheck y;
    y.lhs = lp_power(u, p + 1.0);
    y.rhs = C * eps * dx * dx + C * std::pow(eps, -(g.nu - 1.0) / 2.0) * std::pow(l2, 2.0 * g.nu);
    y.holds = y.lhs <= y.rhs;
    return y;
}

std::pair<double, double> young_scalar(double a, double b, double k, double eps)
{
    if (!(k > 0.0 && k <= 1.0) || !(eps > 0.0) || a < 0.0 || b < 0.0)
        throw Error(ErrorCode::InvalidArgument, "scalar Young inequality needs a, b >= 0, 0 < k <= 1, eps > 0");
    return {std::pow(a, 1.0 - k) * std::pow(b, k), eps * a + std::pow(eps, -(1.0 / k - 1.0)) * b};
}

ComplexField random_smooth_field(const Grid& grid, std::mt19937_64& rng, const SmoothFieldOptions& opt)
{
    const double L = grid.length();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    struct Bump {
        double x0, w, k, chirp;
        cplx c;
    };
    std::vector<Bump> bumps;
    for (int b = 0; b < opt.bumps; ++b) {
        Bump bp;
        bp.x0 = L * (0.1 + 0.8 * unit(rng));
        bp.w = std::min(opt.min_width + (opt.max_width - opt.min_width) * unit(rng), L / 6.0);
        bp.k = 4.0 * (unit(rng) - 0.5);
        bp.chirp = 0.5 * (unit(rng) - 0.5);
        bp.c = std::polar(std::exp(2.0 * (unit(rng) - 0.5)), 2.0 * M_PI * unit(rng));
        bumps.push_back(bp);
    }
    auto eval = [&](double x) {
        cplx s = 0.0;
        for (const auto& b : bumps) {
            const double d = (x - b.x0) / b.w;
            s += b.c * std::exp(-0.5 * d * d) * std::exp(cplx(0.0, b.k * x + b.chirp * x * x));
        }
        return s;
    };
    ComplexField u = ComplexField::sample(grid, eval);
    // Smooth endpoint corrections keep the field inside the form domain.
    const double s0 = std::min(1.0, L / 8.0);
    const cplx u0 = u[0], uL = u[u.size() - 1];
    for (int j = 0; j < u.size(); ++j) {
        const double x = grid.x(j);
        if (opt.vanish_at_zero)
            u[j] -= u0 * std::exp(-(x / s0) * (x / s0));
        if (opt.vanish_at_L)
            u[j] -= uL * std::exp(-((L - x) / s0) * ((L - x) / s0));
    }
    if (opt.vanish_at_zero)
        u[0] = 0.0;
    if (opt.vanish_at_L)
        u[u.size() - 1] = 0.0;
    return u;
}

std::vector<ComplexField> random_smooth_fields(const Grid& grid, int count, std::uint64_t seed,
                                               const SmoothFieldOptions& options)
{
    std::mt19937_64 rng(seed);
    std::vector<ComplexField> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i)
        out.push_back(random_smooth_field(grid, rng, options));
    return out;
}

} // namespace halfline
