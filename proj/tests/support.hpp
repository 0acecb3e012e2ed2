#pragma once

#include "halfline/field.hpp"

#include <cmath>
#include <random>

namespace testsupport {

using halfline::cplx;

inline cplx random_cplx(std::mt19937_64& rng, double scale = 1.0)
{
    std::normal_distribution<double> n(0.0, scale);
    return {n(rng), n(rng)};
}

inline double uniform(std::mt19937_64& rng, double a, double b)
{
    return std::uniform_real_distribution<double>(a, b)(rng);
}

/// Gaussian bump e^{-(x-x0)^2/(2w^2)} e^{ikx} with smooth corrections near both ends, zero at 0 and L.
inline halfline::ComplexField bump(const halfline::Grid& g, double x0, double w, double k, cplx A = 1.0)
{
    const double L = g.length();
    auto G = [=](double x) { return A * std::exp(-0.5 * (x - x0) * (x - x0) / (w * w)) * std::exp(cplx(0.0, k * x)); };
    auto u = halfline::ComplexField::sample(
        g, [&](double x) { return G(x) - G(0.0) * std::exp(-x * x) - G(L) * std::exp(-(L - x) * (L - x)); });
    u[0] = 0.0;
    u[g.size() - 1] = 0.0;
    return u;
}

inline double order(double coarse, double fine) { return std::log2(coarse / fine); }

} // namespace testsupport
