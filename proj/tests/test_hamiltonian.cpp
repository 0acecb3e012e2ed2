#include "halfline/error.hpp"
#include "halfline/hamiltonian.hpp"

#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace halfline;

namespace {

// Composite Simpson rule for a complex integrand.
template <class Fn>
cplx simpson(Fn&& f, double a, double b, int n = 2000)
{
    const double h = (b - a) / n;
    cplx s = f(a) + f(b);
    for (int k = 1; k < n; ++k)
        s += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
    return s * h / 3.0;
}

} // namespace

TEST_CASE("free Dirichlet spectrum matches the closed form")
{
    const double L = 3.0;
    const Grid g(L, 60);
    const Hamiltonian H(g, RealField(g));
    const double h = g.spacing();
    std::vector<double> expect;
    for (int k = 1; k <= g.interior(); ++k) {
        const double s = std::sin(k * M_PI * h / (2.0 * L));
        expect.push_back(4.0 / (h * h) * s * s);
    }
    std::sort(expect.begin(), expect.end());
    for (int k = 0; k < g.interior(); ++k)
        CHECK(H.eigenvalues()[k] == doctest::Approx(expect[k]).epsilon(1e-11));
    CHECK(H.orthogonality_defect() < 1e-12);
}

TEST_CASE("harmonic well on the half-line keeps the odd oscillator levels")
{
    const Grid g(10.0, 1000);
    const Hamiltonian H(g, RealField::sample(g, [](double x) { return x * x; }));
    CHECK(H.eigenvalues()[0] == doctest::Approx(3.0).epsilon(0.01));
    CHECK(H.eigenvalues()[1] == doctest::Approx(7.0).epsilon(0.01));
    CHECK(H.eigenvalues()[2] == doctest::Approx(11.0).epsilon(0.01));
}

TEST_CASE("eigenmodes are normalised and satisfy H phi = lambda phi")
{
    const Grid g(4.0, 80);
    const Hamiltonian H(g, RealField::sample(g, [](double x) { return std::cos(x) + 1.0; }));
    for (int k : {0, 3, 17}) {
        const auto phi = H.eigenmode(k);
        CHECK(phi[0] == cplx{});
        CHECK(phi[g.size() - 1] == cplx{});
        CHECK(std::sqrt(g.spacing()) * std::sqrt(std::accumulate(phi.values().begin(), phi.values().end(), 0.0,
                                                                 [](double a, cplx z) { return a + std::norm(z); })) ==
              doctest::Approx(1.0));
        const auto Hphi = H.apply(phi);
        for (int j = 1; j < g.size() - 1; ++j)
            CHECK(std::abs(Hphi[j] - H.eigenvalues()[k] * phi[j]) < 1e-9 * (1.0 + H.eigenvalues()[k]));
    }
    CHECK_THROWS_AS(H.eigenmode(-1), Error);
    CHECK_THROWS_AS(H.eigenmode(g.interior()), Error);
}

TEST_CASE("modal round trip")
{
    const Grid g(2.0, 50);
    const Hamiltonian H(g, RealField::sample(g, [](double x) { return x; }));
    std::mt19937_64 rng(2);
    ComplexField f(g);
    for (int j = 1; j < g.size() - 1; ++j)
        f[j] = testsupport::random_cplx(rng);
    const auto back = H.from_modes(H.to_modes(f));
    for (int j = 0; j < g.size(); ++j)
        CHECK(std::abs(back[j] - f[j]) < 1e-12);
    CHECK(std::sqrt(g.spacing()) * H.to_modes(f).norm() ==
          doctest::Approx(std::sqrt(g.spacing() * std::accumulate(f.values().begin(), f.values().end(), 0.0,
                                                                  [](double a, cplx z) { return a + std::norm(z); }))));
}

TEST_CASE("propagator is unitary and a group")
{
    const Grid g(6.0, 120);
    const Hamiltonian H(g, RealField::sample(g, [](double x) { return 0.5 * x * x; }));
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto f = testsupport::bump(g, testsupport::uniform(rng, 1.0, 5.0), testsupport::uniform(rng, 0.3, 1.0),
                                         testsupport::uniform(rng, -3.0, 3.0));
        const double s = testsupport::uniform(rng, 0.0, 2.0), t = testsupport::uniform(rng, 0.0, 2.0);
        const auto a = H.propagate(H.propagate(f, s), t);
        const auto b = H.propagate(f, s + t);
        double diff = 0.0;
        for (int j = 0; j < g.size(); ++j)
            diff = std::max(diff, std::abs(a[j] - b[j]));
        CHECK(diff < 1e-11);
        const double n0 = H.to_modes(f).norm(), n1 = H.to_modes(b).norm();
        CHECK(n1 == doctest::Approx(n0).epsilon(1e-12));
        const auto back = H.propagate(b, -(s + t));
        for (int j = 1; j < g.size() - 1; ++j)
            CHECK(std::abs(back[j] - f[j]) < 1e-11);
    }
    const auto phi = H.eigenmode(2);
    const auto p = H.propagate(phi, 0.7);
    const cplx phase = std::exp(cplx(0.0, -0.7 * H.eigenvalues()[2]));
    for (int j = 1; j < g.size() - 1; ++j)
        CHECK(std::abs(p[j] - phase * phi[j]) < 1e-12);
}

TEST_CASE("phi functions")
{
    for (cplx z : {cplx(1e-9, 0.0), cplx(0.0, 0.3), cplx(0.2, -0.4), cplx(0.0, 0.49), cplx(0.0, 0.51), cplx(0.0, 40.0)}) {
        // integral definitions: phi1 = int_0^1 e^{(1-s)z} ds, phi2 = int_0^1 s e^{(1-s)z} ds
        const cplx i1 = simpson([&](double s) { return std::exp((1.0 - s) * z); }, 0.0, 1.0);
        const cplx i2 = simpson([&](double s) { return s * std::exp((1.0 - s) * z); }, 0.0, 1.0);
        CHECK(std::abs(phi1(z) - i1) < 1e-10);
        CHECK(std::abs(phi2(z) - i2) < 1e-10);
    }
    CHECK(phi1(0.0) == cplx(1.0));
    CHECK(phi2(0.0) == cplx(0.5));
}

TEST_CASE("product trapezoid weights integrate linear data exactly")
{
    Eigen::VectorXd lambda(4);
    lambda << 0.0, 0.3, 12.0, 900.0;
    const double dt = 0.05;
    const ExpQuadratureWeights w(lambda, dt);
    const cplx a(1.0, -2.0), b(0.5, 3.0);
    for (int k = 0; k < 4; ++k) {
        const double l = lambda[k];
        const cplx exact =
            simpson([&](double s) { return std::exp(cplx(0.0, -(dt - s) * l)) * (a + b * s); }, 0.0, dt, 20000);
        const cplx got = w.w_left[k] * a + w.w_right[k] * (a + b * dt);
        CHECK(std::abs(got - exact) < 1e-12);
        CHECK(std::abs(w.decay[k] - std::exp(cplx(0.0, -l * dt))) < 1e-15);
    }
}

TEST_CASE("Duhamel integral of a constant source is exact")
{
    const Grid g(3.0, 40);
    const Hamiltonian H(g, RealField::sample(g, [](double x) { return x; }));
    const auto w0 = testsupport::bump(g, 1.5, 0.4, 1.0);
    std::vector<double> times;
    std::vector<ComplexField> ws;
    for (int m = 0; m <= 7; ++m) {
        times.push_back(0.2 + 0.1 * m * m / 7.0);
        ws.push_back(w0);
    }
    const double t = times.back() - times.front();
    const auto G = duhamel_G(H, times, ws);
    const auto c = H.to_modes(w0);
    ModalVector e(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double l = H.eigenvalues()[k];
        e[k] = c[k] * (l == 0.0 ? cplx(t) : (1.0 - std::exp(cplx(0.0, -l * t))) / cplx(0.0, l));
    }
    CHECK((H.to_modes(G) - e).norm() < 1e-12 * (1.0 + e.norm()));

    CHECK_THROWS_AS(duhamel_G(H, std::span(times).first(1), std::span(ws).first(1)), Error);
    std::vector<double> bad = times;
    bad[3] = bad[2];
    CHECK_THROWS_AS(duhamel_G(H, bad, ws), Error);
}

TEST_CASE("Duhamel quadrature is second order for oscillating sources")
{
    const Grid g(3.0, 30);
    const Hamiltonian H(g, RealField(g));
    const auto w0 = testsupport::bump(g, 1.2, 0.5, 0.0);
    const auto c = H.to_modes(w0);
    const double T = 1.0, nu = 7.0;
    // exact modal value of int_0^T e^{-i(T - s) l} sin(nu s) ds
    ModalVector exact(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        const double l = H.eigenvalues()[k];
        const cplx il(0.0, l);
        const cplx ep = (std::exp(cplx(0.0, nu * T)) - std::exp(-il * T)) / (cplx(0.0, nu) + il);
        const cplx em = (std::exp(cplx(0.0, -nu * T)) - std::exp(-il * T)) / (cplx(0.0, -nu) + il);
        exact[k] = c[k] * (ep - em) / cplx(0.0, 2.0);
    }
    double prev = 0.0;
    for (int M : {16, 32, 64, 128}) {
        std::vector<double> times;
        std::vector<ComplexField> ws;
        for (int m = 0; m <= M; ++m) {
            times.push_back(T * m / M);
            ws.push_back(cplx(std::sin(nu * times.back())) * w0);
        }
        const double err = (H.to_modes(duhamel_G(H, times, ws)) - exact).norm();
        if (prev > 0.0)
            CHECK(testsupport::order(prev, err) > 1.9);
        prev = err;

        ModalBlock block(c.size(), M + 1);
        for (int m = 0; m <= M; ++m)
            block.col(m) = H.to_modes(ws[m]);
        const auto G = duhamel_modal(ExpQuadratureWeights(H.eigenvalues(), T / M), block);
        CHECK(G.col(0).norm() == 0.0);
        CHECK((G.col(M) - H.to_modes(duhamel_G(H, times, ws))).norm() < 1e-12);
    }
}

TEST_CASE("quadratic form and H2 norm on a sine mode")
{
    const double L = 2.0;
    const Grid g(L, 800);
    const Hamiltonian H(g, RealField::sample(g, [](double) { return 3.0; }));
    const auto u = ComplexField::sample(g, [=](double x) { return cplx(std::sin(M_PI * x / L)); });
    const double k2 = M_PI * M_PI / (L * L);
    // ||u||^2 = L/2
    CHECK(quadratic_form(H, u, u).real() == doctest::Approx((k2 + 3.0) * L / 2.0).epsilon(1e-5));
    CHECK(std::abs(quadratic_form(H, u, u).imag()) < 1e-12);
    const RealField q = RealField::sample(g, [](double) { return std::sqrt(3.0); });
    CHECK(h2_norm(u, H, q) == doctest::Approx((k2 + 3.0) * std::sqrt(L / 2.0)).epsilon(1e-4));
    auto v = u;
    v[0] = 1.0;
    CHECK_THROWS_AS(quadratic_form(H, v, u), Error);
}

TEST_CASE("apply uses boundary data")
{
    const Grid g(1.0, 100);
    const Hamiltonian H(g, RealField(g));
    // -(x^2)'' = -2 everywhere, including the one-sided ends
    const auto Hf = H.apply(ComplexField::sample(g, [](double x) { return cplx(x * x + 1.0); }));
    for (int j = 0; j < g.size(); ++j)
        CHECK(Hf[j].real() == doctest::Approx(-2.0).epsilon(1e-8));
}
