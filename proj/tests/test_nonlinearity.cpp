#include "halfline/error.hpp"
#include "halfline/nonlinearity.hpp"

#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace halfline;

TEST_CASE("power nonlinearity values")
{
    const auto F = NonlinearitySpec::power(-2.0, 3.0);
    const cplx z(1.0, 2.0);
    const cplx expect = -2.0 * 5.0 * z;
    CHECK(std::abs(F.eval(0.3, 0.1, z) - expect) < 1e-12);
    CHECK(F.eval(0.0, 0.0, 0.0) == cplx{});
    CHECK(F.autonomous);
    CHECK(F.h.has_value());
    CHECK((*F.h)(0.0, 0.0, z) == doctest::Approx(-2.0 * 25.0 / 4.0));
    CHECK_THROWS_AS(NonlinearitySpec::power(1.0, 1.0), Error);
    CHECK_FALSE(NonlinearitySpec::power(cplx(0.0, 1.0), 3.0).h.has_value());
}

TEST_CASE("Wirtinger derivatives match an independent difference quotient")
{
    // independent oracle: fourth-order differences in Re z and Im z
    auto oracle = [](const NonlinearitySpec& s, cplx z, cplx& dz, cplx& dzb) {
        const double e = 1e-4;
        auto d = [&](cplx dir) {
            return (-s.eval(0, 0, z + 2.0 * e * dir) + 8.0 * s.eval(0, 0, z + e * dir) - 8.0 * s.eval(0, 0, z - e * dir) +
                    s.eval(0, 0, z - 2.0 * e * dir)) /
                   (12.0 * e);
        };
        const cplx da = d(1.0), db = d(cplx(0, 1));
        dz = 0.5 * (da - cplx(0, 1) * db);
        dzb = 0.5 * (da + cplx(0, 1) * db);
    };
    std::mt19937_64 rng(3);
    const std::vector<NonlinearitySpec> specs{NonlinearitySpec::power(1.5, 3.0), NonlinearitySpec::power(cplx(0.3, -1.0), 2.5),
                                              NonlinearitySpec::saturating(-1.0, 3.0, 0.7),
                                              NonlinearitySpec::saturating(2.0, 4.0, 0.2)};
    for (const auto& s : specs) {
        for (int k = 0; k < 200; ++k) {
            const cplx z = testsupport::random_cplx(rng, 1.5);
            cplx dz, dzb;
            oracle(s, z, dz, dzb);
            const double scale = std::abs(dz) + std::abs(dzb) + 1e-12;
            CHECK(std::abs(s.wirtinger_z(0, 0, z) - dz) / scale < 1e-7);
            CHECK(std::abs(s.wirtinger_zbar(0, 0, z) - dzb) / scale < 1e-7);
        }
        const auto rep = check_wirtinger_consistency(s, SampleSet::lattice(1.0, 1.0, 3.0));
        CHECK_MESSAGE(rep.pass, s.name << " " << rep.max_error);
    }
}

TEST_CASE("Wirtinger application is real-linear")
{
    const auto s = NonlinearitySpec::saturating(cplx(1.0, 0.5), 3.0, 1.0);
    std::mt19937_64 rng(8);
    for (int k = 0; k < 100; ++k) {
        const cplx z = testsupport::random_cplx(rng), v = testsupport::random_cplx(rng), w = testsupport::random_cplx(rng);
        const double a = testsupport::uniform(rng, -2.0, 2.0);
        const cplx lhs = wirtinger_apply(s, 0, 0, z, a * v + w);
        const cplx rhs = a * wirtinger_apply(s, 0, 0, z, v) + wirtinger_apply(s, 0, 0, z, w);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(lhs)));
        // first-order Taylor check
        const double e = 1e-6;
        const cplx fd = (s.eval(0, 0, z + e * v) - s.eval(0, 0, z - e * v)) / (2.0 * e);
        CHECK(std::abs(fd - wirtinger_apply(s, 0, 0, z, v)) < 1e-6 * (1.0 + std::abs(fd)));
    }
}

TEST_CASE("sign condition separates real and imaginary couplings")
{
    const auto set = SampleSet::lattice(2.0, 1.0, 4.0);
    CHECK(check_sign_condition(NonlinearitySpec::power(-3.0, 3.0), set).pass);
    CHECK(check_sign_condition(NonlinearitySpec::saturating(2.0, 5.0, 1.0), set).pass);
    CHECK(check_sign_condition(NonlinearitySpec::zero(), set).pass);
    const auto bad = check_sign_condition(NonlinearitySpec::power(cplx(0.0, 1.0), 3.0), set);
    CHECK_FALSE(bad.pass);
    // |Im(conj z i|z|^2 z)| = |z|^4, largest at R = 4
    CHECK(bad.max_error == doctest::Approx(256.0));
}

TEST_CASE("Hamiltonian structure and the saturating density in closed form")
{
    const auto set = SampleSet::lattice(1.0, 1.0, 2.5);
    CHECK(check_hamiltonian_structure(NonlinearitySpec::power(1.0, 3.0), set).pass);
    CHECK(check_hamiltonian_structure(NonlinearitySpec::power(-0.5, 4.5), set).pass);
    const double lam = -1.3, s = 0.8;
    const auto sat = NonlinearitySpec::saturating(lam, 3.0, s);
    CHECK(check_hamiltonian_structure(sat, set).pass);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 50; ++k) {
        const cplx z = testsupport::random_cplx(rng, 2.0);
        const double sig = std::norm(z);
        const double closed = 0.5 * lam * (sig / s - std::log1p(s * sig) / (s * s));
        CHECK((*sat.h)(0, 0, z) == doctest::Approx(closed).epsilon(1e-12));
    }
    const auto na = check_hamiltonian_structure(NonlinearitySpec::power(cplx(1.0, 1.0), 3.0), set);
    CHECK_FALSE(na.applicable);
}

TEST_CASE("saturating with s = 0 reduces to the power law")
{
    const auto a = NonlinearitySpec::saturating(1.7, 3.5, 0.0);
    const auto b = NonlinearitySpec::power(1.7, 3.5);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        const cplx z = testsupport::random_cplx(rng, 2.0);
        CHECK(std::abs(a.eval(0, 0, z) - b.eval(0, 0, z)) < 1e-12 * (1.0 + std::abs(b.eval(0, 0, z))));
        CHECK((*a.h)(0, 0, z) == doctest::Approx((*b.h)(0, 0, z)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(NonlinearitySpec::saturating(1.0, 3.0, -1.0), Error);
}

TEST_CASE("Assumption A probe on the cubic law")
{
    const std::vector<double> xs{0.0, 1.0};
    const auto pr = probe_assumption_a(NonlinearitySpec::power(1.0, 3.0), 2.0, 0.0, 1.0, xs);
    CHECK(pr.finite);
    // |dF/dz| + |dF/dzbar| = 2|z|^2 + |z|^2 = 3 R^2 at R = 2
    CHECK(pr.derivative_bound == doctest::Approx(12.0).epsilon(1e-9));
    CHECK(pr.x_derivative_ratio == 0.0);
    CHECK(pr.F_at_zero == 0.0);
    CHECK_THROWS_AS(probe_assumption_a(NonlinearitySpec::zero(), 0.0, 0.0, 1.0, xs), Error);

    NonlinearitySpec blow;
    blow.F = [](double x, double, cplx z) { return z / x; };
    blow.dFdz = [](double x, double, cplx) { return cplx(1.0 / x); };
    const auto pb = probe_assumption_a(blow, 1.0, 0.0, 1.0, xs);
    CHECK_FALSE(pb.finite);
}

TEST_CASE("growth hypotheses")
{
    const auto radial = SampleSet::radial(1.0, 1.0, 1e-2, 1e2);
    // focusing cubic: h = -|z|^4/4 >= -(1/4)(|z|^2 + |z|^4)
    const auto cubic = check_growth_hypotheses(NonlinearitySpec::power(-1.0, 3.0), 3.0, radial);
    CHECK(cubic.applicable);
    CHECK(cubic.lower.bounded);
    CHECK(cubic.lower.C <= 0.25);
    CHECK(cubic.lower.C > 0.2);
    CHECK(cubic.space.C == 0.0);
    CHECK(cubic.time.C == 0.0);

    // quintic focusing density is not controlled by |z|^4
    const auto quintic = check_growth_hypotheses(NonlinearitySpec::power(-1.0, 5.0), 3.0, radial);
    CHECK_FALSE(quintic.lower.bounded);

    // defocusing never violates the lower bound
    CHECK(check_growth_hypotheses(NonlinearitySpec::power(1.0, 5.0), 3.0, radial).lower.C == 0.0);

    NonlinearitySpec xdep;
    xdep.F = [](double x, double, cplx z) { return 2.0 * x * z; };
    xdep.h = [](double x, double, cplx z) { return x * std::norm(z); };
    xdep.dh_dx = [](double, double, cplx z) { return std::norm(z); };
    xdep.dh_dt = [](double, double, cplx) { return 0.0; };
    const auto rx = check_growth_hypotheses(xdep, 3.0, radial);
    CHECK(rx.space.bounded);
    CHECK(rx.space.C == doctest::Approx(1.0));

    xdep.dh_dx = [](double, double, cplx z) { return std::norm(z) * std::norm(z); };
    CHECK_FALSE(check_growth_hypotheses(xdep, 3.0, radial).space.bounded);

    NonlinearitySpec missing;
    missing.F = xdep.F;
    CHECK_FALSE(check_growth_hypotheses(missing, 3.0, radial).applicable);
}

TEST_CASE("zero nonlinearity")
{
    const auto z = NonlinearitySpec::zero();
    CHECK(z.is_zero());
    CHECK(z.eval(1.0, 2.0, cplx(3.0, 4.0)) == cplx{});
    CHECK(z.wirtinger_z(0, 0, 1.0) == cplx{});
}

TEST_CASE("non-autonomous partial derivatives fall back to differences")
{
    NonlinearitySpec s;
    s.F = [](double x, double t, cplx z) { return std::sin(x) * std::exp(-t) * z; };
    const cplx z(0.4, -0.2);
    CHECK(std::abs(s.partial_x(0.7, 0.3, z) - std::cos(0.7) * std::exp(-0.3) * z) < 1e-8);
    CHECK(std::abs(s.partial_t(0.7, 0.3, z) + std::sin(0.7) * std::exp(-0.3) * z) < 1e-8);
}
