#include "halfline/error.hpp"
#include "halfline/potential.hpp"

#include "support.hpp"

#include <doctest.h>

#include <vector>

using namespace halfline;

namespace {

// Brute force: integral of the piecewise-linear |W| over [a, b] by fine midpoint sums.
double brute_window_integral(const RealField& W, double a, double b)
{
    const Grid& g = W.grid();
    const int n = 4000;
    const double dx = (b - a) / n;
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = a + (k + 0.5) * dx;
        const int j = std::min(static_cast<int>(x / g.spacing()), g.size() - 2);
        const double t = (x - g.x(j)) / g.spacing();
        s += ((1.0 - t) * std::abs(W[j]) + t * std::abs(W[j + 1])) * dx;
    }
    return s;
}

} // namespace

TEST_CASE("local L1 sup on closed-form cases")
{
    const Grid g(4.0, 79);
    CHECK(local_l1_sup(RealField::sample(g, [](double) { return -2.5; })) == doctest::Approx(2.5));
    // |W| = x is largest on the last window [3, 4]
    CHECK(local_l1_sup(RealField::sample(g, [](double x) { return x; })) == doctest::Approx(3.5));
    CHECK(local_l1_sup(RealField::sample(g, [](double x) { return x; }), 0.5) == doctest::Approx(0.5 * 3.75));
    CHECK_THROWS_AS(local_l1_sup(RealField(g), 0.0), Error);
    try {
        local_l1_sup(RealField(g), 5.0);
        FAIL("expected DomainTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DomainTooShort);
    }
}

TEST_CASE("local L1 sup agrees with brute force on random piecewise-linear data")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid g(testsupport::uniform(rng, 1.5, 6.0), 40 + trial);
        RealField W(g);
        for (int j = 0; j < g.size(); ++j)
            W[j] = testsupport::uniform(rng, -3.0, 3.0);
        double best = 0.0;
        for (int j = 0; j < g.size(); ++j) {
            const double a = g.x(j);
            const double b = std::min(a + 1.0, g.length());
            best = std::max(best, brute_window_integral(W, a, b));
        }
        CHECK(local_l1_sup(W) == doctest::Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("Kato constants")
{
    CHECK(kato_constant(2.0, 0.5) == doctest::Approx(2.0 + 4.0 / 0.5));
    CHECK(kato_constant(0.0, 0.1) == 0.0);
    CHECK(kato_constant_l2(2.0, 0.5) == doctest::Approx(0.5 + 2.0 + 4.0 / 1.0));
    CHECK_THROWS_AS(kato_constant(1.0, 0.0), Error);
    CHECK_THROWS_AS(kato_constant_l2(1.0, -1.0), Error);
}

TEST_CASE("presets sample their closed forms")
{
    const Grid g(5.0, 99);
    const double h = g.spacing();
    PotentialParams p;
    p.omega = 2.0;
    auto harm = make_potential(g, "harmonic", p);
    CHECK(harm.V1[10] == doctest::Approx(4.0 * g.x(10) * g.x(10)));
    CHECK(harm.delta_reg.has_value());
    CHECK((*harm.dV)[20] == doctest::Approx(8.0 * g.x(20)));

    p.Z = 3.0;
    auto coul = make_potential(g, "coulomb_like", p);
    CHECK(coul.V2[0] == doctest::Approx(-3.0 / h));
    CHECK(coul.V2[7] == doctest::Approx(-3.0 / g.x(7)));
    CHECK_FALSE(coul.delta_reg.has_value());
    CHECK_FALSE(coul.notes.empty());

    p.a = 1.0;
    p.b = 2.0;
    p.depth = 4.0;
    auto well = make_potential(g, "well", p);
    CHECK(well.V2[30] == doctest::Approx(-4.0));
    CHECK(well.V2[5] == 0.0);
    CHECK(*well.delta_reg == doctest::Approx(1.0));

    auto e = make_potential(g, "exp");
    CHECK(e.total()[50] == doctest::Approx(std::exp(g.x(50))));

    for (const auto& name : potential_presets())
        CHECK_NOTHROW(make_potential(g, name));
    CHECK_THROWS_AS(make_potential(g, "lorentzian"), Error);
    PotentialParams bad;
    bad.a = 2.0;
    bad.b = 1.0;
    CHECK_THROWS_AS(make_potential(g, "well", bad), Error);
}

TEST_CASE("negative V1 is rejected with a hypothesis")
{
    const Grid g(2.0, 15);
    try {
        PotentialSpec s("bad", RealField::sample(g, [](double x) { return x - 1.0; }), RealField(g));
        FAIL("expected rejection");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Configuration);
        CHECK_FALSE(e.hypothesis().empty());
    }
    RealField nan(g);
    nan[3] = std::nan("");
    CHECK_THROWS_AS(PotentialSpec("nan", RealField(g), nan), Error);
    CHECK_THROWS_AS(PotentialSpec("grids", RealField(g), RealField(Grid(3.0, 15))), Error);
}

TEST_CASE("samples are interpolated linearly")
{
    const Grid g(2.0, 19);
    const std::vector<double> xs{0.0, 1.0, 2.0};
    const std::vector<double> v1{0.0, 2.0, 0.0};
    const std::vector<double> v2{-1.0, -1.0, 3.0};
    auto s = potential_from_samples(g, xs, v1, v2);
    CHECK(s.V1[5] == doctest::Approx(2.0 * g.x(5)));
    CHECK(s.V2[15] == doctest::Approx(-1.0 + 4.0 * (g.x(15) - 1.0)));
    CHECK_FALSE(s.delta_reg.has_value());
    const std::vector<double> unsorted{0.0, 2.0, 1.0};
    CHECK_THROWS_AS(potential_from_samples(g, unsorted, v1, v2), Error);
}

TEST_CASE("relative form bound holds on random fields")
{
    const Grid g(10.0, 255);
    std::mt19937_64 rng(5);
    std::vector<ComplexField> fields;
    for (int k = 0; k < 100; ++k)
        fields.push_back(testsupport::bump(g, testsupport::uniform(rng, 0.2, 9.0), testsupport::uniform(rng, 0.05, 1.5),
                                           testsupport::uniform(rng, -6.0, 6.0), testsupport::random_cplx(rng)));
    PotentialParams p;
    p.depth = 5.0;
    for (const char* name : {"constant", "well", "coulomb_like"}) {
        const auto spec = make_potential(g, name, p);
        for (double eps : {0.1, 1.0}) {
            RelativeBoundOptions opt;
            opt.check_operator_bound = true;
            const auto rep = verify_relative_bound(spec, eps, fields, opt);
            CHECK_MESSAGE(rep.pass, name << " eps=" << eps);
            CHECK(rep.worst_margin >= 0.0);
            CHECK(rep.K == doctest::Approx(kato_constant(rep.C, eps)));
            CHECK(rep.samples == 100);
        }
    }
}

TEST_CASE("form bound margin for a constant V2 and one sine mode")
{
    // c = eps = 1, phi = sin(pi x/6): lhs = |phi|^2, rhs = (k^2 + 2)|phi|^2 with k = pi/6
    const Grid g(6.0, 200);
    const auto spec = make_potential(g, "constant");
    std::vector<ComplexField> one{ComplexField::sample(g, [](double x) { return cplx(std::sin(M_PI * x / 6.0)); })};
    const auto rep = verify_relative_bound(spec, 1.0, one);
    const double k2 = M_PI * M_PI / 36.0;
    CHECK(rep.worst_margin == doctest::Approx((k2 + 1.0) / (k2 + 2.0)).epsilon(1e-4));
}

TEST_CASE("derivative split")
{
    const Grid g(5.0, 99);
    auto harm = make_potential(g, "harmonic");
    const auto rep = verify_derivative_split(harm);
    CHECK(rep.holds);
    CHECK(rep.max_violation <= 0.0);
    CHECK(rep.Q_local_l1 == doctest::Approx(1.0));

    auto coul = make_potential(g, "coulomb_like");
    const auto rc = verify_derivative_split(coul);
    CHECK(rc.holds);
    CHECK(rc.negative_part_local_l1 == 0.0);

    // V = x^2 with a split that ignores V1 entirely fails where 2x > 1
    auto bad = harm;
    bad.dV_split = DerivativeSplit{0.0, RealField::sample(g, [](double) { return 1.0; })};
    const auto rb = verify_derivative_split(bad);
    CHECK_FALSE(rb.holds);
    CHECK(rb.max_violation == doctest::Approx(2.0 * 5.0 - 1.0));

    PotentialSpec bare("bare", RealField(g), RealField(g));
    CHECK_THROWS_AS(verify_derivative_split(bare), Error);
}

TEST_CASE("derivative estimate falls back to differences")
{
    const Grid g(3.0, 59);
    PotentialSpec s("quad", RealField::sample(g, [](double x) { return x * x; }), RealField(g));
    const auto d = s.derivative_or_estimate();
    CHECK(d[17] == doctest::Approx(2.0 * g.x(17)).epsilon(1e-10));
}
