#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "spexact/potentials.hpp"

using namespace spexact;

namespace {

std::vector<Point> axis_samples(double lo, double hi, int n) {
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back(Point{lo + (hi - lo) * i / (n - 1), 0, 0});
    return pts;
}

}  // namespace

TEST_CASE("sectoriality angle: complex harmonic stays under pi/4") {
    PotentialSpec s;
    s.dimension = 1;
    s.q0 = [](Point p) { return Complex(1, 1) * (p[0] * p[0]) + 1.0; };
    auto r = sectoriality_angle(s, axis_samples(-3, 3, 7));
    CHECK(r.theta < kPi / 4);
    CHECK(r.c0 == doctest::Approx(1.0));

    auto dense = sectoriality_angle(s, axis_samples(-10, 10, 4001));
    CHECK(dense.theta <= kPi / 4 + 1e-12);
    CHECK(dense.theta > kPi / 4 - 1e-2);  // approaches the asymptote from below
}

TEST_CASE("sectoriality angle: real potential has angle zero") {
    PotentialSpec s;
    s.dimension = 1;
    s.q0 = [](Point p) { return Complex(p[0] * p[0], 0); };
    auto samples = axis_samples(-3, 3, 7);
    auto r = sectoriality_angle(s, samples);
    CHECK(r.theta == 0.0);
    double c0 = 1e300;
    for (auto& p : samples) c0 = std::min(c0, p[0] * p[0]);
    CHECK(r.c0 == doctest::Approx(c0));
}

TEST_CASE("sectoriality angle: ix^3 hits the pi/2 sentinel") {
    PotentialSpec s = builtin_potential("ix3");
    auto r = sectoriality_angle(s, axis_samples(-3, 3, 7));
    CHECK(r.theta == doctest::Approx(kPi / 2));
}

TEST_CASE("sectoriality angle: sup grows with more samples") {
    PotentialSpec s;
    s.dimension = 1;
    s.q0 = [](Point p) { return Complex(1, 1) * (p[0] * p[0]) + 1.0; };
    double prev = 0;
    for (int n : {5, 11, 101, 1001}) {
        auto r = sectoriality_angle(s, axis_samples(-8, 8, n));
        CHECK(r.theta >= prev - 1e-15);
        prev = r.theta;
    }
}

TEST_CASE("sectoriality angle rejects empty samples") {
    PotentialSpec s = builtin_potential("ix");
    CHECK_THROWS_AS(sectoriality_angle(s, {}), EmptySamples);
}

TEST_CASE("verify_assumptions case II: the alpha=0.5 split fits b_U ~ 0.25") {
    PotentialSpec s = builtin_potential("ix3_damped");
    SampleBox box;
    box.lo = {-10, 0, 0};
    box.hi = {10, 0, 0};
    box.resolution = 2001;
    auto rep = verify_assumptions(s, AssumptionCase::II_accretive, box);
    CHECK(rep.passed);
    CHECK(rep.measured.b_u_hat == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(rep.measured.a_u_hat == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("verify_assumptions case II: merged ix^3 - x^2 violates Re Q0 >= 0") {
    PotentialSpec s;
    s.dimension = 1;
    s.name = "merged";
    s.q0 = [](Point p) {
        double x = p[0];
        return Complex(-x * x, x * x * x);
    };
    SampleBox box;
    box.lo = {-10, 0, 0};
    box.hi = {10, 0, 0};
    box.resolution = 501;
    auto rep = verify_assumptions(s, AssumptionCase::II_accretive, box);
    CHECK_FALSE(rep.passed);
    bool found = false;
    for (auto& v : rep.violations)
        if (v.item.find("Re Q0") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("verify_assumptions case I: complex harmonic passes with theta < pi/4") {
    PotentialSpec s;
    s.dimension = 1;
    s.q0 = [](Point p) { return Complex(1, 1) * (p[0] * p[0]) + 1.0; };
    DeclaredBounds d;
    d.theta = kPi / 4;
    s.declared = d;
    SampleBox box;
    box.lo = {-10, 0, 0};
    box.hi = {10, 0, 0};
    box.resolution = 2001;
    auto rep = verify_assumptions(s, AssumptionCase::I_sectorial, box);
    CHECK(rep.passed);
    CHECK(rep.measured.theta_hat < kPi / 4 + 1e-12);
}

TEST_CASE("fit_upper_envelope recovers exact linear relations") {
    std::vector<double> z, y;
    for (int i = 0; i <= 100; ++i) {
        double zi = i * 0.37;
        z.push_back(zi);
        y.push_back(0.25 * zi);
    }
    auto fit = fit_upper_envelope(z, y);
    CHECK(fit.b == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fit.a == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("fit_upper_envelope with constant data picks the flat bound") {
    std::vector<double> z, y;
    for (int i = 0; i <= 50; ++i) {
        z.push_back(i * i * 0.1);
        y.push_back(1.0);
    }
    auto fit = fit_upper_envelope(z, y);
    // both (a=1,b=0) and tilted feasible lines exist; minimal slack is the flat one
    CHECK(fit.a == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fit.b == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("sector region: membership and bound from the printed formulas") {
    auto r = sector_region(0.25, 0.0, 0.0);
    CHECK(r.member(Complex(-10, 0)));
    CHECK(r.resolvent_bound(Complex(-10, 0)) == doctest::Approx(0.2));
    CHECK_FALSE(r.member(Complex(-10, 20)));  // asymptote slope (1-sqrt b)/sqrt b = 1
    CHECK(r.resolvent_bound(Complex(-10, 20)) == std::numeric_limits<double>::infinity());
}

TEST_CASE("hyperbolic region membership") {
    auto r = hyperbolic_region(0.25, 1.0);
    CHECK(r.member(Complex(-10, 0)));
    CHECK_FALSE(r.member(Complex(-1, 0)));  // inside the vertex cutoff
    CHECK(std::isfinite(r.resolvent_bound(Complex(-10, 0))));
}

TEST_CASE("sector membership matches an independent transcription on random points") {
    // direct transcription of the whole-space sector R(b')
    double bp = 0.37, a = 0.8;
    auto direct = [&](Complex z) {
        double sb = std::sqrt(bp);
        return z.real() < -a / (1 - sb) &&
               std::abs(z.imag()) < (1 - sb) / sb * std::abs(z.real()) - a / sb;
    };
    auto region = sector_region(bp, a, 0.0);
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-50, 50);
    int n = 1000000;
    for (int i = 0; i < n; ++i) {
        Complex z(u(rng), u(rng));
        if (direct(z) != region.member(z)) {
            CAPTURE(z.real());
            CAPTURE(z.imag());
            REQUIRE(direct(z) == region.member(z));
        }
    }
    CHECK(true);
}

TEST_CASE("sector resolvent bound blows up toward the boundary along a ray") {
    auto r = sector_region(0.25, 0.5, 0.0);
    // walk toward the sector's upper boundary at fixed Re
    double re = -20;
    double im_edge = (1 - 0.5) / 0.5 * 20 - 0.5 / 0.5;  // boundary |Im|
    double prev = 0;
    for (double f : {0.0, 0.5, 0.9, 0.99, 0.999}) {
        double b = r.resolvent_bound(Complex(re, f * im_edge));
        CHECK(b > prev);
        prev = b;
    }
    CHECK(prev > 100.0);
}

TEST_CASE("uniform sector complement and half-plane bounds") {
    auto s = uniform_sector_complement(Complex(1, 0), kPi / 4);
    CHECK_FALSE(s.member(Complex(5, 0)));
    CHECK(s.member(Complex(-1, 0)));
    CHECK(s.resolvent_bound(Complex(-1, 0)) == doctest::Approx(0.5));
    auto h = left_half_plane(0.0);
    CHECK(h.member(Complex(-2, 5)));
    CHECK(h.resolvent_bound(Complex(-2, 5)) == doctest::Approx(0.5));
    CHECK_FALSE(h.member(Complex(1, 0)));
}

TEST_CASE("completeness threshold") {
    CHECK(completeness_threshold(0.0) == doctest::Approx(2.0));
    CHECK(completeness_threshold(0.5) == doctest::Approx(6.0));
    CHECK(completeness_threshold(0.999) > 1e2);
    CHECK_THROWS_AS(completeness_threshold(1.0), OutOfRange);
    CHECK_THROWS_AS(completeness_threshold(-0.1), OutOfRange);

    double prev = 0;
    for (double a = 0.0; a <= 0.99; a += 0.01) {
        double b = completeness_threshold(a);
        CHECK(b >= prev - 1e-12);
        prev = b;
    }
}

TEST_CASE("builtin potentials validate and delta is 1-d only") {
    for (auto& name : builtin_potential_names()) {
        auto s = builtin_potential(name);
        s.validate();
    }
    PotentialSpec bad = builtin_potential("shifted_complex_harmonic_delta");
    bad.dimension = 2;
    CHECK_THROWS_AS(bad.validate(), InvalidParameter);
}

TEST_CASE("left-opening regions are monotone toward the lower-left") {
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> u(-60, 60);
    auto regions = {sector_region(0.4, 1.0, 0.5), hyperbolic_region(0.6, 2.0),
                    left_half_plane(-1.0)};
    for (const auto& r : regions) {
        for (int i = 0; i < 20000; ++i) {
            Complex z(u(rng), u(rng));
            if (!r.member(z)) continue;
            Complex closer(z.real() - std::abs(u(rng)), z.imag() * 0.5);
            CHECK(r.member(closer));
        }
    }
}
