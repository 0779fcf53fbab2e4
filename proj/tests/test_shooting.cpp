#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spexact/matrix_spectra.hpp"
#include "spexact/shooting.hpp"

using namespace spexact;

namespace {

TruncatedProblem free_on_0_pi() {
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0, [](double) { return Complex(0, 0); }};
    p.left = 0;
    p.right = kPi;
    return p;
}

TruncatedProblem harmonic_on(double s) {
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0, [](double x) { return Complex(x * x, 0); }};
    p.left = -s;
    p.right = s;
    return p;
}

TruncatedProblem ix3_on(double s) {
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0,
                     [](double x) { return Complex(0, x * x * x); }};
    p.left = -s;
    p.right = s;
    return p;
}

}  // namespace

TEST_CASE("miss distance vanishes exactly at Dirichlet Laplacian eigenvalues") {
    auto p = free_on_0_pi();
    auto at1 = miss_distance(p, Complex(1, 0));
    CHECK(std::abs(at1.w * std::exp(at1.log_scale)) < 1e-8);
    auto at2 = miss_distance(p, Complex(2, 0));
    CHECK(std::abs(at2.w) >= 0.1);
}

TEST_CASE("miss distance at the harmonic ground state through a large box") {
    auto p = harmonic_on(8.0);
    auto md = miss_distance(p, Complex(1, 0));
    CHECK(std::abs(md.w) < 1e-6);
}

TEST_CASE("count eigenvalues by winding") {
    auto p = free_on_0_pi();
    CHECK(count_eigenvalues(p, Rect{0.5, 4.5, -1, 1}) == 2);
    CHECK(count_eigenvalues(p, Rect{0.5, 9.5, -1, 1}) == 3);
    auto h = harmonic_on(8.0);
    CHECK(count_eigenvalues(h, Rect{0, 6, -1, 1}) == 3);
}

TEST_CASE("find eigenvalues: free particle on (0,pi)") {
    auto p = free_on_0_pi();
    auto recs = find_eigenvalues(p, Rect{0.5, 9.5, -1, 1}, 1e-10);
    REQUIRE(recs.size() == 3);
    CHECK(std::abs(recs[0].lambda - Complex(1, 0)) < 1e-8);
    CHECK(std::abs(recs[1].lambda - Complex(4, 0)) < 1e-8);
    CHECK(std::abs(recs[2].lambda - Complex(9, 0)) < 1e-8);
    for (auto& r : recs) CHECK(r.multiplicity == 1);
}

TEST_CASE("find eigenvalues: lowest three of the imaginary cubic at s=6") {
    auto p = ix3_on(6.0);
    ShootOptions opts;
    opts.integ_tol = 1e-11;
    auto recs = find_eigenvalues(p, Rect{0, 9, -2, 2}, 1e-9, opts);
    REQUIRE(recs.size() == 3);
    CHECK(std::abs(recs[0].lambda - Complex(1.1562671, 0)) < 1e-5);
    CHECK(std::abs(recs[1].lambda - Complex(4.1092288, 0)) < 1e-5);
    CHECK(std::abs(recs[2].lambda - Complex(7.5622739, 0)) < 1e-5);
}

TEST_CASE("multiplicity sum always equals the window count") {
    auto p = ix3_on(4.0);
    Rect rect{0, 12, -4, 4};
    int total = count_eigenvalues(p, rect);
    auto recs = find_eigenvalues(p, rect, 1e-9);
    int sum = 0;
    for (auto& r : recs) sum += r.multiplicity;
    CHECK(sum == total);
}

TEST_CASE("partition additivity of the winding count") {
    auto p = free_on_0_pi();
    int whole = count_eigenvalues(p, Rect{0.5, 9.5, -1, 1});
    int a = count_eigenvalues(p, Rect{0.5, 5.5, -1, 1});
    int b = count_eigenvalues(p, Rect{5.5, 9.5, -1, 1});
    CHECK(whole == a + b);

    auto q = ix3_on(4.0);
    Rect rect{0, 12, -4, 4};
    int w2 = count_eigenvalues(q, rect);
    int c = count_eigenvalues(q, Rect{0, 6.1, -4, 4});
    int d = count_eigenvalues(q, Rect{6.1, 12, -4, 4});
    CHECK(w2 == c + d);
}

TEST_CASE("matching point anywhere in the middle third leaves eigenvalues unchanged") {
    auto p = harmonic_on(6.0);
    std::vector<Complex> results;
    for (double frac : {0.34, 0.5, 0.66}) {
        ShootOptions opts;
        opts.matching_point = p.left + frac * (p.right - p.left);
        auto recs = find_eigenvalues(p, Rect{0.5, 4.5, -1, 1}, 1e-10, opts);
        REQUIRE(recs.size() == 2);
        results.push_back(recs[0].lambda);
    }
    CHECK(std::abs(results[0] - results[1]) < 1e-9);
    CHECK(std::abs(results[1] - results[2]) < 1e-9);
}

TEST_CASE("conjugation symmetry of the truncated imaginary cubic") {
    auto p = ix3_on(5.0);
    Rect rect{0, 14, -5, 5};
    auto recs = find_eigenvalues(p, rect, 1e-9);
    REQUIRE(!recs.empty());
    for (const auto& r : recs) {
        bool has_conj = false;
        for (const auto& q : recs)
            if (std::abs(q.lambda - std::conj(r.lambda)) < 1e-6) has_conj = true;
        CHECK(has_conj);
    }
}

TEST_CASE("delta interface: eigenvalues match the banded-matrix oracle at O(h^2)") {
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0,
                     [](double x) { return Complex(1, 1) * (x * x); }};
    p.left = -8;
    p.right = 8;
    p.interfaces.push_back({0.0, Complex(0, 1)});

    Rect rect{0, 9, -1, 9};
    auto shoot = find_eigenvalues(p, rect, 1e-10);
    REQUIRE(shoot.size() >= 3);

    for (int n : {800, 1600}) {
        BandedOperator A = discretize(p, n);
        auto matrix = eigs_in_rect(A, rect);
        REQUIRE(matrix.size() >= shoot.size());
        double h2 = A.h * A.h;
        for (const auto& sr : shoot) {
            double best = 1e300;
            for (const auto& [lam, mult] : matrix) best = std::min(best, std::abs(lam - sr.lambda));
            CHECK(best < 20.0 * h2 + 1e-6);
        }
    }
}

TEST_CASE("robin conditions against the classical transcendental equation") {
    // -f'' = lambda f on (0,1) with f'(0) = a f(0) and f'(1) = -a f(1), a = 1:
    // real eigenvalues solve tan(k) = 2 a k / (k^2 - a^2), lambda = k^2
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0, [](double) { return Complex(0, 0); }};
    p.left = 0;
    p.right = 1;
    p.left_bc = BoundaryCondition::robin(Complex(1, 0));
    p.right_bc = BoundaryCondition::robin(Complex(1, 0));
    auto recs = find_eigenvalues(p, Rect{-3, 30, -1, 1}, 1e-10);
    REQUIRE(!recs.empty());
    for (const auto& r : recs) {
        double lam = r.lambda.real();
        if (lam <= 1.0) continue;  // skip the k^2 = a^2 neighbourhood
        double k = std::sqrt(lam);
        double lhs = std::tan(k) * (k * k - 1.0);
        double rhs = 2.0 * k;
        CHECK(std::abs(lhs - rhs) < 1e-5 * (1 + std::abs(lhs)));
    }
}

TEST_CASE("eigenfunction of the harmonic ground state matches the Gaussian") {
    auto p = harmonic_on(8.0);
    auto f = eigenfunction(p, Complex(1, 0), 2001);
    CHECK(f.derivative_mismatch < 1e-8);
    double pi14 = std::pow(kPi, -0.25);
    // fix the global phase at the center sample
    Complex phase = f.phi[1000] / std::abs(f.phi[1000]);
    double worst = 0;
    for (size_t i = 0; i < f.x.size(); ++i) {
        double exact = pi14 * std::exp(-0.5 * f.x[i] * f.x[i]);
        worst = std::max(worst, std::abs(f.phi[i] / phase - exact));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("eigenfunction of the free particle second mode") {
    // the second mode has a node exactly at the midpoint matching point
    auto p = free_on_0_pi();
    auto f = eigenfunction(p, Complex(4, 0), 1001);
    CHECK(f.derivative_mismatch < 1e-8);
    Complex phase(0, 0);
    double amp = std::sqrt(2.0 / kPi);
    size_t i0 = 250;  // x ~ pi/4 where sin(2x) ~ 1
    phase = f.phi[i0] / (amp * std::sin(2.0 * f.x[i0]));
    double worst = 0;
    for (size_t i = 0; i < f.x.size(); ++i)
        worst = std::max(worst, std::abs(f.phi[i] - phase * amp * std::sin(2 * f.x[i])));
    CHECK(worst < 1e-6);
    CHECK(std::abs(std::abs(phase) - 1.0) < 1e-8);
}

TEST_CASE("eigenfunction derivative mismatch stays tiny for the cubic") {
    auto p = ix3_on(6.0);
    auto f = eigenfunction(p, Complex(1.1562671, 0), 1501);
    CHECK(f.derivative_mismatch < 1e-5);
}

TEST_CASE("eigenfunction rejects non-eigenvalues") {
    auto p = free_on_0_pi();
    CHECK_THROWS_AS(eigenfunction(p, Complex(2, 0), 101), NotAnEigenvalue);
}

TEST_CASE("tail mass of the normalized Gaussian") {
    auto p = harmonic_on(8.0);
    auto f = eigenfunction(p, Complex(1, 0), 4001);
    // closed-form tail of the normalized Hermite ground state: sqrt(erfc(r))
    double expected = std::sqrt(std::erfc(3.0));
    CHECK(tail_mass(f, 3.0) == doctest::Approx(expected).epsilon(1e-3));
    CHECK(tail_mass(f, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tail_mass(f, 7.9) < 1e-10);
    CHECK_THROWS_AS(tail_mass(f, 9.0), OutOfRange);
}

TEST_CASE("decay bound evaluates the essential infimum form") {
    auto q = [](double x) { return Complex(0, x * x * x); };
    // inf over |x| >= 2 of |x^3| = 8; iota = 1 gives D/8
    CHECK(tail_decay_bound(q, 2.0, 10.0, 4.0, 1.0) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("zero on contour is detected and reported") {
    auto p = free_on_0_pi();
    auto recs = find_eigenvalues(p, Rect{3.5, 4.5, -0.5, 0.5}, 1e-12);
    REQUIRE(recs.size() == 1);
    // place a corner sample exactly on the polished zero
    double re = recs[0].lambda.real(), im = recs[0].lambda.imag();
    CHECK_THROWS_AS(count_eigenvalues(p, Rect{re, re + 5.0, im, im + 1.0}), ZeroOnContour);
}
