#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spexact/types.hpp"

namespace spexact {

// ---------------------------------------------------------------------------
// Complex potential Q = Q0 - U + W with declared bound constants.
// ---------------------------------------------------------------------------

struct WNone {};
struct WBounded {
    std::function<Complex(Point)> w;
    double radius = 0;  // bounded outside this radius
};
struct WDelta {
    double site = 0;
    Complex coupling;
};
using WKind = std::variant<WNone, WBounded, WDelta>;

// Constants the user declares about the decomposition; all optional metadata
// except where the assumption checks compare measured values against them.
struct DeclaredBounds {
    std::optional<double> theta;   // sectoriality semi-angle
    std::optional<double> c0;
    Complex shift{0.0, 0.0};       // quasi-sectoriality shift mu
    std::optional<double> a_grad, b_grad;
    std::optional<double> a_u, b_u;
    std::optional<double> a_w, b_w, m_w;  // form bounds; metadata only
};

struct PotentialSpec {
    std::string name;  // empty for ad-hoc specs
    int dimension = 1;
    std::function<Complex(Point)> q0;
    std::function<double(Point)> u;  // non-negative; enters Q as -u
    WKind w_kind = WNone{};
    std::optional<DeclaredBounds> declared;

    Complex q0_at(double x) const { return q0(Point{x, 0.0, 0.0}); }
    double u_at(double x) const { return u ? u(Point{x, 0.0, 0.0}) : 0.0; }

    // Regular part of Q restricted to one axial/radial variable (delta part
    // excluded; it is carried separately as an interface condition).
    std::function<Complex(double)> profile() const;
    std::optional<WDelta> delta() const;

    void validate() const;  // u >= 0 and delta-only-in-1d structural checks
};

// Named potentials used throughout: ix, ix3, harmonic, rotated_harmonic,
// ix3_minus_x2, shifted_complex_harmonic_delta, and ix3_damped
// (q0 = ix^3, u = 0.5|x|^3, the alpha = 0.5 member of the |x|^beta family).
PotentialSpec builtin_potential(const std::string& name);
std::vector<std::string> builtin_potential_names();

// ---------------------------------------------------------------------------
// Spectral enclosure regions of the complex plane.
// ---------------------------------------------------------------------------

struct PlaneRegion {
    enum class Kind { SectorR, HyperbolicRtilde, UniformSectorComplement, LeftHalfPlane };

    Kind kind = Kind::SectorR;
    // SectorR / HyperbolicRtilde
    double b_prime = 0.5;
    double a = 0;      // a_{W-U}(b') resp. a~(b')
    double m_tr = 0;   // Robin trace constant; 0 recovers the whole-space sector
    // UniformSectorComplement: everything outside |arg(z - mu0)| <= theta0
    Complex mu0{0, 0};
    double theta0 = 0;
    // LeftHalfPlane: Re z < c
    double c = 0;

    bool member(Complex lambda) const;
    // Explicit resolvent-norm bound valid on the region; +inf outside.
    double resolvent_bound(Complex lambda) const;
};

PlaneRegion sector_region(double b_prime, double a_wu, double m_tr = 0.0);
PlaneRegion hyperbolic_region(double b_prime, double a_tilde);
PlaneRegion uniform_sector_complement(Complex mu0, double theta0);
PlaneRegion left_half_plane(double c);

// ---------------------------------------------------------------------------
// Assumption verification on sample grids.
// ---------------------------------------------------------------------------

enum class AssumptionCase { I_sectorial, II_accretive };

struct SampleBox {
    Point lo{-10, -10, -10};
    Point hi{10, 10, 10};
    int resolution = 101;             // points per axis
    double exclude_radius = 0;        // skip |x| < this (exterior domains)

    std::vector<Point> points(int dimension) const;
};

struct AssumptionViolation {
    std::string item;   // e.g. "2.1.i sectoriality", "2.2 ReQ0>=0"
    Point where{0, 0, 0};
    double value = 0;
};

struct AssumptionReport {
    AssumptionCase which_case = AssumptionCase::I_sectorial;
    bool passed = false;
    struct Measured {
        double theta_hat = 0;
        double c0_hat = 0;
        double a_grad_hat = 0, b_grad_hat = 0;
        double a_u_hat = 0, b_u_hat = 0;
        std::vector<double> growth_witness;  // min |Q0| per concentric shell
    } measured;
    std::vector<AssumptionViolation> violations;
};

struct SectorialityResult {
    double theta = 0;  // pi/2 sentinel when Re(q0-shift) <= 0 somewhere with Im != 0
    double c0 = 0;
};

SectorialityResult sectoriality_angle(const PotentialSpec& spec,
                                      const std::vector<Point>& samples,
                                      std::optional<Complex> shift = std::nullopt);

AssumptionReport verify_assumptions(const PotentialSpec& spec, AssumptionCase which,
                                    const SampleBox& box);

// Minimal-slack upper envelope y <= a + b z with a, b >= 0 (exact 2-variable LP).
struct EnvelopeFit {
    double a = 0, b = 0;
};
EnvelopeFit fit_upper_envelope(const std::vector<double>& z, const std::vector<double>& y);

// Eigensystem-completeness threshold: smallest beta for the |x|^beta family at
// a given alpha in [0,1); theta(b) = arctan(max{(1-sqrt b)/sqrt b, sqrt((1-b)/(2+b))}).
double completeness_threshold(double alpha);

}  // namespace spexact
