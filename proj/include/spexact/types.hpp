#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace spexact {

using Complex = std::complex<double>;
using Point = std::array<double, 3>;

constexpr double kPi = 3.14159265358979323846;

// Axis-aligned rectangle in the complex plane.
struct Rect {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

    bool contains(Complex z) const {
        return z.real() >= re_lo && z.real() <= re_hi &&
               z.imag() >= im_lo && z.imag() <= im_hi;
    }
    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    double diameter() const { return std::hypot(width(), height()); }
    Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
    Rect expanded(double d) const { return {re_lo - d, re_hi + d, im_lo - d, im_hi + d}; }
};

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define SPEXACT_ERROR(Name)                                         \
    struct Name : Error {                                           \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

SPEXACT_ERROR(EmptySamples);
SPEXACT_ERROR(NonFiniteEvaluation);
SPEXACT_ERROR(InvalidParameter);
SPEXACT_ERROR(OutOfRange);
SPEXACT_ERROR(StepSizeUnderflow);
SPEXACT_ERROR(NonFiniteCoefficient);
SPEXACT_ERROR(NotRadial);
SPEXACT_ERROR(ZeroOnContour);
SPEXACT_ERROR(PhaseResolutionExceeded);
SPEXACT_ERROR(NonConvergence);
SPEXACT_ERROR(NotAnEigenvalue);
SPEXACT_ERROR(MatchFailure);
SPEXACT_ERROR(TooShort);
SPEXACT_ERROR(InsufficientData);
SPEXACT_ERROR(MeshTooCoarse);
SPEXACT_ERROR(SiteOffMesh);
SPEXACT_ERROR(PivotBreakdown);
SPEXACT_ERROR(EmptySet);
SPEXACT_ERROR(WindowNotCovered);
SPEXACT_ERROR(LMaxExceeded);
SPEXACT_ERROR(AmbiguousMatch);
SPEXACT_ERROR(UnknownTrajectory);
SPEXACT_ERROR(ConfigError);

#undef SPEXACT_ERROR

}  // namespace spexact
