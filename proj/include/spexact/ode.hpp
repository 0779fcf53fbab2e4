#pragma once

#include <functional>

#include "spexact/types.hpp"

namespace spexact {

// One-dimensional form of the differential expression:
//   cartesian:  -f'' + q(x) f = lambda f
//   radial2d:   -f'' - (1/r) f' + (l^2/r^2 + q(r)) f = lambda f
//   radial3d:   -g'' - (2/r) g' + (l(l+1)/r^2 + q(r)) g = lambda g
struct OdeForm {
    enum class Kind { Cartesian, Radial2d, Radial3d };
    Kind kind = Kind::Cartesian;
    int l = 0;  // angular index; ignored for cartesian
    std::function<Complex(double)> q;

    bool radial() const { return kind != Kind::Cartesian; }
};

// Solution state (f, f') with the dominant magnitude factored out: the true
// state is e^{log_scale} (value, derivative) and max(|value|,|derivative|)
// stays in [1/2, 2] after each renormalization.
struct ScaledState {
    Complex value{0, 0};
    Complex derivative{0, 0};
    double log_scale = 0;

    static ScaledState normalized(Complex f, Complex fp, double log0 = 0.0);
    Complex true_value() const { return value * std::exp(log_scale); }
    Complex true_derivative() const { return derivative * std::exp(log_scale); }
};

// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on the first-order
// system, renormalizing to survive exponential growth. Integration may run in
// either direction; radial forms must not cross r = 0.
ScaledState integrate(const OdeForm& form, Complex lambda, double from, double to,
                      ScaledState init, double tol);

// Regular solution branch g(r) = r^l (1 + c2 r^2 + O(r^4)) at a small r0,
// with c2 from matching the series in the radial equation.
ScaledState radial_series_start(const OdeForm& form, Complex lambda, double r0);

}  // namespace spexact
