#include "spexact/ode.hpp"

#include <algorithm>
#include <cmath>

namespace spexact {

ScaledState ScaledState::normalized(Complex f, Complex fp, double log0) {
    double m = std::max(std::abs(f), std::abs(fp));
    if (m == 0.0) return {f, fp, log0};
    return {f / m, fp / m, log0 + std::log(m)};
}

namespace {

struct Rhs {
    const OdeForm& form;
    Complex lambda;

    void operator()(double x, const Complex y[2], Complex out[2]) const {
        Complex qeff = form.q(x);
        double damp = 0.0;
        switch (form.kind) {
            case OdeForm::Kind::Cartesian:
                break;
            case OdeForm::Kind::Radial2d:
                qeff += static_cast<double>(form.l) * form.l / (x * x);
                damp = 1.0 / x;
                break;
            case OdeForm::Kind::Radial3d:
                qeff += static_cast<double>(form.l) * (form.l + 1) / (x * x);
                damp = 2.0 / x;
                break;
        }
        if (!std::isfinite(qeff.real()) || !std::isfinite(qeff.imag()))
            throw NonFiniteCoefficient("q at x = " + std::to_string(x));
        out[0] = y[1];
        out[1] = (qeff - lambda) * y[0] - damp * y[1];
    }
};

// Dormand-Prince 5(4) tableau
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;

}  // namespace

ScaledState integrate(const OdeForm& form, Complex lambda, double from, double to,
                      ScaledState init, double tol) {
    if (tol <= 0) throw InvalidParameter("integration tol must be positive");
    if (from == to) return init;
    const Rhs rhs{form, lambda};
    const double dir = (to > from) ? 1.0 : -1.0;
    const double span = std::abs(to - from);

    double x = from;
    Complex y[2] = {init.value, init.derivative};
    double log_scale = init.log_scale;

    Complex k1[2];
    rhs(x, y, k1);
    double h = dir * std::min(span / 50.0, 0.1);
    long steps = 0;

    while ((to - x) * dir > 0) {
        if (std::abs(h) > std::abs(to - x)) h = to - x;

        Complex k2[2], k3[2], k4[2], k5[2], k6[2], k7[2], yt[2];

        yt[0] = y[0] + h * (A21 * k1[0]);
        yt[1] = y[1] + h * (A21 * k1[1]);
        rhs(x + C2 * h, yt, k2);
        yt[0] = y[0] + h * (A31 * k1[0] + A32 * k2[0]);
        yt[1] = y[1] + h * (A31 * k1[1] + A32 * k2[1]);
        rhs(x + C3 * h, yt, k3);
        yt[0] = y[0] + h * (A41 * k1[0] + A42 * k2[0] + A43 * k3[0]);
        yt[1] = y[1] + h * (A41 * k1[1] + A42 * k2[1] + A43 * k3[1]);
        rhs(x + C4 * h, yt, k4);
        yt[0] = y[0] + h * (A51 * k1[0] + A52 * k2[0] + A53 * k3[0] + A54 * k4[0]);
        yt[1] = y[1] + h * (A51 * k1[1] + A52 * k2[1] + A53 * k3[1] + A54 * k4[1]);
        rhs(x + C5 * h, yt, k5);
        yt[0] = y[0] + h * (A61 * k1[0] + A62 * k2[0] + A63 * k3[0] + A64 * k4[0] + A65 * k5[0]);
        yt[1] = y[1] + h * (A61 * k1[1] + A62 * k2[1] + A63 * k3[1] + A64 * k4[1] + A65 * k5[1]);
        rhs(x + h, yt, k6);

        Complex y5[2];
        y5[0] = y[0] + h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]);
        y5[1] = y[1] + h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1]);
        rhs(x + h, y5, k7);

        Complex e0 = h * (E1 * k1[0] + E3 * k3[0] + E4 * k4[0] + E5 * k5[0] + E6 * k6[0] + E7 * k7[0]);
        Complex e1 = h * (E1 * k1[1] + E3 * k3[1] + E4 * k4[1] + E5 * k5[1] + E6 * k6[1] + E7 * k7[1]);
        double scale = std::max({std::abs(y[0]), std::abs(y[1]), std::abs(y5[0]),
                                 std::abs(y5[1]), 0.25});
        double err = std::max(std::abs(e0), std::abs(e1)) / scale;

        if (err <= tol) {
            x += h;
            y[0] = y5[0];
            y[1] = y5[1];
            k1[0] = k7[0];
            k1[1] = k7[1];
            double m = std::max(std::abs(y[0]), std::abs(y[1]));
            if (m > 2.0 || (m < 0.5 && m > 0.0)) {
                y[0] /= m;
                y[1] /= m;
                k1[0] /= m;
                k1[1] /= m;
                log_scale += std::log(m);
            }
            ++steps;
            if (steps > 50'000'000) throw NonConvergence("integrate: step budget exhausted");
        }
        double fac = (err > 0) ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
        if (std::abs(h) < 1e-14 * (span + 1.0))
            throw StepSizeUnderflow("integrate at x = " + std::to_string(x));
    }
    return {y[0], y[1], log_scale};
}

ScaledState radial_series_start(const OdeForm& form, Complex lambda, double r0) {
    if (!form.radial()) throw NotRadial("radial_series_start needs a radial form");
    if (!(r0 > 0)) throw InvalidParameter("r0 must be positive");
    const int l = form.l;
    Complex q0 = form.q(0.0);
    if (!std::isfinite(q0.real()) || !std::isfinite(q0.imag()))
        throw NonFiniteCoefficient("q at r = 0");
    double denom = (form.kind == OdeForm::Kind::Radial3d) ? (4.0 * l + 6.0) : (4.0 * l + 4.0);
    Complex c2 = (q0 - lambda) / denom;
    double rl = std::pow(r0, l);
    Complex g = rl * (1.0 + c2 * r0 * r0);
    Complex gp = (l > 0 ? static_cast<double>(l) * std::pow(r0, l - 1) : Complex(0.0)) +
                 static_cast<double>(l + 2) * c2 * std::pow(r0, l + 1);
    return ScaledState::normalized(g, gp);
}

}  // namespace spexact
