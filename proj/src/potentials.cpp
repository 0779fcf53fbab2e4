#include "spexact/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spexact {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double norm2(const Point& p) { return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]); }
}  // namespace

// ---------------------------------------------------------------------------
// PotentialSpec
// ---------------------------------------------------------------------------

std::function<Complex(double)> PotentialSpec::profile() const {
    auto q = q0;
    auto uu = u;
    std::function<Complex(double)> bounded;
    if (const auto* wb = std::get_if<WBounded>(&w_kind)) {
        auto w = wb->w;
        bounded = [w](double x) { return w(Point{x, 0.0, 0.0}); };
    }
    return [q, uu, bounded](double x) {
        Point p{x, 0.0, 0.0};
        Complex v = q(p);
        if (uu) v -= uu(p);
        if (bounded) v += bounded(x);
        return v;
    };
}

std::optional<WDelta> PotentialSpec::delta() const {
    if (const auto* wd = std::get_if<WDelta>(&w_kind)) return *wd;
    return std::nullopt;
}

void PotentialSpec::validate() const {
    if (dimension < 1 || dimension > 3) throw InvalidParameter("dimension must be 1, 2 or 3");
    if (std::holds_alternative<WDelta>(w_kind) && dimension != 1)
        throw InvalidParameter("delta singular part requires dimension 1");
    if (!q0) throw InvalidParameter("q0 evaluator missing");
}

PotentialSpec builtin_potential(const std::string& name) {
    PotentialSpec s;
    s.name = name;
    s.dimension = 1;
    if (name == "ix") {
        s.q0 = [](Point p) { return Complex(0.0, p[0]); };
    } else if (name == "ix3") {
        s.q0 = [](Point p) { return Complex(0.0, p[0] * p[0] * p[0]); };
    } else if (name == "harmonic") {
        s.dimension = 3;
        s.q0 = [](Point p) { return Complex(p[0] * p[0] + p[1] * p[1] + p[2] * p[2], 0.0); };
        DeclaredBounds d;
        d.shift = Complex(-1.0, 0.0);
        d.theta = 0.0;
        s.declared = d;
    } else if (name == "rotated_harmonic" || name == "rotated_harmonic(1+3i)") {
        s.dimension = 2;
        s.q0 = [](Point p) { return Complex(1.0, 3.0) * (p[0] * p[0] + p[1] * p[1]); };
        DeclaredBounds d;
        d.shift = Complex(-1.0, 0.0);
        d.theta = std::atan(3.0) + 1e-9;
        s.declared = d;
    } else if (name == "ix3_minus_x2") {
        // Q = ix^3 - x^2 split as Q0 = ix^3, U = x^2 (so U Re Q0 = 0).
        s.q0 = [](Point p) { return Complex(0.0, p[0] * p[0] * p[0]); };
        s.u = [](Point p) { return p[0] * p[0]; };
    } else if (name == "ix3_damped") {
        s.q0 = [](Point p) { return Complex(0.0, p[0] * p[0] * p[0]); };
        s.u = [](Point p) { return 0.5 * std::abs(p[0] * p[0] * p[0]); };
        DeclaredBounds d;
        d.a_u = 0.0;
        d.b_u = 0.25;
        s.declared = d;
    } else if (name == "shifted_complex_harmonic_delta") {
        // Q = (1+i)x^2 + 1 + i delta(x)
        s.q0 = [](Point p) { return Complex(1.0, 1.0) * (p[0] * p[0]) + 1.0; };
        s.w_kind = WDelta{0.0, Complex(0.0, 1.0)};
        DeclaredBounds d;
        d.theta = kPi / 4;
        d.c0 = 1.0;
        s.declared = d;
    } else {
        throw ConfigError("unknown built-in potential '" + name + "'");
    }
    return s;
}

std::vector<std::string> builtin_potential_names() {
    return {"ix", "ix3", "harmonic", "rotated_harmonic", "ix3_minus_x2",
            "ix3_damped", "shifted_complex_harmonic_delta"};
}

// ---------------------------------------------------------------------------
// PlaneRegion
// ---------------------------------------------------------------------------

namespace {

// Distance from w to the closed sector {z: |arg z| <= theta0} around the origin.
double dist_to_sector(Complex w, double theta0) {
    double ang = std::abs(std::arg(w));
    if (ang <= theta0) return 0.0;
    // nearest boundary ray is arg = +-theta0; rotate onto the positive real axis
    Complex r = w * std::polar(1.0, w.imag() >= 0 ? -theta0 : theta0);
    if (r.real() >= 0) return std::abs(r.imag());
    return std::abs(r);
}

}  // namespace

bool PlaneRegion::member(Complex lambda) const {
    double re = lambda.real(), im = lambda.imag();
    switch (kind) {
        case Kind::SectorR: {
            double sb = std::sqrt(b_prime);
            if (!(re < -m_tr * m_tr - a / (1.0 - sb))) return false;
            return std::abs(im) < (1.0 - sb) / sb * std::abs(re + m_tr * m_tr) - a / sb;
        }
        case Kind::HyperbolicRtilde: {
            double k = (1.0 - b_prime) / (2.0 + b_prime);
            if (!(re < -std::sqrt(a / k))) return false;
            return im * im < k * re * re - a;
        }
        case Kind::UniformSectorComplement:
            return std::abs(std::arg(lambda - mu0)) > theta0;
        case Kind::LeftHalfPlane:
            return re < c;
    }
    return false;
}

double PlaneRegion::resolvent_bound(Complex lambda) const {
    if (!member(lambda)) return kInf;
    double re = lambda.real(), im = lambda.imag();
    switch (kind) {
        case Kind::SectorR: {
            double sb = std::sqrt(b_prime);
            double den = (1.0 - sb) * std::abs(re + m_tr * m_tr) - sb * std::abs(im) - a;
            return den > 0 ? 1.0 / den : kInf;
        }
        case Kind::HyperbolicRtilde:
            // the explicit bound is d(b')/|Re lambda| with d(b') not computable
            // from the decomposition; normalized to d = 1 here
            return 1.0 / std::abs(re);
        case Kind::UniformSectorComplement: {
            double den = dist_to_sector(lambda - mu0, theta0);
            return den > 0 ? 1.0 / den : kInf;
        }
        case Kind::LeftHalfPlane:
            return 1.0 / (c - re);
    }
    return kInf;
}

PlaneRegion sector_region(double b_prime, double a_wu, double m_tr) {
    if (!(b_prime > 0.0 && b_prime < 1.0)) throw InvalidParameter("b' must lie in (0,1)");
    if (a_wu < 0 || m_tr < 0) throw InvalidParameter("a and m_tr must be >= 0");
    PlaneRegion r;
    r.kind = PlaneRegion::Kind::SectorR;
    r.b_prime = b_prime;
    r.a = a_wu;
    r.m_tr = m_tr;
    return r;
}

PlaneRegion hyperbolic_region(double b_prime, double a_tilde) {
    if (!(b_prime > 0.0 && b_prime < 1.0)) throw InvalidParameter("b' must lie in (0,1)");
    if (a_tilde < 0) throw InvalidParameter("a~ must be >= 0");
    PlaneRegion r;
    r.kind = PlaneRegion::Kind::HyperbolicRtilde;
    r.b_prime = b_prime;
    r.a = a_tilde;
    return r;
}

PlaneRegion uniform_sector_complement(Complex mu0, double theta0) {
    if (!(theta0 >= 0.0 && theta0 < kPi / 2)) throw InvalidParameter("theta0 must lie in [0,pi/2)");
    PlaneRegion r;
    r.kind = PlaneRegion::Kind::UniformSectorComplement;
    r.mu0 = mu0;
    r.theta0 = theta0;
    return r;
}

PlaneRegion left_half_plane(double c) {
    PlaneRegion r;
    r.kind = PlaneRegion::Kind::LeftHalfPlane;
    r.c = c;
    return r;
}

// ---------------------------------------------------------------------------
// Assumption checks
// ---------------------------------------------------------------------------

std::vector<Point> SampleBox::points(int dimension) const {
    if (resolution < 2) throw InvalidParameter("sample resolution must be >= 2");
    std::vector<Point> pts;
    auto coord = [&](int axis, int i) {
        return lo[axis] + (hi[axis] - lo[axis]) * static_cast<double>(i) / (resolution - 1);
    };
    if (dimension == 1) {
        pts.reserve(resolution);
        for (int i = 0; i < resolution; ++i) pts.push_back(Point{coord(0, i), 0, 0});
    } else if (dimension == 2) {
        for (int i = 0; i < resolution; ++i)
            for (int j = 0; j < resolution; ++j) pts.push_back(Point{coord(0, i), coord(1, j), 0});
    } else {
        for (int i = 0; i < resolution; ++i)
            for (int j = 0; j < resolution; ++j)
                for (int k = 0; k < resolution; ++k)
                    pts.push_back(Point{coord(0, i), coord(1, j), coord(2, k)});
    }
    if (exclude_radius > 0) {
        std::erase_if(pts, [&](const Point& p) { return norm2(p) < exclude_radius; });
    }
    return pts;
}

SectorialityResult sectoriality_angle(const PotentialSpec& spec,
                                      const std::vector<Point>& samples,
                                      std::optional<Complex> shift) {
    if (samples.empty()) throw EmptySamples("sectoriality_angle");
    Complex mu = shift.value_or(spec.declared ? spec.declared->shift : Complex(0, 0));
    SectorialityResult out;
    out.theta = 0;
    out.c0 = kInf;
    for (const auto& p : samples) {
        Complex v = spec.q0(p) - mu;
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteEvaluation("q0 at sample");
        out.c0 = std::min(out.c0, v.real());
        if (v.real() <= 0.0) {
            if (v.imag() != 0.0) {
                out.theta = kPi / 2;  // sentinel: not sectorial around the shift
                continue;
            }
            continue;  // on the non-positive real axis: contributes no angle
        }
        out.theta = std::max(out.theta, std::atan(std::abs(v.imag()) / v.real()));
    }
    return out;
}

EnvelopeFit fit_upper_envelope(const std::vector<double>& z, const std::vector<double>& y) {
    if (z.size() != y.size() || z.empty()) throw EmptySamples("fit_upper_envelope");
    const size_t n = z.size();
    // Upper convex hull of (z, y), left to right.
    std::vector<std::pair<double, double>> pts(n);
    for (size_t i = 0; i < n; ++i) pts[i] = {z[i], y[i]};
    std::sort(pts.begin(), pts.end());
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
            if (cross >= 0) hull.pop_back();  // keep upper-left turns only
            else break;
        }
        if (!hull.empty() && hull.back().first == p.first) {
            if (p.second > hull.back().second) hull.back() = p;
            continue;
        }
        hull.push_back(p);
    }

    double sz = 0, sy = 0;
    for (size_t i = 0; i < n; ++i) { sz += z[i]; sy += y[i]; }

    double best = kInf;
    EnvelopeFit fit;
    auto consider = [&](double a, double b) {
        if (!(a >= -1e-15 && b >= -1e-15)) return;
        a = std::max(a, 0.0);
        b = std::max(b, 0.0);
        for (const auto& h : hull)
            if (a + b * h.first < h.second - 1e-12 * (1 + std::abs(h.second))) return;
        double obj = a * static_cast<double>(n) + b * sz - sy;
        if (obj < best) { best = obj; fit = {a, b}; }
    };
    // hull edges
    for (size_t i = 0; i + 1 < hull.size(); ++i) {
        double z0 = hull[i].first, y0 = hull[i].second;
        double z1 = hull[i + 1].first, y1 = hull[i + 1].second;
        double b = (y1 - y0) / (z1 - z0);
        consider(y0 - b * z0, b);
    }
    // b = 0: flat line at the maximum
    double ymax = 0;
    for (const auto& h : hull) ymax = std::max(ymax, h.second);
    consider(ymax, 0.0);
    // a = 0: steepest ray through the origin
    double bmin = 0;
    bool feasible0 = true;
    for (const auto& h : hull) {
        if (h.first <= 0) {
            if (h.second > 0) feasible0 = false;
            continue;
        }
        bmin = std::max(bmin, h.second / h.first);
    }
    if (feasible0) consider(0.0, bmin);
    if (!std::isfinite(best)) throw NonConvergence("fit_upper_envelope: no feasible envelope");
    return fit;
}

namespace {

// min |Q0| on concentric shells of the sampled region; violation if the shell
// minima fail to grow toward the boundary.
std::vector<double> growth_shells(const PotentialSpec& spec, const std::vector<Point>& pts,
                                  std::vector<AssumptionViolation>& violations,
                                  const char* label) {
    double rmax = 0;
    for (const auto& p : pts) rmax = std::max(rmax, norm2(p));
    const int nshell = 8;
    std::vector<double> shell_min(nshell, kInf);
    std::vector<Point> shell_arg(nshell, Point{0, 0, 0});
    for (const auto& p : pts) {
        int k = std::min(nshell - 1, static_cast<int>(norm2(p) / rmax * nshell));
        double v = std::abs(spec.q0(p));
        if (v < shell_min[k]) { shell_min[k] = v; shell_arg[k] = p; }
    }
    while (!shell_min.empty() && !std::isfinite(shell_min.back())) shell_min.pop_back();
    for (size_t k = 1; k < shell_min.size(); ++k) {
        if (shell_min[k] < shell_min[k - 1] - 1e-12 * (1 + shell_min[k - 1])) {
            violations.push_back({std::string(label) + " growth of |Q0|", shell_arg[k], shell_min[k]});
            break;
        }
    }
    if (shell_min.size() >= 2 && !(shell_min.back() > shell_min.front()))
        violations.push_back({std::string(label) + " growth of |Q0|", shell_arg.back(), shell_min.back()});
    return shell_min;
}

}  // namespace

AssumptionReport verify_assumptions(const PotentialSpec& spec, AssumptionCase which,
                                    const SampleBox& box) {
    spec.validate();
    auto pts = box.points(spec.dimension);
    if (pts.empty()) throw EmptySamples("verify_assumptions");
    AssumptionReport rep;
    rep.which_case = which;

    for (const auto& p : pts) {
        Complex v = spec.q0(p);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteEvaluation("q0 non-finite at sample");
    }

    if (which == AssumptionCase::I_sectorial) {
        auto sec = sectoriality_angle(spec, pts);
        rep.measured.theta_hat = sec.theta;
        rep.measured.c0_hat = sec.c0;
        double theta_max = spec.declared && spec.declared->theta ? *spec.declared->theta
                                                                 : kPi / 2 - 1e-12;
        if (!(sec.theta <= theta_max + 1e-12))
            rep.violations.push_back({"2.1.i sectoriality semi-angle", {0, 0, 0}, sec.theta});
        if (!(sec.c0 > 0))
            rep.violations.push_back({"2.1.i Re(Q0 - mu) >= c0 > 0", {0, 0, 0}, sec.c0});
        rep.measured.growth_witness = growth_shells(spec, pts, rep.violations, "2.1.ii");
    } else {
        // Re Q0 >= 0 and U Re Q0 = 0
        double scale = 0;
        for (const auto& p : pts) scale = std::max(scale, std::abs(spec.q0(p)));
        for (const auto& p : pts) {
            Complex v = spec.q0(p);
            if (v.real() < -1e-12 * (1 + scale)) {
                rep.violations.push_back({"2.2 Re Q0 >= 0", p, v.real()});
                break;
            }
        }
        if (spec.u) {
            for (const auto& p : pts) {
                double uv = spec.u(p);
                if (uv < -1e-12) {
                    rep.violations.push_back({"2.2 U >= 0", p, uv});
                    break;
                }
                double prod = uv * spec.q0(p).real();
                if (std::abs(prod) > 1e-9 * (1 + scale) * (1 + scale)) {
                    rep.violations.push_back({"2.2 U Re Q0 = 0", p, prod});
                    break;
                }
            }
        }

        // gradient bound |grad Q0|^2 <= a + b |Q0|^2 via central differences
        {
            std::vector<double> zz, yy;
            zz.reserve(pts.size());
            yy.reserve(pts.size());
            double h = 0;
            for (int ax = 0; ax < spec.dimension; ++ax)
                h = std::max(h, (box.hi[ax] - box.lo[ax]) / (box.resolution - 1));
            h *= 0.5;
            for (const auto& p : pts) {
                double g2 = 0;
                for (int ax = 0; ax < spec.dimension; ++ax) {
                    Point pp = p, pm = p;
                    pp[ax] += h;
                    pm[ax] -= h;
                    Complex d = (spec.q0(pp) - spec.q0(pm)) / (2 * h);
                    g2 += std::norm(d);
                }
                zz.push_back(std::norm(spec.q0(p)));
                yy.push_back(g2);
            }
            auto fit = fit_upper_envelope(zz, yy);
            rep.measured.a_grad_hat = fit.a;
            rep.measured.b_grad_hat = fit.b;
            if (spec.declared && spec.declared->a_grad && spec.declared->b_grad) {
                for (size_t i = 0; i < pts.size(); ++i) {
                    double bound = *spec.declared->a_grad + *spec.declared->b_grad * zz[i];
                    if (yy[i] > bound * (1 + 1e-9) + 1e-9) {
                        rep.violations.push_back({"2.2.i declared gradient bound", pts[i], yy[i]});
                        break;
                    }
                }
            }
        }

        // U^2 <= a_U + b_U |Im Q0|^2, with b_U >= 1 flagged
        if (spec.u) {
            std::vector<double> zz, yy;
            for (const auto& p : pts) {
                double uv = spec.u(p);
                zz.push_back(std::norm(Complex(0.0, spec.q0(p).imag())));
                yy.push_back(uv * uv);
            }
            auto fit = fit_upper_envelope(zz, yy);
            rep.measured.a_u_hat = fit.a;
            rep.measured.b_u_hat = fit.b;
            if (fit.b >= 1.0)
                rep.violations.push_back({"2.2 b_U >= 1 (compactness lost)", {0, 0, 0}, fit.b});
        }

        rep.measured.growth_witness = growth_shells(spec, pts, rep.violations, "2.2.ii");
    }

    rep.passed = rep.violations.empty();
    return rep;
}

double completeness_threshold(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw OutOfRange("alpha must lie in [0,1)");
    double b = alpha * alpha;
    double theta;
    if (b == 0.0) {
        theta = kPi / 2;
    } else {
        double s1 = (1.0 - std::sqrt(b)) / std::sqrt(b);
        double s2 = std::sqrt((1.0 - b) / (2.0 + b));
        theta = std::atan(std::max(s1, s2));
    }
    return 2.0 * (kPi / theta - 1.0);
}

}  // namespace spexact
