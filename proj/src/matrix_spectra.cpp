#include "spexact/matrix_spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

namespace spexact {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void BandedOperator::mul(const Complex* x, Complex* y) const {
    for (int i = 0; i < n; ++i) {
        Complex v = diag[i] * x[i];
        if (i > 0) v += sub[i - 1] * x[i - 1];
        if (i + 1 < n) v += super[i] * x[i + 1];
        y[i] = v;
    }
}

BandedOperator discretize(const TruncatedProblem& p, int n) {
    p.validate();
    if (n < 16) throw MeshTooCoarse("need n >= 16");
    const bool origin = p.regular_origin();
    const bool left_robin =
        !origin && p.left_bc->kind == BoundaryCondition::Kind::Robin;
    const bool right_robin = p.right_bc.kind == BoundaryCondition::Kind::Robin;

    BandedOperator A;
    A.n = n;
    A.nodes.resize(n);

    double h;
    if (origin) {
        // mesh offset by h/2 from r = 0
        h = right_robin ? p.right / (n - 0.5) : p.right / (n + 0.5);
        for (int i = 0; i < n; ++i) A.nodes[i] = (i + 0.5) * h;
    } else {
        int intervals = (left_robin ? 0 : 1) + (right_robin ? 0 : 1) + (n - 1);
        h = (p.right - p.left) / intervals;
        double x0 = left_robin ? p.left : p.left + h;
        for (int i = 0; i < n; ++i) A.nodes[i] = x0 + i * h;
    }
    A.h = h;

    auto q = p.form.q;
    auto qeff = [&](double x) -> Complex {
        Complex v = q(x);
        switch (p.form.kind) {
            case OdeForm::Kind::Cartesian: break;
            case OdeForm::Kind::Radial2d: v += static_cast<double>(p.form.l) * p.form.l / (x * x); break;
            case OdeForm::Kind::Radial3d: v += static_cast<double>(p.form.l) * (p.form.l + 1) / (x * x); break;
        }
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFiniteCoefficient("q at node " + std::to_string(x));
        return v;
    };
    double c1 = p.form.kind == OdeForm::Kind::Radial2d ? 1.0
              : p.form.kind == OdeForm::Kind::Radial3d ? 2.0 : 0.0;

    const double ih2 = 1.0 / (h * h);
    A.diag.assign(n, Complex(0, 0));
    A.sub.assign(n - 1, Complex(0, 0));
    A.super.assign(n - 1, Complex(0, 0));
    for (int i = 0; i < n; ++i) {
        double x = A.nodes[i];
        double damp = c1 > 0 ? c1 / (2.0 * h * x) : 0.0;  // -(c1/x) f' central difference
        A.diag[i] = 2.0 * ih2 + qeff(x);
        if (i > 0) A.sub[i - 1] = -ih2 + damp;
        if (i + 1 < n) A.super[i] = -ih2 - damp;
    }

    if (origin) {
        // ghost node at -h/2 with parity (-1)^l of the regular branch
        double parity = (p.form.l % 2 == 0) ? 1.0 : -1.0;
        double x = A.nodes[0];
        double damp = c1 > 0 ? c1 / (2.0 * h * x) : 0.0;
        A.diag[0] += parity * (-ih2 + damp);
    } else if (left_robin) {
        // ghost elimination for -f'(l) + a f(l) = 0
        Complex a = p.left_bc->a;
        double x = A.nodes[0];
        double damp = c1 > 0 ? c1 / (2.0 * h * x) : 0.0;
        A.diag[0] += (-ih2 + damp) * (-2.0 * h * a);
        A.super[0] += (-ih2 + damp);
    }
    if (right_robin) {
        // ghost elimination for f'(s) + a f(s) = 0
        Complex a = p.right_bc.a;
        double x = A.nodes[n - 1];
        double damp = c1 > 0 ? c1 / (2.0 * h * x) : 0.0;
        A.diag[n - 1] += (-ih2 - damp) * (-2.0 * h * a);
        A.sub[n - 2] += (-ih2 - damp);
    }

    for (const auto& itf : p.interfaces) {
        int best = -1;
        double bd = kInf;
        for (int i = 0; i < n; ++i) {
            double d = std::abs(A.nodes[i] - itf.site);
            if (d < bd) { bd = d; best = i; }
        }
        if (bd > 0.5 * h + 1e-12)
            throw SiteOffMesh("delta site " + std::to_string(itf.site));
        A.diag[best] += itf.coupling / h;
    }

    A.meta = "fd2:" + std::to_string(n);
    return A;
}

// ---------------------------------------------------------------------------
// Tridiagonal LU with partial pivoting (fill-in: second superdiagonal).
// ---------------------------------------------------------------------------

namespace {

struct TriLU {
    int n = 0;
    std::vector<Complex> d0, d1, d2;  // U diagonals
    std::vector<Complex> l;           // multipliers
    std::vector<bool> swapped;
    int sign = 1;

    // factor B = A - shift I
    static TriLU factor(const BandedOperator& A, Complex shift) {
        TriLU f;
        int n = A.n;
        f.n = n;
        f.d0.resize(n);
        f.d1.assign(n, Complex(0, 0));
        f.d2.assign(n, Complex(0, 0));
        f.l.assign(n, Complex(0, 0));
        f.swapped.assign(n, false);
        std::vector<Complex> a(n), b(n), c(n);  // rows: sub, diag, super
        for (int i = 0; i < n; ++i) b[i] = A.diag[i] - shift;
        for (int i = 0; i + 1 < n; ++i) { a[i + 1] = A.sub[i]; c[i] = A.super[i]; }

        // working row representation: row i holds (d0, d1, d2)
        std::vector<Complex> r0(n), r1(n), r2(n);
        for (int i = 0; i < n; ++i) {
            r0[i] = b[i];
            r1[i] = (i + 1 < n) ? c[i] : Complex(0, 0);
            r2[i] = Complex(0, 0);
        }
        for (int k = 0; k + 1 < n; ++k) {
            Complex piv = r0[k];
            Complex below = a[k + 1];
            if (std::abs(below) > std::abs(piv)) {
                // swap row k with row k+1
                std::swap(piv, below);
                Complex nr1 = r0[k + 1], nr2 = r1[k + 1];
                r0[k + 1] = r1[k];
                r1[k + 1] = r2[k];
                r1[k] = nr1;
                r2[k] = nr2;
                r0[k] = piv;
                f.swapped[k] = true;
                f.sign = -f.sign;
                // after swap the eliminated entry is the old pivot row's leading coef
            }
            if (piv == Complex(0, 0)) throw PivotBreakdown("zero pivot at row " + std::to_string(k));
            Complex m = below / piv;
            f.l[k] = m;
            r0[k + 1] -= m * r1[k];
            r1[k + 1] -= m * r2[k];
            f.d0[k] = r0[k];
            f.d1[k] = r1[k];
            f.d2[k] = r2[k];
        }
        f.d0[n - 1] = r0[n - 1];
        f.d1[n - 1] = f.d2[n - 1] = Complex(0, 0);
        if (f.d0[n - 1] == Complex(0, 0)) throw PivotBreakdown("zero pivot at last row");
        return f;
    }

    // log|det| and arg(det)
    void det_log(double& log_abs, double& arg) const {
        log_abs = 0;
        arg = (sign < 0) ? kPi : 0.0;
        for (int i = 0; i < n; ++i) {
            log_abs += std::log(std::abs(d0[i]));
            arg += std::arg(d0[i]);
        }
        arg = std::remainder(arg, 2 * kPi);
    }

    // solve B x = rhs (in place); forward substitution mirrors the pivoted elimination
    void solve(std::vector<Complex>& x) const {
        for (int k = 0; k + 1 < n; ++k) {
            if (swapped[k]) std::swap(x[k], x[k + 1]);
            x[k + 1] -= l[k] * x[k];
        }
        for (int i = n - 1; i >= 0; --i) {
            Complex v = x[i];
            if (i + 1 < n) v -= d1[i] * x[i + 1];
            if (i + 2 < n) v -= d2[i] * x[i + 2];
            x[i] = v / d0[i];
        }
    }

    // solve B* x = rhs. With B = P^T L U (row swaps folded into the forward pass),
    // B* = U* L* P, so: U* y = rhs (forward, U* lower), L* z = y (backward with
    // the swap pattern replayed in reverse).
    void solve_adjoint(std::vector<Complex>& x) const {
        for (int i = 0; i < n; ++i) {
            Complex v = x[i];
            if (i >= 1) v -= std::conj(d1[i - 1]) * x[i - 1];
            if (i >= 2) v -= std::conj(d2[i - 2]) * x[i - 2];
            x[i] = v / std::conj(d0[i]);
        }
        for (int k = n - 2; k >= 0; --k) {
            x[k] -= std::conj(l[k]) * x[k + 1];
            if (swapped[k]) std::swap(x[k], x[k + 1]);
        }
    }
};

double vec_norm(const std::vector<Complex>& v) {
    double s = 0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

}  // namespace

// ---------------------------------------------------------------------------
// eigs_in_rect: determinant-phase winding + inverse iteration
// ---------------------------------------------------------------------------

namespace {

struct DetContour {
    const BandedOperator& A;
    const MatrixEigOptions& opts;
    std::map<std::pair<double, double>, double> cache;

    double arg_at(Complex z) {
        auto key = std::make_pair(z.real(), z.imag());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        TriLU f = TriLU::factor(A, z);
        double la, ar;
        f.det_log(la, ar);
        cache.emplace(key, ar);
        return ar;
    }

    // midpoint-verified phase walk (see the shooting contour for the rationale)
    double phase_inc(Complex z0, Complex z1, int depth) {
        double d = std::remainder(arg_at(z1) - arg_at(z0), 2 * kPi);
        Complex zm = 0.5 * (z0 + z1);
        double am = arg_at(zm);
        double d1 = std::remainder(am - arg_at(z0), 2 * kPi);
        double d2 = std::remainder(arg_at(z1) - am, 2 * kPi);
        if (std::abs(d1) < kPi / 2 && std::abs(d2) < kPi / 2 && std::abs(d1 + d2 - d) < 1e-6)
            return d1 + d2;
        if (depth >= opts.max_refine_depth)
            throw ZeroOnContour("det phase unresolvable near " +
                                std::to_string(0.5 * (z0.real() + z1.real())));
        return phase_inc(z0, zm, depth + 1) + phase_inc(zm, z1, depth + 1);
    }

    double walk(const Rect& r, int per_edge) {
        const Complex corners[5] = {{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi},
                                    {r.re_lo, r.im_hi}, {r.re_lo, r.im_lo}};
        std::vector<Complex> pts;
        for (int e = 0; e < 4; ++e)
            for (int i = 0; i < per_edge; ++i)
                pts.push_back(corners[e] +
                              (corners[e + 1] - corners[e]) * (static_cast<double>(i) / per_edge));
        pts.push_back(corners[0]);
        double total = 0;
        for (size_t i = 0; i + 1 < pts.size(); ++i) total += phase_inc(pts[i], pts[i + 1], 0);
        return total;
    }

    int winding(const Rect& r) {
        std::optional<int> prev;
        for (int per_edge = std::max(2, opts.samples_per_edge); per_edge <= 8192; per_edge *= 2) {
            double wnum = walk(r, per_edge) / (2 * kPi);
            int nw = static_cast<int>(std::lround(wnum));
            if (std::abs(wnum - nw) > 0.05)
                throw PhaseResolutionExceeded("det winding " + std::to_string(wnum));
            if (prev && *prev == nw) return nw;
            prev = nw;
        }
        throw PhaseResolutionExceeded("det winding did not stabilize");
    }
};

Complex rayleigh(const BandedOperator& A, const std::vector<Complex>& x) {
    std::vector<Complex> y(x.size());
    A.mul(x.data(), y.data());
    Complex num(0, 0);
    double den = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += y[i] * std::conj(x[i]);
        den += std::norm(x[i]);
    }
    return num / den;
}

Complex inverse_iterate(const BandedOperator& A, Complex shift, std::uint64_t seed, double tol) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> x(A.n);
    for (auto& z : x) z = Complex(u(rng), u(rng));
    double nx = vec_norm(x);
    for (auto& z : x) z /= nx;

    Complex mu = shift;
    Complex mu_prev = mu + 1.0;
    for (int it = 0; it < 60; ++it) {
        TriLU f = [&]() {
            try {
                return TriLU::factor(A, mu);
            } catch (const PivotBreakdown&) {
                return TriLU::factor(A, mu + 1e-12 * (1.0 + std::abs(mu)));
            }
        }();
        f.solve(x);
        double n2 = vec_norm(x);
        if (!(n2 > 0) || !std::isfinite(n2)) throw NonConvergence("inverse iteration blow-up");
        for (auto& z : x) z /= n2;
        mu_prev = mu;
        mu = rayleigh(A, x);
        if (std::abs(mu - mu_prev) < tol * (1.0 + std::abs(mu))) return mu;
    }
    return mu;  // best effort; caller re-checks the enclosing box
}

void matrix_find(DetContour& contour, Rect box, int count, const MatrixEigOptions& opts,
                 std::vector<std::pair<Complex, int>>& out, int depth) {
    const BandedOperator& A = contour.A;
    if (count == 0) return;
    double diam = box.diameter();
    if (count == 1 && diam <= opts.newton_diameter) {
        Complex mu = inverse_iterate(A, box.center(), opts.seed, opts.tol);
        if (box.expanded(0.05 * diam).contains(mu) || diam < 1e3 * opts.tol) {
            out.emplace_back(mu, 1);
            return;
        }
    } else if (diam < 10 * std::max(opts.tol, 1e-13)) {
        out.emplace_back(box.center(), count);
        return;
    }
    if (depth > 120) throw NonConvergence("matrix eig subdivision exhausted");

    const bool split_re = box.width() >= box.height();
    const double lo = split_re ? box.re_lo : box.im_lo;
    const double len = split_re ? box.width() : box.height();
    for (double frac : {0.5, 0.52, 0.48, 0.54, 0.44, 0.58}) {
        double mid = lo + frac * len;
        Rect first = box, second = box;
        if (split_re) { first.re_hi = mid; second.re_lo = mid; }
        else { first.im_hi = mid; second.im_lo = mid; }
        int n1;
        try {
            n1 = contour.winding(first);
        } catch (const ZeroOnContour&) {
            continue;
        } catch (const PhaseResolutionExceeded&) {
            continue;
        } catch (const PivotBreakdown&) {
            continue;
        }
        matrix_find(contour, first, n1, opts, out, depth + 1);
        matrix_find(contour, second, count - n1, opts, out, depth + 1);
        return;
    }
    throw NonConvergence("matrix eig: no clear split line");
}

}  // namespace

std::vector<std::pair<Complex, int>> eigs_in_rect(const BandedOperator& A, const Rect& rect,
                                                  const MatrixEigOptions& opts) {
    DetContour contour{A, opts, {}};
    int total = contour.winding(rect);
    std::vector<std::pair<Complex, int>> out;
    matrix_find(contour, rect, total, opts, out, 0);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    return out;
}

ResolventNorm resolvent_norm(const BandedOperator& A, Complex lambda,
                             const ResolventOptions& opts) {
    TriLU f;
    try {
        f = TriLU::factor(A, lambda);
    } catch (const PivotBreakdown&) {
        return {kInf, true};
    }
    std::mt19937_64 rng(opts.seed ^ std::hash<double>{}(lambda.real()) ^
                        (std::hash<double>{}(lambda.imag()) << 1));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Complex> x(A.n);
    for (auto& z : x) z = Complex(u(rng), u(rng));
    double nx = vec_norm(x);
    for (auto& z : x) z /= nx;

    // power iteration on (B* B)^{-1} = B^{-1} B^{-*}: x -> right singular vector
    double smin_prev = kInf;
    bool converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
        f.solve_adjoint(x);
        f.solve(x);
        double ny = vec_norm(x);
        if (!(ny > 0) || !std::isfinite(ny)) return {kInf, true};
        for (auto& z : x) z /= ny;
        double smin = 1.0 / std::sqrt(ny);
        if (std::abs(smin - smin_prev) <= opts.rel_tol * smin) {
            converged = true;
            smin_prev = smin;
            break;
        }
        smin_prev = smin;
    }
    // refine: smin = ||B x|| on the converged singular-vector estimate
    std::vector<Complex> bx(A.n);
    A.mul(x.data(), bx.data());
    for (int i = 0; i < A.n; ++i) bx[i] -= lambda * x[i];
    double smin = vec_norm(bx);
    if (smin == 0.0) return {kInf, converged};
    return {1.0 / smin, converged};
}

Complex PseudospectrumGrid::grid_point(int i, int j) const {
    double re = nx > 1 ? rect.re_lo + rect.width() * i / (nx - 1) : rect.center().real();
    double im = ny > 1 ? rect.im_lo + rect.height() * j / (ny - 1) : rect.center().imag();
    return {re, im};
}

PseudospectrumGrid pseudospectrum(const BandedOperator& A, const Rect& rect, int nx, int ny,
                                  std::vector<double> eps_levels, const ResolventOptions& opts) {
    if (nx < 8 || ny < 8) throw InvalidParameter("pseudospectrum grid needs nx, ny >= 8");
    PseudospectrumGrid g;
    g.rect = rect;
    g.nx = nx;
    g.ny = ny;
    std::sort(eps_levels.begin(), eps_levels.end());
    g.eps_levels = std::move(eps_levels);
    g.smin.resize(static_cast<size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            ResolventNorm rn = resolvent_norm(A, g.grid_point(i, j), opts);
            g.smin[static_cast<size_t>(j) * nx + i] = rn.value == kInf ? 0.0 : 1.0 / rn.value;
        }
    }
    g.level_sets.resize(g.eps_levels.size());
    for (size_t k = 0; k < g.eps_levels.size(); ++k) {
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (g.at(i, j) < g.eps_levels[k]) g.level_sets[k].push_back(g.grid_point(i, j));
    }
    return g;
}

AttouchWets attouch_wets(const std::vector<Complex>& set_a, const std::vector<Complex>& set_b,
                         const std::vector<double>& radii) {
    if (set_a.empty() || set_b.empty()) throw EmptySet("attouch_wets");
    for (double r : radii)
        if (!(r > 0)) throw InvalidParameter("radii must be positive");
    auto dist_to = [](Complex z, const std::vector<Complex>& s) {
        double best = kInf;
        for (const auto& w : s) best = std::min(best, std::abs(z - w));
        return best;
    };
    AttouchWets out;
    for (double rho : radii) {
        double d = 0;
        for (const auto& z : set_a)
            if (std::abs(z) <= rho) d = std::max(d, dist_to(z, set_b));
        for (const auto& z : set_b)
            if (std::abs(z) <= rho) d = std::max(d, dist_to(z, set_a));
        out.per_rho.push_back(d);
        out.max = std::max(out.max, d);
    }
    return out;
}

}  // namespace spexact
