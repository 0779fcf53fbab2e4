#include "spexact/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace spexact {

void TruncatedProblem::validate() const {
    if (!(left < right)) throw InvalidParameter("interval must satisfy left < right");
    if (form.radial() && left < 0) throw InvalidParameter("radial interval needs left >= 0");
    if (regular_origin()) {
        if (!form.radial() || left != 0.0)
            throw InvalidParameter("regular_origin requires a radial form with left = 0");
    }
    double prev = left;
    for (const auto& itf : interfaces) {
        if (!(itf.site > left && itf.site < right))
            throw InvalidParameter("interface site must be strictly interior");
        if (!(itf.site > prev)) throw InvalidParameter("interface sites must be sorted");
        prev = itf.site;
    }
}

namespace {

double matching_point(const TruncatedProblem& p, const ShootOptions& opts) {
    if (opts.matching_point) {
        double xm = *opts.matching_point;
        if (!(xm > p.left && xm < p.right))
            throw InvalidParameter("matching point outside the interval");
        return xm;
    }
    return 0.5 * (p.left + p.right);
}

ScaledState left_start(const TruncatedProblem& p, Complex lambda, double& x0) {
    if (p.regular_origin()) {
        double r0 = std::min(1e-3, p.right * 1e-3);
        x0 = r0;
        return radial_series_start(p.form, lambda, r0);
    }
    x0 = p.left;
    if (p.left_bc->kind == BoundaryCondition::Kind::Dirichlet)
        return {Complex(0, 0), Complex(1, 0), 0.0};
    return ScaledState::normalized(Complex(1, 0), p.left_bc->a);
}

ScaledState right_start(const TruncatedProblem& p, Complex) {
    if (p.right_bc.kind == BoundaryCondition::Kind::Dirichlet)
        return {Complex(0, 0), Complex(1, 0), 0.0};
    return ScaledState::normalized(Complex(1, 0), -p.right_bc.a);
}

}  // namespace

MissDistance miss_distance(const TruncatedProblem& p, Complex lambda, const ShootOptions& opts) {
    p.validate();
    const double xm = matching_point(p, opts);
    const double tol = opts.integ_tol;

    double x = 0;
    ScaledState L = left_start(p, lambda, x);
    for (const auto& itf : p.interfaces) {
        if (itf.site <= x || itf.site >= xm) continue;
        L = integrate(p.form, lambda, x, itf.site, L, tol);
        L.derivative += itf.coupling * L.value;  // f'(site+) = f'(site-) + c f(site)
        x = itf.site;
    }
    L = integrate(p.form, lambda, x, xm, L, tol);
    // a site exactly at the matching point belongs to the left solution
    for (const auto& itf : p.interfaces)
        if (itf.site == xm) L.derivative += itf.coupling * L.value;

    x = p.right;
    ScaledState R = right_start(p, lambda);
    for (auto it = p.interfaces.rbegin(); it != p.interfaces.rend(); ++it) {
        if (it->site >= x || it->site <= xm) continue;
        R = integrate(p.form, lambda, x, it->site, R, tol);
        R.derivative -= it->coupling * R.value;  // crossing downward
        x = it->site;
    }
    R = integrate(p.form, lambda, x, xm, R, tol);

    return {L.value * R.derivative - L.derivative * R.value, L.log_scale + R.log_scale};
}

namespace {

struct Contour {
    const TruncatedProblem& p;
    ShootOptions opts;
    std::map<std::pair<double, double>, Complex> cache;
    double floor;

    Contour(const TruncatedProblem& p_, const ShootOptions& o)
        : p(p_), opts(o), floor(1e-3 * o.winding_tol) {
        opts.integ_tol = o.winding_tol;
    }

    Complex eval(Complex z) {
        auto key = std::make_pair(z.real(), z.imag());
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        MissDistance md = miss_distance(p, z, opts);
        if (std::abs(md.w) < floor)
            throw ZeroOnContour("at " + std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                                std::to_string(z.imag()) + "i");
        cache.emplace(key, md.w);
        return md.w;
    }

    // midpoint-verified phase walk: accepting on the endpoint increment alone
    // can alias a near-2pi rotation to ~0, so every acceptance is confirmed by
    // the half-segment increments summing to the direct one
    double phase_inc(Complex z0, Complex z1, int depth) {
        double d = std::arg(eval(z1) / eval(z0));
        Complex zm = 0.5 * (z0 + z1);
        double d1 = std::arg(eval(zm) / eval(z0));
        double d2 = std::arg(eval(z1) / eval(zm));
        if (std::abs(d1) < kPi / 2 && std::abs(d2) < kPi / 2 && std::abs(d1 + d2 - d) < 1e-6)
            return d1 + d2;
        if (depth >= opts.max_refine_depth)
            throw ZeroOnContour("unresolvable phase near " +
                                std::to_string(0.5 * (z0.real() + z1.real())));
        return phase_inc(z0, zm, depth + 1) + phase_inc(zm, z1, depth + 1);
    }

    double walk(const Rect& r, int per_edge) {
        std::vector<Complex> pts;
        const Complex corners[5] = {{r.re_lo, r.im_lo}, {r.re_hi, r.im_lo}, {r.re_hi, r.im_hi},
                                    {r.re_lo, r.im_hi}, {r.re_lo, r.im_lo}};
        for (int e = 0; e < 4; ++e)
            for (int i = 0; i < per_edge; ++i)
                pts.push_back(corners[e] + (corners[e + 1] - corners[e]) *
                              (static_cast<double>(i) / per_edge));
        pts.push_back(corners[0]);
        double total = 0;
        for (size_t i = 0; i + 1 < pts.size(); ++i) total += phase_inc(pts[i], pts[i + 1], 0);
        return total;
    }

    // a steadily spinning W can fool any single sampling level, but not two
    // consecutive dyadic levels; densify until the winding integer repeats
    int winding(const Rect& r) {
        int per_edge = std::max(2, opts.samples_per_edge);
        std::optional<int> prev;
        for (; per_edge <= 4096; per_edge *= 2) {
            double total = walk(r, per_edge);
            double wnum = total / (2 * kPi);
            int n = static_cast<int>(std::lround(wnum));
            if (std::abs(wnum - n) > 0.05)
                throw PhaseResolutionExceeded("winding " + std::to_string(wnum) +
                                              " not integral");
            if (prev && *prev == n) return n;
            prev = n;
        }
        throw PhaseResolutionExceeded("winding did not stabilize under densification");
    }
};

struct Polisher {
    const TruncatedProblem& p;
    ShootOptions opts;

    // Newton on F(lambda) = w e^{log_scale - ref}, analytic in lambda.
    EigenRecord polish(Complex lam, double tol, int maxit = 40) const {
        double ref = 0;
        bool have_ref = false;
        Complex lam_cur = lam;
        for (int it = 0; it < maxit; ++it) {
            MissDistance md = miss_distance(p, lam_cur, opts);
            if (!have_ref) { ref = md.log_scale; have_ref = true; }
            Complex F = md.w * std::exp(std::min(md.log_scale - ref, 300.0));
            double d = 1e-6 * (1.0 + std::abs(lam_cur));
            MissDistance mp = miss_distance(p, lam_cur + d, opts);
            MissDistance mm = miss_distance(p, lam_cur - d, opts);
            Complex Fp = (mp.w * std::exp(std::min(mp.log_scale - ref, 300.0)) -
                          mm.w * std::exp(std::min(mm.log_scale - ref, 300.0))) /
                         (2.0 * d);
            if (Fp == Complex(0, 0)) break;
            Complex step = F / Fp;
            lam_cur -= step;
            if (std::abs(step) < tol * (1.0 + std::abs(lam_cur))) {
                MissDistance fin = miss_distance(p, lam_cur, opts);
                // residual relative to the local Wronskian slope
                double scale = std::abs(Fp) * (1.0 + std::abs(lam_cur)) *
                               std::exp(std::min(ref - fin.log_scale, 300.0));
                return {lam_cur, 1, std::abs(fin.w) / std::max(scale, 1e-300), 0.0};
            }
        }
        throw NonConvergence("newton polish near " + std::to_string(lam.real()));
    }
};

void find_in_box(Contour& contour, Rect box, double tol, const ShootOptions& opts, int count,
                 std::vector<EigenRecord>& out, int depth) {
    if (count == 0) return;
    const double diam = box.diameter();
    const double tol_box = std::max(tol, 1e-13);
    if (count >= 1 && diam <= opts.newton_diameter) {
        if (count == 1) {
            Polisher pol{contour.p, opts};
            try {
                EigenRecord rec = pol.polish(box.center(), tol);
                double slack = 0.05 * diam;
                Rect slackbox = box.expanded(slack);
                if (slackbox.contains(rec.lambda) || diam < 1e4 * tol_box) {
                    out.push_back(rec);
                    return;
                }
            } catch (const NonConvergence&) {
                if (diam < 1e4 * tol_box) throw;
            }
            // escaped or stalled: keep bisecting toward the zero
        } else if (diam < tol_box * 10) {
            // clustered zero: report the winding as multiplicity at the center
            out.push_back({box.center(), count, std::numeric_limits<double>::quiet_NaN(), 0.0});
            return;
        }
    }
    if (depth > 120) throw NonConvergence("find_eigenvalues: subdivision depth exhausted");

    const bool split_re = box.width() >= box.height();
    const double lo = split_re ? box.re_lo : box.im_lo;
    const double hi = split_re ? box.re_hi : box.im_hi;
    const double len = hi - lo;
    for (double frac : {0.5, 0.52, 0.48, 0.54, 0.44, 0.58}) {
        double mid = lo + frac * len;
        Rect first = box, second = box;
        if (split_re) { first.re_hi = mid; second.re_lo = mid; }
        else { first.im_hi = mid; second.im_lo = mid; }
        int n1;
        try {
            n1 = contour.winding(first);
        } catch (const ZeroOnContour&) {
            continue;  // split line too close to a zero; nudge it
        } catch (const PhaseResolutionExceeded&) {
            continue;
        }
        find_in_box(contour, first, tol, opts, n1, out, depth + 1);
        find_in_box(contour, second, tol, opts, count - n1, out, depth + 1);
        return;
    }
    throw NonConvergence("could not place a clear split line in box");
}

}  // namespace

int count_eigenvalues(const TruncatedProblem& p, const Rect& rect, const ShootOptions& opts) {
    p.validate();
    if (!(rect.width() > 0 && rect.height() > 0)) throw InvalidParameter("empty rectangle");
    Contour contour(p, opts);
    return contour.winding(rect);
}

std::vector<EigenRecord> find_eigenvalues(const TruncatedProblem& p, const Rect& rect,
                                          double tol, const ShootOptions& opts) {
    if (!(tol > 0)) throw InvalidParameter("tol must be positive");
    p.validate();
    if (!(rect.width() > 0 && rect.height() > 0)) throw InvalidParameter("empty rectangle");
    Contour contour(p, opts);
    int total = contour.winding(rect);
    std::vector<EigenRecord> out;
    find_in_box(contour, rect, tol, opts, total, out, 0);
    std::sort(out.begin(), out.end(), [](const EigenRecord& a, const EigenRecord& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

SampledFunction eigenfunction(const TruncatedProblem& p, Complex lambda, int resolution,
                              const ShootOptions& opts) {
    p.validate();
    if (resolution < 8) throw InvalidParameter("resolution too small");
    {
        MissDistance md = miss_distance(p, lambda, opts);
        if (std::abs(md.w) > 1e-4)
            throw NotAnEigenvalue("miss distance " + std::to_string(std::abs(md.w)));
    }
    const double xm = matching_point(p, opts);
    const double tol = opts.integ_tol;

    SampledFunction out;
    out.x.resize(resolution);
    out.phi.assign(resolution, Complex(0, 0));
    std::vector<double> logs(resolution, 0.0);
    out.h = (p.right - p.left) / (resolution - 1);
    for (int i = 0; i < resolution; ++i) out.x[i] = p.left + out.h * i;

    // integrate st from a toward b applying jumps at sites in (a, b]
    auto crossings = [&](double a, double b, ScaledState& st, bool leftward) {
        for (const auto& itf : p.interfaces) {
            bool inside = leftward ? (itf.site < a && itf.site >= b)
                                   : (itf.site > a && itf.site <= b);
            if (!inside) continue;
            st = integrate(p.form, lambda, a, itf.site, st, tol);
            if (leftward) st.derivative -= itf.coupling * st.value;
            else st.derivative += itf.coupling * st.value;
            a = itf.site;
        }
        return a;
    };

    // left sweep up to the last grid point before xm
    double x0 = 0;
    ScaledState L = left_start(p, lambda, x0);
    double x = x0;
    int i = 0;
    for (; i < resolution && out.x[i] <= xm; ++i) {
        double target = std::max(out.x[i], x0);
        double from = crossings(x, target, L, false);
        L = integrate(p.form, lambda, from, target, L, tol);
        x = target;
        out.phi[i] = L.value;
        logs[i] = L.log_scale;
    }
    double from = crossings(x, xm, L, false);
    ScaledState Lm = integrate(p.form, lambda, from, xm, L, tol);

    // right sweep down to xm
    ScaledState R = right_start(p, lambda);
    x = p.right;
    std::vector<std::pair<int, ScaledState>> right_samples;
    for (int j = resolution - 1; j >= i; --j) {
        double from_r = crossings(x, out.x[j], R, true);
        R = integrate(p.form, lambda, from_r, out.x[j], R, tol);
        x = out.x[j];
        right_samples.emplace_back(j, R);
    }
    // final descent to xm; a site exactly at xm belongs to the left solution
    for (auto it = p.interfaces.rbegin(); it != p.interfaces.rend(); ++it) {
        if (it->site >= x || it->site <= xm) continue;
        R = integrate(p.form, lambda, x, it->site, R, tol);
        R.derivative -= it->coupling * R.value;
        x = it->site;
    }
    ScaledState Rm = integrate(p.form, lambda, x, xm, R, tol);

    // scale the right state onto the left one at the matching point; a
    // least-squares alignment of (value, derivative) stays conditioned even
    // when the eigenfunction has a node at x_m
    double rnorm2 = std::norm(Rm.value) + std::norm(Rm.derivative);
    if (rnorm2 == 0.0) throw MatchFailure("right solution vanishes at x_m");
    Complex ratio = (Lm.value * std::conj(Rm.value) + Lm.derivative * std::conj(Rm.derivative)) /
                    rnorm2;
    double log_shift = Lm.log_scale - Rm.log_scale;
    double lnorm = std::sqrt(std::norm(Lm.value) + std::norm(Lm.derivative));
    double defect = std::sqrt(std::norm(Lm.value - ratio * Rm.value) +
                              std::norm(Lm.derivative - ratio * Rm.derivative));
    if (lnorm == 0.0) throw MatchFailure("left solution vanishes at x_m");
    out.derivative_mismatch = defect / lnorm;

    for (const auto& [j, st] : right_samples) {
        out.phi[j] = st.value * ratio;
        logs[j] = st.log_scale + log_shift;
    }

    // bring all samples to a common scale without overflow, then L2-normalize
    double logmax = *std::max_element(logs.begin(), logs.end());
    double nrm2 = 0;
    for (int k = 0; k < resolution; ++k) {
        out.phi[k] *= std::exp(logs[k] - logmax);
        nrm2 += std::norm(out.phi[k]) * out.h;
    }
    if (nrm2 <= 0) throw MatchFailure("zero norm");
    double inv = 1.0 / std::sqrt(nrm2);
    for (auto& v : out.phi) v *= inv;
    return out;
}

double tail_mass(const SampledFunction& phi, double r) {
    if (phi.x.empty()) throw EmptySamples("tail_mass");
    double xmax = std::max(std::abs(phi.x.front()), std::abs(phi.x.back()));
    if (r < 0 || r > xmax) throw OutOfRange("tail radius outside the sampling interval");
    double acc = 0;
    for (size_t i = 0; i < phi.x.size(); ++i)
        if (std::abs(phi.x[i]) >= r) acc += std::norm(phi.phi[i]) * phi.h;
    return std::sqrt(acc);
}

double tail_decay_bound(const std::function<Complex(double)>& q0, double r, double x_max,
                        double D, double iota, int samples) {
    if (!(x_max > r)) throw OutOfRange("x_max must exceed r");
    double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < samples; ++i) {
        double x = r + (x_max - r) * static_cast<double>(i) / (samples - 1);
        inf = std::min({inf, std::abs(q0(x)), std::abs(q0(-x))});
    }
    if (inf <= 0) return std::numeric_limits<double>::infinity();
    return D / std::pow(inf, iota);
}

}  // namespace spexact
