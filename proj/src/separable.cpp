#include "spexact/separable.hpp"

#include <algorithm>
#include <cmath>

namespace spexact {

namespace {

std::vector<std::pair<Complex, int>> merge_close(std::vector<std::pair<Complex, int>> vals,
                                                 double tol) {
    std::sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
        if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
        return a.first.imag() < b.first.imag();
    });
    std::vector<std::pair<Complex, int>> out;
    for (const auto& v : vals) {
        if (!out.empty() && std::abs(out.back().first - v.first) <= tol)
            out.back().second += v.second;
        else
            out.push_back(v);
    }
    return out;
}

}  // namespace

std::vector<std::pair<Complex, int>> ModeTable::flatten(double merge_tol) const {
    std::vector<std::pair<Complex, int>> vals;
    for (const auto& m : modes)
        for (const auto& r : m.records)
            vals.emplace_back(r.lambda, r.multiplicity * m.angular_multiplicity);
    return merge_close(std::move(vals), merge_tol);
}

std::vector<std::pair<Complex, int>> assemble_cube(const std::vector<Complex>& mu, int d,
                                                   const Rect& window, double coverage_re_max,
                                                   double merge_tol) {
    if (mu.empty()) throw EmptySamples("assemble_cube");
    if (d < 1 || d > 3) throw InvalidParameter("d must be 1, 2 or 3");
    double mu_min_re = mu.front().real();
    for (const auto& m : mu) mu_min_re = std::min(mu_min_re, m.real());
    // every tuple containing some mu' with Re mu' <= window_re_hi - (d-1) mu_min_re
    // could land in the window; the 1-d list must be complete that far
    double needed = window.re_hi - (d - 1) * mu_min_re;
    if (coverage_re_max < needed - 1e-12)
        throw WindowNotCovered("1-d coverage up to Re = " + std::to_string(coverage_re_max) +
                               " but completeness requires Re = " + std::to_string(needed));

    std::vector<std::pair<Complex, int>> sums;
    const int n = static_cast<int>(mu.size());
    auto rec = [&](auto&& self, int depth, Complex acc) -> void {
        if (depth == d) {
            if (window.contains(acc)) sums.emplace_back(acc, 1);
            return;
        }
        for (int i = 0; i < n; ++i) {
            Complex next = acc + mu[i];
            // remaining entries contribute at least (d-depth-1) mu_min_re
            if (next.real() + (d - depth - 1) * mu_min_re > window.re_hi + merge_tol) continue;
            self(self, depth + 1, next);
        }
    };
    rec(rec, 0, Complex(0, 0));
    return merge_close(std::move(sums), merge_tol);
}

ModeTable radial_modes(const Geometry& geometry, const std::function<Complex(double)>& q,
                       const Rect& window, const BoundaryCondition& right_bc,
                       const RadialModesOptions& opts) {
    ModeTable table;
    table.geometry = geometry;
    table.window = window;

    const bool is_ball = std::holds_alternative<Ball3dGeometry>(geometry);
    const bool is_annulus = std::holds_alternative<Annulus2dGeometry>(geometry);
    if (!is_ball && !is_annulus) throw InvalidParameter("radial_modes needs ball3d or annulus2d");

    for (int l = 0; l <= opts.l_cap; ++l) {
        TruncatedProblem p;
        if (is_ball) {
            const auto& g = std::get<Ball3dGeometry>(geometry);
            p.form = OdeForm{OdeForm::Kind::Radial3d, l, q};
            p.left = 0.0;
            p.left_bc = std::nullopt;  // regular origin
            p.right = g.s;
        } else {
            const auto& g = std::get<Annulus2dGeometry>(geometry);
            p.form = OdeForm{OdeForm::Kind::Radial2d, l, q};
            p.left = g.r_in;
            p.left_bc = BoundaryCondition::dirichlet();
            p.right = g.s;
        }
        p.right_bc = right_bc;

        auto recs = find_eigenvalues(p, window, opts.tol, opts.shoot);
        if (recs.empty()) {
            table.l_max = l;
            return table;
        }
        ModeList m;
        m.l = l;
        m.angular_multiplicity = is_ball ? (2 * l + 1) : (l == 0 ? 1 : 2);
        m.records = std::move(recs);
        table.modes.push_back(std::move(m));
    }
    throw LMaxExceeded("window still populated at l = " + std::to_string(opts.l_cap));
}

long degeneracy(long k) {
    if (k < 1) throw OutOfRange("k must be >= 1");
    return k * (k + 1) / 2;
}

}  // namespace spexact
