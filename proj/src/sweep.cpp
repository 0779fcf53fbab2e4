#include "spexact/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spexact {

TruncatedProblem ProblemTemplate::instantiate(double s) const {
    TruncatedProblem p;
    p.form = form;
    p.left = symmetric ? -s : fixed_left;
    p.right = s;
    p.left_bc = left_bc;
    p.right_bc = right_bc;
    p.interfaces = interfaces;
    p.validate();
    return p;
}

std::vector<SizeSlice> run_sweep(const SweepPlan& plan) {
    if (plan.sizes.empty()) throw InvalidParameter("no sizes in sweep plan");
    for (size_t i = 1; i < plan.sizes.size(); ++i)
        if (!(plan.sizes[i] > plan.sizes[i - 1]))
            throw InvalidParameter("sizes must be strictly increasing");
    if (!(plan.window.width() > 0 && plan.window.height() > 0))
        throw InvalidParameter("empty sweep window");

    std::vector<SizeSlice> out;
    out.reserve(plan.sizes.size());
    for (double s : plan.sizes) {
        TruncatedProblem p = plan.tmpl.instantiate(s);
        std::vector<EigenRecord> recs;
        // deterministic outward nudges if an eigenvalue obstructs the contour
        const double d = 1e-2 * plan.window.diameter();
        bool done = false;
        for (int attempt = 0; attempt < 5 && !done; ++attempt) {
            Rect w = plan.window.expanded(attempt * d);
            try {
                recs = find_eigenvalues(p, w, plan.tol, plan.shoot);
                done = true;
            } catch (const ZeroOnContour&) {
            } catch (const PhaseResolutionExceeded&) {
            }
        }
        if (!done)
            throw NonConvergence("sweep slice s = " + std::to_string(s) +
                                 ": window contour obstructed");
        std::erase_if(recs, [&](const EigenRecord& r) { return !plan.window.contains(r.lambda); });
        for (auto& r : recs) r.s = s;
        out.push_back({s, std::move(recs)});
    }
    return out;
}

namespace {

double gate_from_displacements(std::vector<double> d, const TrackOptions& opts) {
    if (d.empty()) return opts.gate_floor;
    std::nth_element(d.begin(), d.begin() + d.size() / 2, d.end());
    return std::max(opts.gate_floor, opts.gate_factor * d[d.size() / 2]);
}

// all-pairs greedy bipartite matching by increasing distance
std::vector<std::pair<int, int>> greedy_match(const std::vector<Complex>& a,
                                              const std::vector<Complex>& b, double gate) {
    struct Cand {
        double d;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(a.size()); ++i)
        for (int j = 0; j < static_cast<int>(b.size()); ++j) {
            double d = std::abs(a[i] - b[j]);
            if (d <= gate) cands.push_back({d, i, j});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) {
        if (x.d != y.d) return x.d < y.d;
        if (x.i != y.i) return x.i < y.i;
        return x.j < y.j;
    });
    std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
    std::vector<std::pair<int, int>> out;
    for (const auto& c : cands) {
        if (used_a[c.i] || used_b[c.j]) continue;
        used_a[c.i] = used_b[c.j] = true;
        out.emplace_back(c.i, c.j);
    }
    return out;
}

bool im_growth_monotone(const Trajectory& t, int steps) {
    const auto& r = t.records;
    if (static_cast<int>(r.size()) < steps + 1) return false;
    for (size_t k = r.size() - steps; k < r.size(); ++k) {
        if (!(std::abs(r[k].lambda.imag()) > std::abs(r[k - 1].lambda.imag()) + 1e-15))
            return false;
    }
    return true;
}

}  // namespace

std::vector<Trajectory> track(const std::vector<SizeSlice>& slices, const TrackOptions& opts) {
    if (slices.size() < 2) throw TooShort("track needs at least two size slices");

    std::vector<Trajectory> trajs;
    std::vector<int> live;  // trajectory index per record of the previous slice
    for (size_t k = 0; k < slices.size(); ++k) {
        const auto& recs = slices[k].records;
        if (k == 0) {
            for (const auto& r : recs) {
                trajs.push_back({static_cast<int>(trajs.size()), {r}, {}, std::nullopt});
                live.push_back(trajs.back().id);
            }
            continue;
        }
        const auto& prev = slices[k - 1].records;
        std::vector<Complex> a(prev.size()), b(recs.size());
        for (size_t i = 0; i < prev.size(); ++i) a[i] = prev[i].lambda;
        for (size_t j = 0; j < recs.size(); ++j) b[j] = recs[j].lambda;

        // preliminary pass to estimate the typical step, then the gated pass
        auto prelim = greedy_match(a, b, std::numeric_limits<double>::infinity());
        std::vector<double> disp;
        for (auto [i, j] : prelim) disp.push_back(std::abs(a[i] - b[j]));
        double gate = gate_from_displacements(disp, opts);
        auto matches = greedy_match(a, b, gate);

        std::vector<int> next_live(recs.size(), -1);
        for (auto [i, j] : matches) {
            trajs[live[i]].records.push_back(recs[j]);
            next_live[j] = live[i];
        }
        for (size_t j = 0; j < recs.size(); ++j) {
            if (next_live[j] >= 0) continue;
            trajs.push_back({static_cast<int>(trajs.size()), {recs[j]}, {}, std::nullopt});
            next_live[j] = trajs.back().id;
        }
        live.assign(next_live.begin(), next_live.end());
    }

    // conjugate-pair linkage: lambda_a ~ conj(lambda_b) with both |Im| growing
    std::vector<double> all_disp;
    for (auto& t : trajs)
        for (size_t k = 1; k < t.records.size(); ++k)
            all_disp.push_back(std::abs(t.records[k].lambda - t.records[k - 1].lambda));
    double gate = gate_from_displacements(all_disp, opts);
    for (size_t i = 0; i < trajs.size(); ++i) {
        if (trajs[i].partner) continue;
        if (!im_growth_monotone(trajs[i], opts.pair_steps)) continue;
        for (size_t j = i + 1; j < trajs.size(); ++j) {
            if (trajs[j].partner) continue;
            if (!im_growth_monotone(trajs[j], opts.pair_steps)) continue;
            Complex za = trajs[i].records.back().lambda;
            Complex zb = trajs[j].records.back().lambda;
            if (trajs[i].records.back().s != trajs[j].records.back().s) continue;
            if (std::abs(za - std::conj(zb)) <= gate) {
                trajs[i].partner = trajs[j].id;
                trajs[j].partner = trajs[i].id;
                break;
            }
        }
    }

    for (auto& t : trajs) {
        if (static_cast<int>(t.records.size()) >= 3)
            t.classification = classify(t, opts.cauchy_tol, opts);
        else
            t.classification = {Classification::Kind::Unresolved, t.records.back().lambda,
                                t.partner};
    }
    return trajs;
}

Classification classify(const Trajectory& t, double tol, const TrackOptions& opts) {
    if (t.records.size() < 3) throw TooShort("classify needs >= 3 records");
    const auto& r = t.records;

    // tail Cauchy criterion: decreasing increments with a small final one
    size_t n = r.size();
    double inc_last = std::abs(r[n - 1].lambda - r[n - 2].lambda);
    double inc_prev = std::abs(r[n - 2].lambda - r[n - 3].lambda);
    bool cauchy = inc_last < tol && inc_last <= inc_prev + tol;
    if (cauchy) return {Classification::Kind::Converged, r.back().lambda, t.partner};

    if (t.partner && im_growth_monotone(t, opts.pair_steps))
        return {Classification::Kind::DivergingPair, r.back().lambda, t.partner};

    return {Classification::Kind::Unresolved, r.back().lambda, t.partner};
}

RateFit fit_rate(const Trajectory& t, Complex limit) {
    std::vector<double> ss, ee;
    for (const auto& r : t.records) {
        double e = std::abs(r.lambda - limit);
        if (e > 1e-13) {
            ss.push_back(r.s);
            ee.push_back(std::log(e));
        }
    }
    if (ss.size() < 4) throw InsufficientData("fit_rate needs >= 4 usable records");

    auto least_squares = [](const std::vector<double>& x, const std::vector<double>& y) {
        double n = static_cast<double>(x.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        double icept = (sy - slope * sx) / n;
        double ssr = 0, sst = 0, ym = sy / n;
        for (size_t i = 0; i < x.size(); ++i) {
            double fit = icept + slope * x[i];
            ssr += (y[i] - fit) * (y[i] - fit);
            sst += (y[i] - ym) * (y[i] - ym);
        }
        double r2 = sst > 0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 1.0;
        return std::array<double, 3>{slope, icept, r2};
    };

    auto expf = least_squares(ss, ee);
    std::vector<double> ls(ss.size());
    for (size_t i = 0; i < ss.size(); ++i) ls[i] = std::log(ss[i]);
    auto algf = least_squares(ls, ee);

    RateFit out;
    if (expf[2] >= algf[2]) {
        out.model = RateFit::Model::Exponential;
        out.slope = expf[0];
        out.intercept = expf[1];
        out.r_squared = expf[2];
    } else {
        out.model = RateFit::Model::Algebraic;
        out.slope = algf[0];
        out.intercept = algf[1];
        out.r_squared = algf[2];
    }
    return out;
}

RateBoundCheck rate_bound_check(const Trajectory& t, Complex limit,
                                const std::vector<double>& tails) {
    if (tails.size() != t.records.size())
        throw InvalidParameter("one tail value per trajectory record required");
    RateBoundCheck out;
    double running = 0;
    size_t last_new_max = 0;
    for (size_t i = 0; i < tails.size(); ++i) {
        if (tails[i] < 1e-15) continue;  // guard against zero tails
        double ratio = std::abs(t.records[i].lambda - limit) / tails[i];
        out.ratios.push_back(ratio);
        if (ratio > running) {
            running = ratio;
            last_new_max = out.ratios.size() - 1;
        }
    }
    if (out.ratios.empty()) throw InsufficientData("all tails below the zero guard");
    out.c_hat = running;
    // evidence of a uniform constant: the max is not still being pushed at the end
    out.satisfied = std::isfinite(out.c_hat) &&
                    (out.ratios.size() == 1 || last_new_max + 1 < out.ratios.size() ||
                     out.ratios.back() <= out.ratios.front() * (1 + 1e-9));
    return out;
}

}  // namespace spexact
