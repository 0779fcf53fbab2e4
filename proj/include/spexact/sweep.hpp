#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spexact/shooting.hpp"

namespace spexact {

// Problem family parametrized by the truncation size s: either a symmetric
// interval (-s, s) or a fixed left endpoint (l, s).
struct ProblemTemplate {
    OdeForm form;
    bool symmetric = true;   // interval (-s, s); otherwise (fixed_left, s)
    double fixed_left = 0;
    std::optional<BoundaryCondition> left_bc = BoundaryCondition::dirichlet();
    BoundaryCondition right_bc = BoundaryCondition::dirichlet();
    std::vector<Interface> interfaces;

    TruncatedProblem instantiate(double s) const;
};

struct SweepPlan {
    ProblemTemplate tmpl;
    std::vector<double> sizes;  // strictly increasing
    Rect window;
    double tol = 1e-9;
    ShootOptions shoot;
};

struct SizeSlice {
    double s = 0;
    std::vector<EigenRecord> records;  // ordered by (Re, Im)
};

struct RateFit {
    enum class Model { Exponential, Algebraic };
    Model model = Model::Exponential;
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

struct Classification {
    enum class Kind { Converged, DivergingPair, Unresolved };
    Kind kind = Kind::Unresolved;
    Complex limit{0, 0};  // meaningful for Converged: the final record
    std::optional<int> partner;
};

struct Trajectory {
    int id = 0;
    std::vector<EigenRecord> records;  // ordered by s
    Classification classification;
    std::optional<int> partner;  // conjugate-pair link
};

struct TrackOptions {
    double gate_floor = 0.5;
    double gate_factor = 5.0;   // times the median step displacement
    int pair_steps = 3;         // monotone |Im| growth steps required for a pair link
    double cauchy_tol = 1e-6;   // final-increment threshold for convergence
};

// If a slice fails because an eigenvalue sits on the window contour, the
// window for that slice is nudged outward deterministically and records are
// filtered back to the requested window.
std::vector<SizeSlice> run_sweep(const SweepPlan& plan);

std::vector<Trajectory> track(const std::vector<SizeSlice>& slices,
                              const TrackOptions& opts = {});

Classification classify(const Trajectory& t, double tol,
                        const TrackOptions& opts = {});

RateFit fit_rate(const Trajectory& t, Complex limit);

struct RateBoundCheck {
    double c_hat = 0;
    bool satisfied = false;
    std::vector<double> ratios;
};

// |lambda - lambda_n| <= C tail_n evidence: c_hat = max ratio, satisfied when
// the running max has stopped growing by the end of the data.
RateBoundCheck rate_bound_check(const Trajectory& t, Complex limit,
                                const std::vector<double>& tails);

}  // namespace spexact
