#pragma once

#include <optional>
#include <vector>

#include "spexact/ode.hpp"
#include "spexact/types.hpp"

namespace spexact {

// Separated endpoint condition. Robin uses the outward-normal convention
//   right endpoint:  f'(s) + a f(s) = 0
//   left endpoint:  -f'(l) + a f(l) = 0
// so a = 0 is Neumann at either end.
struct BoundaryCondition {
    enum class Kind { Dirichlet, Robin };
    Kind kind = Kind::Dirichlet;
    Complex a{0, 0};

    static BoundaryCondition dirichlet() { return {Kind::Dirichlet, {0, 0}}; }
    static BoundaryCondition robin(Complex a) { return {Kind::Robin, a}; }
    static BoundaryCondition neumann() { return robin({0, 0}); }
};

// Point interaction W = c delta(. - site), enforced as the jump
// f'(site+) - f'(site-) = c f(site).
struct Interface {
    double site = 0;
    Complex coupling{0, 0};
};

// One ODE eigenproblem on [left, right]. A missing left_bc means the regular
// solution branch at the origin (radial forms with left = 0 only).
struct TruncatedProblem {
    OdeForm form;
    double left = 0, right = 0;
    std::optional<BoundaryCondition> left_bc = BoundaryCondition::dirichlet();
    BoundaryCondition right_bc = BoundaryCondition::dirichlet();
    std::vector<Interface> interfaces;

    bool regular_origin() const { return !left_bc.has_value(); }
    void validate() const;
};

struct EigenRecord {
    Complex lambda{0, 0};
    int multiplicity = 1;
    double residual = 0;  // relative miss-distance at the polished value
    double s = 0;         // truncation size the record came from
};

struct MissDistance {
    Complex w{0, 0};      // renormalized Wronskian of the one-sided solutions
    double log_scale = 0; // the true Wronskian is w e^{log_scale}
};

struct ShootOptions {
    double integ_tol = 1e-10;          // polishing / endpoint accuracy
    double winding_tol = 1e-9;         // contour evaluations (phase only)
    std::optional<double> matching_point;
    int samples_per_edge = 8;
    int max_refine_depth = 46;
    double newton_diameter = 1.0;      // bisect boxes below this before polishing
};

MissDistance miss_distance(const TruncatedProblem& p, Complex lambda,
                           const ShootOptions& opts = {});

// Number of eigenvalues (with multiplicity) inside rect, by the argument
// principle on the analytic map lambda -> W(lambda).
int count_eigenvalues(const TruncatedProblem& p, const Rect& rect,
                      const ShootOptions& opts = {});

// All eigenvalues in rect, polished to |step| < tol (relative); multiplicity
// sum always equals count_eigenvalues(p, rect).
std::vector<EigenRecord> find_eigenvalues(const TruncatedProblem& p, const Rect& rect,
                                          double tol, const ShootOptions& opts = {});

struct SampledFunction {
    std::vector<double> x;
    std::vector<Complex> phi;
    double h = 0;
    double derivative_mismatch = 0;  // relative defect at the matching point
};

// L2-normalized eigenfunction samples for a polished simple eigenvalue.
SampledFunction eigenfunction(const TruncatedProblem& p, Complex lambda, int resolution,
                              const ShootOptions& opts = {});

// sqrt(sum_{|x_i|>r} |phi_i|^2 h)
double tail_mass(const SampledFunction& phi, double r);

// Decay estimate D / (ess inf_{|x|>=r} |Q0|)^iota on the sampled profile;
// iota = 1/2 in the sectorial case, 1 in the accretive case.
double tail_decay_bound(const std::function<Complex(double)>& q0, double r, double x_max,
                        double D, double iota, int samples = 2048);

}  // namespace spexact
