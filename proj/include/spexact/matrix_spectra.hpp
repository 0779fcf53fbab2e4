#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spexact/shooting.hpp"
#include "spexact/types.hpp"

namespace spexact {

// Second-order finite-difference discretization of a TruncatedProblem as a
// complex tridiagonal operator. Dirichlet rows are eliminated; Robin ends are
// ghost-point reduced; radial regular-origin meshes are offset by h/2.
struct BandedOperator {
    int n = 0;
    std::vector<Complex> sub, diag, super;  // sub/super have length n-1
    double h = 0;
    std::vector<double> nodes;
    std::string meta;  // originating problem description

    void mul(const Complex* x, Complex* y) const;  // y = A x
};

BandedOperator discretize(const TruncatedProblem& p, int n);

struct MatrixEigOptions {
    double tol = 1e-10;         // box localization tolerance
    std::uint64_t seed = 0x5eed;
    int samples_per_edge = 16;
    int max_refine_depth = 46;
    double newton_diameter = 0.5;  // localize below this before inverse iteration
};

// Eigenvalues in rect with multiplicity, by determinant-phase winding along
// the boundary (banded LU pivots) plus inverse-iteration polishing.
std::vector<std::pair<Complex, int>> eigs_in_rect(const BandedOperator& A, const Rect& rect,
                                                  const MatrixEigOptions& opts = {});

struct ResolventNorm {
    double value = 0;  // 1/smin(A - lambda), +inf at an eigenvalue
    bool converged = true;
};

struct ResolventOptions {
    double rel_tol = 1e-8;
    int max_iters = 500;
    std::uint64_t seed = 0x5eed;
};

ResolventNorm resolvent_norm(const BandedOperator& A, Complex lambda,
                             const ResolventOptions& opts = {});

struct PseudospectrumGrid {
    Rect rect;
    int nx = 0, ny = 0;
    std::vector<double> smin;          // row-major, ny rows of nx
    std::vector<double> eps_levels;
    std::vector<std::vector<Complex>> level_sets;  // grid points with smin < eps

    double at(int i, int j) const { return smin[static_cast<size_t>(j) * nx + i]; }
    Complex grid_point(int i, int j) const;
};

PseudospectrumGrid pseudospectrum(const BandedOperator& A, const Rect& rect, int nx, int ny,
                                  std::vector<double> eps_levels,
                                  const ResolventOptions& opts = {});

struct AttouchWets {
    std::vector<double> per_rho;
    double max = 0;
};

// Two-sided sup of point-to-set distances restricted to closed balls around 0;
// an empty restriction contributes 0.
AttouchWets attouch_wets(const std::vector<Complex>& set_a, const std::vector<Complex>& set_b,
                         const std::vector<double>& radii);

}  // namespace spexact
