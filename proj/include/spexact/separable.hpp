#pragma once

#include <string>
#include <variant>
#include <vector>

#include "spexact/shooting.hpp"

namespace spexact {

struct CubeGeometry {
    int d = 3;
    double s = 0;
};
struct Ball3dGeometry {
    double s = 0;
};
struct Annulus2dGeometry {
    double r_in = 1.0;
    double s = 0;
};
using Geometry = std::variant<CubeGeometry, Ball3dGeometry, Annulus2dGeometry>;

// Eigenvalues of one angular mode, with the angular multiplicity factor
// (2l+1 for the 3-d ball, 2 resp. 1 for the 2-d annulus).
struct ModeList {
    int l = 0;
    int angular_multiplicity = 1;
    std::vector<EigenRecord> records;
};

struct ModeTable {
    Geometry geometry;
    Rect window;
    int l_max = 0;  // first empty mode; completeness certificate for the window
    std::vector<ModeList> modes;

    // (lambda, total multiplicity) merged across modes
    std::vector<std::pair<Complex, int>> flatten(double merge_tol = 1e-9) const;
};

// d-fold sums of one-dimensional eigenvalues landing in the window; ordered
// tuples counted, merged within merge_tol. coverage_re_max is the largest real
// part up to which the 1-d list is known complete.
std::vector<std::pair<Complex, int>> assemble_cube(const std::vector<Complex>& mu, int d,
                                                   const Rect& window, double coverage_re_max,
                                                   double merge_tol = 1e-9);

struct RadialModesOptions {
    double tol = 1e-9;
    int l_cap = 64;
    ShootOptions shoot;
};

// Per-l radial solves until a mode contributes nothing to the window (valid
// stopping rule for l-monotone angular barriers).
ModeTable radial_modes(const Geometry& geometry, const std::function<Complex(double)>& q,
                       const Rect& window, const BoundaryCondition& right_bc,
                       const RadialModesOptions& opts = {});

// Degeneracy of the k-th eigenvalue of the 3-d harmonic oscillator.
long degeneracy(long k);

}  // namespace spexact
