#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spexact/matrix_spectra.hpp"
#include "spexact/potentials.hpp"
#include "spexact/separable.hpp"
#include "spexact/sweep.hpp"

namespace spexact {

// A runnable experiment: potential + geometry + discretization knobs. Named
// presets reproduce the standard setups; JSON configs may override any field.
struct ExperimentConfig {
    std::string name;
    PotentialSpec potential;

    enum class GeometryKind { Interval, Cube, Ball3d, Annulus2d };
    GeometryKind geometry = GeometryKind::Interval;
    int cube_d = 3;
    double r_in = 1.0;

    std::optional<BoundaryCondition> left_bc;  // unset: geometry default
    BoundaryCondition right_bc = BoundaryCondition::dirichlet();

    std::vector<double> sizes;
    Rect window{0, 10, -10, 10};
    double tol = 1e-9;
    ShootOptions shoot;
    std::uint64_t seed = 0x5eed;
};

ExperimentConfig preset_experiment(const std::string& name);
std::vector<std::string> preset_names();
ExperimentConfig config_from_json(const std::string& text);

// Problem builders
TruncatedProblem interval_problem(const ExperimentConfig& cfg, double s);
ProblemTemplate problem_template(const ExperimentConfig& cfg);

struct EigsResult {
    std::vector<EigenRecord> records;               // merged multiplicities
    std::optional<ModeTable> modes;                 // radial geometries
};

EigsResult run_eigs(const ExperimentConfig& cfg, double s);

struct SweepResult {
    std::vector<SizeSlice> slices;
    std::vector<Trajectory> trajectories;
};

SweepResult run_sweep_experiment(const ExperimentConfig& cfg);

struct CheckResult {
    AssumptionReport report;
};

// which_case empty: case I when the (shifted) sectoriality angle is < pi/2,
// case II otherwise.
CheckResult run_check(const ExperimentConfig& cfg,
                      std::optional<AssumptionCase> which_case = std::nullopt);

PseudospectrumGrid run_pseudo(const ExperimentConfig& cfg, double s, int n, const Rect& rect,
                              int nx, int ny, const std::vector<double>& eps_levels);

}  // namespace spexact
