#include "spexact/experiments.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "spexact/expr.hpp"

namespace spexact {

using nlohmann::json;

namespace {

std::vector<double> arange(double from, double step, double to) {
    std::vector<double> v;
    for (double s = from; s <= to + 1e-12; s += step) v.push_back(s);
    return v;
}

}  // namespace

ExperimentConfig preset_experiment(const std::string& name) {
    ExperimentConfig cfg;
    cfg.name = name;
    if (name == "ix") {
        cfg.potential = builtin_potential("ix");
        cfg.window = {0, 5, -12, 12};
        cfg.sizes = arange(6.0, 0.5, 10.0);
    } else if (name == "ix3") {
        cfg.potential = builtin_potential("ix3");
        cfg.window = {0, 20, -2, 2};
        cfg.sizes = arange(3.0, 0.5, 10.0);
        cfg.shoot.integ_tol = 1e-11;
    } else if (name == "harmonic") {
        cfg.potential = builtin_potential("harmonic");
        cfg.window = {0, 6, -1, 1};
        cfg.sizes = {4, 6, 8};
    } else if (name == "harmonic_cube") {
        cfg.potential = builtin_potential("harmonic");
        cfg.geometry = ExperimentConfig::GeometryKind::Cube;
        cfg.window = {0, 8, -1, 1};
        cfg.sizes = {6, 8};
    } else if (name == "harmonic_ball") {
        cfg.potential = builtin_potential("harmonic");
        cfg.geometry = ExperimentConfig::GeometryKind::Ball3d;
        cfg.window = {0, 8, -1, 1};
        cfg.sizes = {6, 8};
    } else if (name == "exterior") {
        cfg.potential = builtin_potential("rotated_harmonic");
        cfg.geometry = ExperimentConfig::GeometryKind::Annulus2d;
        cfg.r_in = 1.0;
        cfg.window = {0, 20, 0, 15};
        cfg.sizes = {5, 6, 7, 8, 9, 10};
        cfg.shoot.integ_tol = 1e-11;
    } else if (name == "ix3_minus_x2") {
        cfg.potential = builtin_potential("ix3_minus_x2");
        cfg.window = {-5, 25, -20, 20};
        cfg.sizes = arange(4.0, 1.0, 10.0);
    } else if (name == "ix3_damped") {
        cfg.potential = builtin_potential("ix3_damped");
        cfg.window = {-10, 30, -25, 25};
        cfg.sizes = arange(4.0, 1.0, 10.0);
    } else if (name == "shifted_complex_harmonic_delta") {
        cfg.potential = builtin_potential("shifted_complex_harmonic_delta");
        cfg.window = {0, 15, -1, 8};
        cfg.sizes = {4, 6, 8};
    } else {
        throw ConfigError("unknown experiment preset '" + name + "'");
    }
    return cfg;
}

std::vector<std::string> preset_names() {
    return {"ix",          "ix3",           "harmonic",
            "harmonic_cube", "harmonic_ball", "exterior",
            "ix3_minus_x2", "ix3_damped",    "shifted_complex_harmonic_delta"};
}

namespace {

BoundaryCondition bc_from_json(const json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "dirichlet") return BoundaryCondition::dirichlet();
        if (s == "neumann") return BoundaryCondition::neumann();
        throw ConfigError("unknown boundary condition '" + s + "'");
    }
    if (j.contains("robin")) {
        auto& a = j.at("robin");
        return BoundaryCondition::robin(Complex(a.at(0).get<double>(), a.at(1).get<double>()));
    }
    throw ConfigError("bad boundary condition");
}

PotentialSpec potential_from_json(const json& j) {
    if (j.is_string()) return builtin_potential(j.get<std::string>());
    PotentialSpec s;
    s.dimension = j.value("dimension", 1);
    if (!j.contains("expr")) throw ConfigError("potential needs a name or an expr");
    auto f = parse_expression(j.at("expr").get<std::string>());
    s.name = j.value("name", std::string("custom"));
    s.q0 = [f](Point p) { return f(p[0]); };
    if (j.contains("u_expr")) {
        auto g = parse_expression(j.at("u_expr").get<std::string>());
        s.u = [g](Point p) { return g(p[0]).real(); };
    }
    if (j.contains("delta")) {
        auto& d = j.at("delta");
        s.w_kind = WDelta{d.at("site").get<double>(),
                          Complex(d.at("coupling").at(0).get<double>(),
                                  d.at("coupling").at(1).get<double>())};
    }
    if (j.contains("shift")) {
        DeclaredBounds db;
        db.shift = Complex(j.at("shift").at(0).get<double>(), j.at("shift").at(1).get<double>());
        s.declared = db;
    }
    return s;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    ExperimentConfig cfg;
    if (j.contains("preset")) cfg = preset_experiment(j.at("preset").get<std::string>());
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    if (j.contains("potential")) cfg.potential = potential_from_json(j.at("potential"));
    if (j.contains("geometry")) {
        std::string g = j.at("geometry").get<std::string>();
        if (g == "interval") cfg.geometry = ExperimentConfig::GeometryKind::Interval;
        else if (g == "cube") cfg.geometry = ExperimentConfig::GeometryKind::Cube;
        else if (g == "ball3d") cfg.geometry = ExperimentConfig::GeometryKind::Ball3d;
        else if (g == "annulus2d") cfg.geometry = ExperimentConfig::GeometryKind::Annulus2d;
        else throw ConfigError("unknown geometry '" + g + "'");
    }
    if (j.contains("cube_d")) cfg.cube_d = j.at("cube_d").get<int>();
    if (j.contains("r_in")) cfg.r_in = j.at("r_in").get<double>();
    if (j.contains("left_bc")) cfg.left_bc = bc_from_json(j.at("left_bc"));
    if (j.contains("right_bc")) cfg.right_bc = bc_from_json(j.at("right_bc"));
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<double>>();
    if (j.contains("window")) {
        auto w = j.at("window");
        cfg.window = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
                      w.at(3).get<double>()};
    }
    if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
    if (j.contains("integ_tol")) cfg.shoot.integ_tol = j.at("integ_tol").get<double>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (cfg.name.empty() && !j.contains("preset")) throw ConfigError("config needs a name");
    return cfg;
}

TruncatedProblem interval_problem(const ExperimentConfig& cfg, double s) {
    if (cfg.geometry != ExperimentConfig::GeometryKind::Interval &&
        cfg.geometry != ExperimentConfig::GeometryKind::Cube)
        throw InvalidParameter("interval_problem needs interval or cube geometry");
    TruncatedProblem p;
    p.form = OdeForm{OdeForm::Kind::Cartesian, 0, cfg.potential.profile()};
    p.left = -s;
    p.right = s;
    p.left_bc = cfg.left_bc.value_or(BoundaryCondition::dirichlet());
    p.right_bc = cfg.right_bc;
    if (auto d = cfg.potential.delta()) p.interfaces.push_back({d->site, d->coupling});
    return p;
}

ProblemTemplate problem_template(const ExperimentConfig& cfg) {
    ProblemTemplate t;
    switch (cfg.geometry) {
        case ExperimentConfig::GeometryKind::Interval:
        case ExperimentConfig::GeometryKind::Cube:
            t.form = OdeForm{OdeForm::Kind::Cartesian, 0, cfg.potential.profile()};
            t.symmetric = true;
            t.left_bc = cfg.left_bc.value_or(BoundaryCondition::dirichlet());
            if (auto d = cfg.potential.delta()) t.interfaces.push_back({d->site, d->coupling});
            break;
        case ExperimentConfig::GeometryKind::Ball3d:
            t.form = OdeForm{OdeForm::Kind::Radial3d, 0, cfg.potential.profile()};
            t.symmetric = false;
            t.fixed_left = 0;
            t.left_bc = std::nullopt;
            break;
        case ExperimentConfig::GeometryKind::Annulus2d:
            t.form = OdeForm{OdeForm::Kind::Radial2d, 0, cfg.potential.profile()};
            t.symmetric = false;
            t.fixed_left = cfg.r_in;
            t.left_bc = cfg.left_bc.value_or(BoundaryCondition::dirichlet());
            break;
    }
    t.right_bc = cfg.right_bc;
    return t;
}

EigsResult run_eigs(const ExperimentConfig& cfg, double s) {
    EigsResult out;
    switch (cfg.geometry) {
        case ExperimentConfig::GeometryKind::Interval: {
            TruncatedProblem p = interval_problem(cfg, s);
            const double d = 1e-2 * cfg.window.diameter();
            for (int attempt = 0; attempt < 5; ++attempt) {
                try {
                    auto recs = find_eigenvalues(p, cfg.window.expanded(attempt * d), cfg.tol,
                                                 cfg.shoot);
                    std::erase_if(recs,
                                  [&](const EigenRecord& r) { return !cfg.window.contains(r.lambda); });
                    for (auto& r : recs) r.s = s;
                    out.records = std::move(recs);
                    return out;
                } catch (const ZeroOnContour&) {
                } catch (const PhaseResolutionExceeded&) {
                }
            }
            throw NonConvergence("eigs: window contour obstructed");
        }
        case ExperimentConfig::GeometryKind::Cube: {
            // 1-d factor problem; coverage to the full window top suffices for
            // factor lists with nonnegative real parts
            Rect w1 = cfg.window;
            w1.re_lo = std::min(0.0, cfg.window.re_lo);
            double imh = std::max(std::abs(cfg.window.im_lo), std::abs(cfg.window.im_hi));
            w1.im_lo = -std::max(1.0, imh);
            w1.im_hi = std::max(1.0, imh);
            TruncatedProblem p = interval_problem(cfg, s);
            auto mu_recs = find_eigenvalues(p, w1, cfg.tol, cfg.shoot);
            std::vector<Complex> mu;
            for (const auto& r : mu_recs)
                for (int k = 0; k < r.multiplicity; ++k) mu.push_back(r.lambda);
            auto sums = assemble_cube(mu, cfg.cube_d, cfg.window, w1.re_hi, 1e-6);
            for (const auto& [lam, mult] : sums) out.records.push_back({lam, mult, 0.0, s});
            return out;
        }
        case ExperimentConfig::GeometryKind::Ball3d:
        case ExperimentConfig::GeometryKind::Annulus2d: {
            Geometry g;
            if (cfg.geometry == ExperimentConfig::GeometryKind::Ball3d)
                g = Ball3dGeometry{s};
            else
                g = Annulus2dGeometry{cfg.r_in, s};
            RadialModesOptions rmo;
            rmo.tol = cfg.tol;
            rmo.shoot = cfg.shoot;
            ModeTable table = radial_modes(g, cfg.potential.profile(), cfg.window, cfg.right_bc, rmo);
            for (auto& m : table.modes)
                for (auto& r : m.records) r.s = s;
            auto flat = table.flatten(1e-6);
            for (const auto& [lam, mult] : flat) out.records.push_back({lam, mult, 0.0, s});
            out.modes = std::move(table);
            return out;
        }
    }
    throw ConfigError("unhandled geometry");
}

SweepResult run_sweep_experiment(const ExperimentConfig& cfg) {
    SweepPlan plan;
    plan.tmpl = problem_template(cfg);
    plan.sizes = cfg.sizes;
    plan.window = cfg.window;
    plan.tol = cfg.tol;
    plan.shoot = cfg.shoot;
    SweepResult out;
    out.slices = run_sweep(plan);
    out.trajectories = track(out.slices);
    return out;
}

CheckResult run_check(const ExperimentConfig& cfg, std::optional<AssumptionCase> which_case) {
    SampleBox box;
    double extent = cfg.sizes.empty() ? 10.0 : cfg.sizes.back();
    box.lo = {-extent, -extent, -extent};
    box.hi = {extent, extent, extent};
    box.resolution = cfg.potential.dimension == 1 ? 2001 : cfg.potential.dimension == 2 ? 201 : 61;
    if (cfg.geometry == ExperimentConfig::GeometryKind::Annulus2d) box.exclude_radius = cfg.r_in;

    AssumptionCase which;
    if (which_case) {
        which = *which_case;
    } else {
        auto sec = sectoriality_angle(cfg.potential, box.points(cfg.potential.dimension));
        which = (sec.theta < kPi / 2 - 1e-9 && sec.c0 > 0) ? AssumptionCase::I_sectorial
                                                           : AssumptionCase::II_accretive;
    }
    return {verify_assumptions(cfg.potential, which, box)};
}

PseudospectrumGrid run_pseudo(const ExperimentConfig& cfg, double s, int n, const Rect& rect,
                              int nx, int ny, const std::vector<double>& eps_levels) {
    TruncatedProblem p;
    if (cfg.geometry == ExperimentConfig::GeometryKind::Annulus2d ||
        cfg.geometry == ExperimentConfig::GeometryKind::Ball3d) {
        ProblemTemplate t = problem_template(cfg);
        p = t.instantiate(s);
    } else {
        p = interval_problem(cfg, s);
    }
    BandedOperator A = discretize(p, n);
    ResolventOptions ro;
    ro.seed = cfg.seed;
    return pseudospectrum(A, rect, nx, ny, eps_levels, ro);
}

}  // namespace spexact
