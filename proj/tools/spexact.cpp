#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "spexact/experiments.hpp"
#include "spexact/report_io.hpp"

using namespace spexact;

namespace {

ExperimentConfig resolve_config(const std::string& name_or_path) {
    std::string target = name_or_path;
    if (target.empty()) {
        if (const char* env = std::getenv("SPEXACT_CONFIG")) target = env;
        else throw ConfigError("no experiment name, config path, or SPEXACT_CONFIG set");
    }
    if (target.size() > 5 && target.substr(target.size() - 5) == ".json")
        return config_from_json(read_file(target));
    if (std::filesystem::exists(target) && !std::filesystem::is_directory(target))
        return config_from_json(read_file(target));
    return preset_experiment(target);
}

Rect parse_window(const std::string& s) {
    Rect r;
    if (std::sscanf(s.c_str(), "%lf,%lf,%lf,%lf", &r.re_lo, &r.re_hi, &r.im_lo, &r.im_hi) != 4)
        throw ConfigError("window must be re_lo,re_hi,im_lo,im_hi");
    return r;
}

std::vector<double> parse_sizes(const std::string& s) {
    std::vector<double> out;
    double a, st, b;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a, &st, &b) == 3) {
        for (double v = a; v <= b + 1e-12; v += st) out.push_back(v);
        return out;
    }
    size_t pos = 0;
    while (pos < s.size()) {
        size_t next = s.find(',', pos);
        out.push_back(std::stod(s.substr(pos, next - pos)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::vector<double> parse_list(const std::string& s) { return parse_sizes(s); }

BoundaryCondition parse_bc(const std::string& s) {
    if (s == "dirichlet") return BoundaryCondition::dirichlet();
    if (s == "neumann") return BoundaryCondition::neumann();
    if (s.rfind("robin:", 0) == 0) {
        double re = 0, im = 0;
        if (std::sscanf(s.c_str() + 6, "%lf,%lf", &re, &im) < 1)
            throw ConfigError("robin:<re>[,<im>]");
        return BoundaryCondition::robin({re, im});
    }
    throw ConfigError("bc must be dirichlet, neumann or robin:re,im");
}

struct ErrorJson {
    static int fail(const std::exception& e, int code) {
        std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
        return code;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spexact: eigenvalues and pseudospectra of truncated Schrodinger operators"};
    app.require_subcommand(1);

    std::string name, window_str, sizes_str, bc_str, csv_path, json_path;
    double s_flag = 10.0, tol_flag = 0;
    std::uint64_t seed_flag = 0;
    std::string case_str;

    auto add_common = [&](CLI::App* cmd, bool with_s) {
        cmd->add_option("experiment", name, "preset name or config JSON path");
        if (with_s) cmd->add_option("--s", s_flag, "truncation size");
        cmd->add_option("--window", window_str, "re_lo,re_hi,im_lo,im_hi");
        cmd->add_option("--tol", tol_flag, "eigenvalue tolerance");
        cmd->add_option("--bc", bc_str, "dirichlet | neumann | robin:re,im");
        cmd->add_option("--seed", seed_flag, "rng seed for inverse iteration");
        cmd->add_option("--csv", csv_path, "CSV output path");
        cmd->add_option("--json", json_path, "JSON output path");
    };

    auto* c_check = app.add_subcommand("check", "verify the decomposition assumptions");
    c_check->add_option("experiment", name, "preset name or config JSON path");
    c_check->add_option("--case", case_str, "I or II (default: auto)");

    auto* c_eigs = app.add_subcommand("eigs", "eigenvalues at one truncation size");
    add_common(c_eigs, true);

    auto* c_sweep = app.add_subcommand("sweep", "eigenvalue trajectories across sizes");
    add_common(c_sweep, false);
    c_sweep->add_option("--sizes", sizes_str, "a:step:b or comma list");

    auto* c_pseudo = app.add_subcommand("pseudo", "smin grid and eps level sets");
    add_common(c_pseudo, true);
    int n_flag = 800, nx_flag = 60, ny_flag = 40;
    std::string rect_str, eps_str = "0.1";
    c_pseudo->add_option("--n", n_flag, "matrix dimension");
    c_pseudo->add_option("--rect", rect_str, "grid rectangle re_lo,re_hi,im_lo,im_hi");
    c_pseudo->add_option("--nx", nx_flag, "grid columns");
    c_pseudo->add_option("--ny", ny_flag, "grid rows");
    c_pseudo->add_option("--eps", eps_str, "comma list of eps levels");

    auto* c_daw = app.add_subcommand("daw", "Attouch-Wets criterion between point sets");
    std::string file_a, file_b, radii_str = "10";
    double daw_eps = -1;
    c_daw->add_option("fileA", file_a)->required();
    c_daw->add_option("fileB", file_b)->required();
    c_daw->add_option("--radii", radii_str, "comma list of ball radii");
    c_daw->add_option("--eps", daw_eps, "level-set eps when inputs are pseudospectrum files");
    c_daw->add_option("--csv", csv_path, "CSV output path");
    c_daw->add_option("--json", json_path, "JSON output path");

    auto* c_rate = app.add_subcommand("rate", "convergence-rate fit for one trajectory");
    std::string sweep_file;
    int traj_id = 0;
    c_rate->add_option("sweep", sweep_file, "sweep JSON file")->required();
    c_rate->add_option("trajectory", traj_id, "trajectory id")->required();
    c_rate->add_option("--json", json_path, "JSON output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_check->parsed()) {
            ExperimentConfig cfg = resolve_config(name);
            std::optional<AssumptionCase> which;
            if (case_str == "I") which = AssumptionCase::I_sectorial;
            else if (case_str == "II") which = AssumptionCase::II_accretive;
            else if (!case_str.empty()) throw ConfigError("--case must be I or II");
            CheckResult res = run_check(cfg, which);
            std::cout << assumption_report_json(res.report);
            return res.report.passed ? 0 : 2;
        }

        if (c_eigs->parsed()) {
            ExperimentConfig cfg = resolve_config(name);
            if (!window_str.empty()) cfg.window = parse_window(window_str);
            if (tol_flag > 0) cfg.tol = tol_flag;
            if (!bc_str.empty()) cfg.right_bc = parse_bc(bc_str);
            if (!bc_str.empty() && cfg.geometry == ExperimentConfig::GeometryKind::Interval)
                cfg.left_bc = parse_bc(bc_str);
            if (seed_flag) cfg.seed = seed_flag;
            EigsResult res = run_eigs(cfg, s_flag);
            if (!csv_path.empty()) {
                if (res.modes) write_file_atomic(csv_path, mode_table_csv(*res.modes));
                else write_file_atomic(csv_path, eigs_csv(res.records));
            }
            if (!json_path.empty())
                write_file_atomic(json_path, eigs_json(cfg.name, s_flag, cfg.window, res.records));
            std::cout << eigs_json(cfg.name, s_flag, cfg.window, res.records);
            return 0;
        }

        if (c_sweep->parsed()) {
            ExperimentConfig cfg = resolve_config(name);
            if (!window_str.empty()) cfg.window = parse_window(window_str);
            if (!sizes_str.empty()) cfg.sizes = parse_sizes(sizes_str);
            if (tol_flag > 0) cfg.tol = tol_flag;
            if (!bc_str.empty() && cfg.geometry == ExperimentConfig::GeometryKind::Interval) {
                cfg.left_bc = parse_bc(bc_str);
                cfg.right_bc = parse_bc(bc_str);
            }
            SweepResult res = run_sweep_experiment(cfg);
            SweepPlan plan;
            plan.sizes = cfg.sizes;
            plan.window = cfg.window;
            plan.tol = cfg.tol;
            if (!csv_path.empty()) write_file_atomic(csv_path, sweep_csv(res.trajectories));
            if (!json_path.empty())
                write_file_atomic(json_path,
                                  sweep_json(cfg.name, plan, res.slices, res.trajectories));
            int converged = 0;
            for (const auto& t : res.trajectories)
                if (t.classification.kind == Classification::Kind::Converged) ++converged;
            std::cout << "{\"experiment\": \"" << cfg.name << "\", \"slices\": "
                      << res.slices.size() << ", \"trajectories\": " << res.trajectories.size()
                      << ", \"converged\": " << converged << "}\n";
            return 0;
        }

        if (c_pseudo->parsed()) {
            ExperimentConfig cfg = resolve_config(name);
            if (seed_flag) cfg.seed = seed_flag;
            Rect rect = rect_str.empty() ? cfg.window : parse_window(rect_str);
            auto eps = parse_list(eps_str);
            PseudospectrumGrid g = run_pseudo(cfg, s_flag, n_flag, rect, nx_flag, ny_flag, eps);
            if (!csv_path.empty()) write_file_atomic(csv_path, pseudo_csv(g));
            if (!json_path.empty()) write_file_atomic(json_path, pseudo_json(g));
            std::cout << "{\"experiment\": \"" << cfg.name << "\", \"nx\": " << g.nx
                      << ", \"ny\": " << g.ny << ", \"levels\": " << g.eps_levels.size() << "}\n";
            return 0;
        }

        if (c_daw->parsed()) {
            auto pa = load_point_set(read_file(file_a), daw_eps);
            auto pb = load_point_set(read_file(file_b), daw_eps);
            auto radii = parse_list(radii_str);
            AttouchWets res = attouch_wets(pa, pb, radii);
            if (!csv_path.empty()) write_file_atomic(csv_path, daw_csv(radii, res));
            if (!json_path.empty()) write_file_atomic(json_path, daw_json(radii, res));
            std::cout << daw_json(radii, res);
            return 0;
        }

        if (c_rate->parsed()) {
            SweepFile sf = load_sweep_json(read_file(sweep_file));
            const Trajectory* t = nullptr;
            for (const auto& tr : sf.trajectories)
                if (tr.id == traj_id) t = &tr;
            if (!t) throw UnknownTrajectory("id " + std::to_string(traj_id));
            if (t->classification.kind != Classification::Kind::Converged)
                throw UnknownTrajectory("trajectory " + std::to_string(traj_id) +
                                        " is not converged");
            RateFit fit = fit_rate(*t, t->classification.limit);
            std::string out = rate_fit_json(traj_id, fit, *t, t->classification.limit);
            if (!json_path.empty()) write_file_atomic(json_path, out);
            std::cout << out;
            return 0;
        }
    } catch (const ConfigError& e) {
        return ErrorJson::fail(e, 3);
    } catch (const std::exception& e) {
        return ErrorJson::fail(e, 1);
    }
    return 0;
}
