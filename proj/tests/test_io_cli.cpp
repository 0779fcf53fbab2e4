#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "spexact/expr.hpp"
#include "spexact/experiments.hpp"
#include "spexact/report_io.hpp"
#include "spexact/separable.hpp"

using namespace spexact;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    std::string cmd = std::string(SPEXACT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

struct TmpDir {
    fs::path path;
    TmpDir() {
        path = fs::temp_directory_path() / ("spexact_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TmpDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("expression parser evaluates complex polynomials") {
    auto f = parse_expression("(1+1i)*x^2 + 1");
    CHECK(f(2.0) == Complex(5, 4));
    auto g = parse_expression("i*sgn(x)*abs(x)^3 - 0.5*abs(x)^3");
    CHECK(g(-2.0) == Complex(-4, -8));
    auto h = parse_expression("1e-2*x - 2i");
    CHECK(h(100.0) == Complex(1, -2));
    auto powneg = parse_expression("x^-2");
    CHECK(powneg(2.0) == Complex(0.25, 0));
    CHECK_THROWS_AS(parse_expression("x +"), ConfigError);
    CHECK_THROWS_AS(parse_expression("foo(x)"), ConfigError);
}

TEST_CASE("eigs JSON round-trips to identical records") {
    std::vector<EigenRecord> recs = {{Complex(1.0000000001, -2.25e-13), 1, 1e-11, 8.0},
                                     {Complex(4.5, 0.333333333333333331), 2, 3e-10, 8.0}};
    std::string text = eigs_json("t", 8.0, Rect{0, 10, -5, 5}, recs);
    auto back = load_eigs_json(text);
    REQUIRE(back.size() == recs.size());
    for (size_t i = 0; i < recs.size(); ++i) {
        CHECK(back[i].lambda.real() == recs[i].lambda.real());
        CHECK(back[i].lambda.imag() == recs[i].lambda.imag());
        CHECK(back[i].multiplicity == recs[i].multiplicity);
        CHECK(back[i].residual == recs[i].residual);
        CHECK(back[i].s == recs[i].s);
    }
}

TEST_CASE("sweep JSON round-trips slices and trajectories") {
    SweepPlan plan;
    plan.sizes = {1, 2, 3};
    plan.window = Rect{0, 5, -2, 2};
    plan.tol = 1e-9;
    std::vector<SizeSlice> slices(3);
    std::vector<Trajectory> trajs(1);
    for (int k = 0; k < 3; ++k) {
        slices[k].s = plan.sizes[k];
        EigenRecord r{Complex(2 + 0.1 / (k + 1), -0.05 * k), 1, 1e-10, plan.sizes[k]};
        slices[k].records.push_back(r);
        trajs[0].records.push_back(r);
    }
    trajs[0].id = 0;
    trajs[0].classification = {Classification::Kind::Converged, trajs[0].records.back().lambda,
                               std::nullopt};
    std::string text = sweep_json("t", plan, slices, trajs);
    auto back = load_sweep_json(text);
    REQUIRE(back.slices.size() == 3);
    REQUIRE(back.trajectories.size() == 1);
    CHECK(back.trajectories[0].classification.kind == Classification::Kind::Converged);
    CHECK(back.trajectories[0].classification.limit == trajs[0].classification.limit);
    for (int k = 0; k < 3; ++k) {
        CHECK(back.slices[k].records[0].lambda == slices[k].records[0].lambda);
        CHECK(back.trajectories[0].records[k].lambda == trajs[0].records[k].lambda);
    }
}

TEST_CASE("point-set loader reads bare points and pseudospectrum level sets") {
    std::string pts = points_json({Complex(1, 2), Complex(-3, 0.5)});
    auto a = load_point_set(pts);
    REQUIRE(a.size() == 2);
    CHECK(a[0] == Complex(1, 2));

    PseudospectrumGrid g;
    g.rect = Rect{0, 1, 0, 1};
    g.nx = g.ny = 8;
    g.eps_levels = {0.1, 0.5};
    g.level_sets = {{Complex(0, 0)}, {Complex(0, 0), Complex(1, 1)}};
    auto b = load_point_set(pseudo_json(g), 0.5);
    REQUIRE(b.size() == 2);
    CHECK(b[1] == Complex(1, 1));
}

TEST_CASE("csv emitters are deterministic and use pinned headers") {
    std::vector<EigenRecord> recs = {{Complex(1.25, -0.5), 1, 1e-12, 6.0}};
    std::string a = eigs_csv(recs);
    std::string b = eigs_csv(recs);
    CHECK(a == b);
    CHECK(a.rfind("re,im,mult,residual\n", 0) == 0);
    CHECK(a.find("\r") == std::string::npos);

    Trajectory t;
    t.id = 3;
    t.records.push_back({Complex(2, 0.25), 1, 1e-11, 4.0});
    t.classification.kind = Classification::Kind::Unresolved;
    std::string s = sweep_csv({t});
    CHECK(s.rfind("s,re,im,mult,traj,class\n", 0) == 0);
    CHECK(s.find(",unresolved\n") != std::string::npos);
}

TEST_CASE("cli: check passes for ix3 and harmonic, fails for a merged split") {
    CHECK(run_cli("check ix3") == 0);
    CHECK(run_cli("check harmonic") == 0);
    TmpDir tmp;
    write_file_atomic(tmp.file("merged.json"),
                      "{\"name\": \"merged\", \"potential\": {\"expr\": \"i*x^3 - x^2\"}, "
                      "\"sizes\": [10]}");
    CHECK(run_cli("check " + tmp.file("merged.json")) == 2);
    CHECK(run_cli("check no_such_preset") == 3);
}

TEST_CASE("cli: eigs reruns are byte-identical and JSON reloads") {
    TmpDir tmp;
    std::string base = "eigs harmonic --s 4 --window 0,4,-1,1 ";
    CHECK(run_cli(base + "--csv " + tmp.file("a.csv") + " --json " + tmp.file("a.json")) == 0);
    CHECK(run_cli(base + "--csv " + tmp.file("b.csv") + " --json " + tmp.file("b.json")) == 0);
    CHECK(read_file(tmp.file("a.csv")) == read_file(tmp.file("b.csv")));
    CHECK(read_file(tmp.file("a.json")) == read_file(tmp.file("b.json")));
    auto recs = load_eigs_json(read_file(tmp.file("a.json")));
    REQUIRE(recs.size() == 2);
    CHECK(std::abs(recs[0].lambda - Complex(1, 0)) < 1e-3);
    CHECK(std::abs(recs[1].lambda - Complex(3, 0)) < 1e-3);
}

TEST_CASE("cli: daw on identical inputs is zero for every radius") {
    TmpDir tmp;
    std::string pts = points_json({Complex(1, 2), Complex(-3, 0.5), Complex(4, -4)});
    write_file_atomic(tmp.file("a.json"), pts);
    write_file_atomic(tmp.file("b.json"), pts);
    std::string out = tmp.file("d.json");
    CHECK(run_cli("daw " + tmp.file("a.json") + " " + tmp.file("b.json") +
                  " --radii 5,10,20 --json " + out) == 0);
    auto j = read_file(out);
    CHECK(j.find("\"max\": 0.0") != std::string::npos);
}

TEST_CASE("cli: rate recovers a synthetic exponential slope") {
    TmpDir tmp;
    SweepPlan plan;
    std::vector<SizeSlice> slices;
    Trajectory t;
    t.id = 0;
    Complex limit(2, 0);
    for (double s = 1; s <= 8; s += 1) {
        plan.sizes.push_back(s);
        EigenRecord r{limit + std::exp(-2.0 * s), 1, 0.0, s};
        SizeSlice sl;
        sl.s = s;
        sl.records.push_back(r);
        slices.push_back(sl);
        t.records.push_back(r);
    }
    t.classification = {Classification::Kind::Converged, limit + std::exp(-16.0), std::nullopt};
    write_file_atomic(tmp.file("sweep.json"), sweep_json("syn", plan, slices, {t}));
    std::string out = tmp.file("rate.json");
    CHECK(run_cli("rate " + tmp.file("sweep.json") + " 0 --json " + out) == 0);
    std::string j = read_file(out);
    CHECK(j.find("exponential") != std::string::npos);
    CHECK(run_cli("rate " + tmp.file("sweep.json") + " 7") == 1);  // unknown trajectory
}

TEST_CASE("cli: SPEXACT_CONFIG supplies the default experiment") {
    TmpDir tmp;
    write_file_atomic(tmp.file("cfg.json"), "{\"preset\": \"ix3\"}");
    std::string cmd = "SPEXACT_CONFIG=" + tmp.file("cfg.json") + " " + SPEXACT_CLI_PATH +
                      " check > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 0);
}

TEST_CASE("config json: custom potential with u split and delta") {
    std::string cfg = R"({
      "name": "custom",
      "potential": {"expr": "i*x^3", "u_expr": "0.5*abs(x)^3",
                    "delta": {"site": 0.25, "coupling": [0, 1]}},
      "window": [0, 10, -2, 2],
      "sizes": [4, 5],
      "tol": 1e-8
    })";
    auto c = config_from_json(cfg);
    CHECK(c.potential.q0_at(2.0) == Complex(0, 8));
    CHECK(c.potential.u_at(-2.0) == doctest::Approx(4.0));
    REQUIRE(c.potential.delta().has_value());
    CHECK(c.potential.delta()->site == 0.25);
    CHECK(c.tol == 1e-8);
    auto p = interval_problem(c, 5.0);
    REQUIRE(p.interfaces.size() == 1);
    CHECK(p.interfaces[0].coupling == Complex(0, 1));
}

TEST_CASE("mode table csv uses the pinned l,re,im layout") {
    ModeTable t;
    t.geometry = Annulus2dGeometry{1.0, 10.0};
    t.window = Rect{0, 20, 0, 15};
    t.modes.push_back({0, 1, {{Complex(8.1962583, 9.8951098), 1, 1e-9, 10.0}}});
    t.modes.push_back({1, 2, {{Complex(8.5747825, 9.9950630), 1, 1e-9, 10.0}}});
    std::string csv = mode_table_csv(t);
    CHECK(csv.rfind("l,re,im\n", 0) == 0);
    CHECK(csv.find("0,8.1962583,9.8951098") != std::string::npos);
    CHECK(csv.find("1,8.5747825,9.995063") != std::string::npos);
}

TEST_CASE("check run for the declared U-split fits b_U below one") {
    ExperimentConfig cfg = preset_experiment("ix3_minus_x2");
    CheckResult res = run_check(cfg, AssumptionCase::II_accretive);
    CHECK(res.report.passed);
    CHECK(res.report.measured.b_u_hat < 1.0);
    CHECK(res.report.measured.b_u_hat > 0.0);
}
