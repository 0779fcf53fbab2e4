#include "spexact/report_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace spexact {

using nlohmann::json;

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);  // shortest round-trip form
    return std::string(buf, res.ptr);
}

namespace {

const char* class_name(Classification::Kind k) {
    switch (k) {
        case Classification::Kind::Converged: return "converged";
        case Classification::Kind::DivergingPair: return "diverging_pair";
        case Classification::Kind::Unresolved: return "unresolved";
    }
    return "unresolved";
}

Classification::Kind class_from_name(const std::string& s) {
    if (s == "converged") return Classification::Kind::Converged;
    if (s == "diverging_pair") return Classification::Kind::DivergingPair;
    return Classification::Kind::Unresolved;
}

json record_json(const EigenRecord& r) {
    return json{{"re", r.lambda.real()},
                {"im", r.lambda.imag()},
                {"mult", r.multiplicity},
                {"residual", r.residual},
                {"s", r.s}};
}

EigenRecord record_from(const json& j) {
    EigenRecord r;
    r.lambda = Complex(j.at("re").get<double>(), j.at("im").get<double>());
    r.multiplicity = j.at("mult").get<int>();
    r.residual = j.at("residual").get<double>();
    r.s = j.at("s").get<double>();
    return r;
}

}  // namespace

std::string eigs_csv(const std::vector<EigenRecord>& records) {
    std::string out = "re,im,mult,residual\n";
    for (const auto& r : records) {
        out += format_double(r.lambda.real()) + "," + format_double(r.lambda.imag()) + "," +
               std::to_string(r.multiplicity) + "," + format_double(r.residual) + "\n";
    }
    return out;
}

std::string sweep_csv(const std::vector<Trajectory>& trajectories) {
    std::string out = "s,re,im,mult,traj,class\n";
    for (const auto& t : trajectories) {
        for (const auto& r : t.records) {
            out += format_double(r.s) + "," + format_double(r.lambda.real()) + "," +
                   format_double(r.lambda.imag()) + "," + std::to_string(r.multiplicity) + "," +
                   std::to_string(t.id) + "," + class_name(t.classification.kind) + "\n";
        }
    }
    return out;
}

std::string mode_table_csv(const ModeTable& table) {
    std::string out = "l,re,im\n";
    for (const auto& m : table.modes)
        for (const auto& r : m.records)
            out += std::to_string(m.l) + "," + format_double(r.lambda.real()) + "," +
                   format_double(r.lambda.imag()) + "\n";
    return out;
}

std::string pseudo_csv(const PseudospectrumGrid& g) {
    std::string out = "re,im,smin\n";
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Complex z = g.grid_point(i, j);
            out += format_double(z.real()) + "," + format_double(z.imag()) + "," +
                   format_double(g.at(i, j)) + "\n";
        }
    return out;
}

std::string daw_csv(const std::vector<double>& radii, const AttouchWets& result) {
    std::string out = "rho,value\n";
    for (size_t i = 0; i < radii.size(); ++i)
        out += format_double(radii[i]) + "," + format_double(result.per_rho[i]) + "\n";
    return out;
}

std::string eigs_json(const std::string& label, double s, const Rect& window,
                      const std::vector<EigenRecord>& records) {
    json j;
    j["experiment"] = label;
    j["s"] = s;
    j["window"] = {window.re_lo, window.re_hi, window.im_lo, window.im_hi};
    j["records"] = json::array();
    for (const auto& r : records) j["records"].push_back(record_json(r));
    return j.dump(2) + "\n";
}

std::vector<EigenRecord> load_eigs_json(const std::string& text) {
    json j = json::parse(text);
    std::vector<EigenRecord> out;
    for (const auto& r : j.at("records")) out.push_back(record_from(r));
    return out;
}

std::string sweep_json(const std::string& label, const SweepPlan& plan,
                       const std::vector<SizeSlice>& slices,
                       const std::vector<Trajectory>& trajectories) {
    json j;
    j["experiment"] = label;
    j["sizes"] = plan.sizes;
    j["window"] = {plan.window.re_lo, plan.window.re_hi, plan.window.im_lo, plan.window.im_hi};
    j["tol"] = plan.tol;
    j["slices"] = json::array();
    for (const auto& sl : slices) {
        json js;
        js["s"] = sl.s;
        js["records"] = json::array();
        for (const auto& r : sl.records) js["records"].push_back(record_json(r));
        j["slices"].push_back(std::move(js));
    }
    j["trajectories"] = json::array();
    for (const auto& t : trajectories) {
        json jt;
        jt["id"] = t.id;
        jt["class"] = class_name(t.classification.kind);
        if (t.partner) jt["partner"] = *t.partner;
        else jt["partner"] = nullptr;
        jt["limit"] = {{"re", t.classification.limit.real()},
                       {"im", t.classification.limit.imag()}};
        jt["records"] = json::array();
        for (const auto& r : t.records) jt["records"].push_back(record_json(r));
        j["trajectories"].push_back(std::move(jt));
    }
    return j.dump(2) + "\n";
}

SweepFile load_sweep_json(const std::string& text) {
    json j = json::parse(text);
    SweepFile out;
    for (const auto& js : j.at("slices")) {
        SizeSlice sl;
        sl.s = js.at("s").get<double>();
        for (const auto& r : js.at("records")) sl.records.push_back(record_from(r));
        out.slices.push_back(std::move(sl));
    }
    for (const auto& jt : j.at("trajectories")) {
        Trajectory t;
        t.id = jt.at("id").get<int>();
        t.classification.kind = class_from_name(jt.at("class").get<std::string>());
        if (!jt.at("partner").is_null()) {
            t.partner = jt.at("partner").get<int>();
            t.classification.partner = t.partner;
        }
        t.classification.limit = Complex(jt.at("limit").at("re").get<double>(),
                                         jt.at("limit").at("im").get<double>());
        for (const auto& r : jt.at("records")) t.records.push_back(record_from(r));
        out.trajectories.push_back(std::move(t));
    }
    return out;
}

std::string pseudo_json(const PseudospectrumGrid& g) {
    json j;
    j["rect"] = {g.rect.re_lo, g.rect.re_hi, g.rect.im_lo, g.rect.im_hi};
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    j["level_sets"] = json::array();
    for (size_t k = 0; k < g.eps_levels.size(); ++k) {
        json jl;
        jl["eps"] = g.eps_levels[k];
        jl["points"] = json::array();
        for (const auto& z : g.level_sets[k]) jl["points"].push_back({z.real(), z.imag()});
        j["level_sets"].push_back(std::move(jl));
    }
    return j.dump(2) + "\n";
}

std::string points_json(const std::vector<Complex>& points) {
    json j;
    j["points"] = json::array();
    for (const auto& z : points) j["points"].push_back({z.real(), z.imag()});
    return j.dump(2) + "\n";
}

std::vector<Complex> load_point_set(const std::string& text, double eps) {
    json j = json::parse(text);
    std::vector<Complex> out;
    const json* arr = nullptr;
    if (j.contains("points")) {
        arr = &j.at("points");
    } else if (j.contains("level_sets")) {
        const auto& ls = j.at("level_sets");
        if (ls.empty()) throw EmptySet("pseudospectrum file has no level sets");
        if (eps < 0) {
            arr = &ls.front().at("points");
        } else {
            for (const auto& l : ls)
                if (std::abs(l.at("eps").get<double>() - eps) < 1e-15) arr = &l.at("points");
            if (!arr) throw ConfigError("no level set with the requested eps");
        }
    } else {
        throw ConfigError("expected a points or pseudospectrum JSON file");
    }
    for (const auto& p : *arr) out.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    return out;
}

std::string daw_json(const std::vector<double>& radii, const AttouchWets& result) {
    json j;
    j["radii"] = radii;
    j["per_rho"] = result.per_rho;
    j["max"] = result.max;
    return j.dump(2) + "\n";
}

std::string assumption_report_json(const AssumptionReport& rep) {
    json j;
    j["case"] = rep.which_case == AssumptionCase::I_sectorial ? "I" : "II";
    j["passed"] = rep.passed;
    j["measured"] = {{"theta_hat", rep.measured.theta_hat},
                     {"c0_hat", rep.measured.c0_hat},
                     {"a_grad_hat", rep.measured.a_grad_hat},
                     {"b_grad_hat", rep.measured.b_grad_hat},
                     {"a_u_hat", rep.measured.a_u_hat},
                     {"b_u_hat", rep.measured.b_u_hat},
                     {"growth_witness", rep.measured.growth_witness}};
    j["violations"] = json::array();
    for (const auto& v : rep.violations) {
        j["violations"].push_back({{"item", v.item},
                                   {"where", {v.where[0], v.where[1], v.where[2]}},
                                   {"value", v.value}});
    }
    return j.dump(2) + "\n";
}

std::string rate_fit_json(int trajectory_id, const RateFit& fit, const Trajectory& t,
                          Complex limit) {
    json j;
    j["trajectory"] = trajectory_id;
    j["model"] = fit.model == RateFit::Model::Exponential ? "exponential" : "algebraic";
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r_squared"] = fit.r_squared;
    j["series"] = json::array();
    for (const auto& r : t.records) {
        double e = std::abs(r.lambda - limit);
        if (e > 1e-13) j["series"].push_back({{"s", r.s}, {"log_err", std::log(e)}});
    }
    return j.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp);
        f.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw ConfigError("cannot rename into " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace spexact
