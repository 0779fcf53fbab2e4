#pragma once

#include <string>
#include <vector>

#include "spexact/matrix_spectra.hpp"
#include "spexact/potentials.hpp"
#include "spexact/separable.hpp"
#include "spexact/sweep.hpp"

namespace spexact {

// Text serialization; column orders and JSON schemas are frozen in
// docs/formats.md. All files are written atomically (temp + rename), CSV with
// '.' decimals, '\n' endings, and shortest round-trip doubles so reruns are
// byte-identical.

std::string format_double(double v);

// --- CSV emitters ---
std::string eigs_csv(const std::vector<EigenRecord>& records);
std::string sweep_csv(const std::vector<Trajectory>& trajectories);
std::string mode_table_csv(const ModeTable& table);
std::string pseudo_csv(const PseudospectrumGrid& grid);
std::string daw_csv(const std::vector<double>& radii, const AttouchWets& result);

// --- JSON emitters ---
std::string eigs_json(const std::string& label, double s, const Rect& window,
                      const std::vector<EigenRecord>& records);
std::string sweep_json(const std::string& label, const SweepPlan& plan,
                       const std::vector<SizeSlice>& slices,
                       const std::vector<Trajectory>& trajectories);
std::string pseudo_json(const PseudospectrumGrid& grid);
std::string points_json(const std::vector<Complex>& points);
std::string daw_json(const std::vector<double>& radii, const AttouchWets& result);
std::string assumption_report_json(const AssumptionReport& report);
std::string rate_fit_json(int trajectory_id, const RateFit& fit, const Trajectory& t,
                          Complex limit);

// --- JSON loaders (round-trip counterparts) ---
std::vector<EigenRecord> load_eigs_json(const std::string& text);
struct SweepFile {
    std::vector<SizeSlice> slices;
    std::vector<Trajectory> trajectories;
};
SweepFile load_sweep_json(const std::string& text);
// accepts a bare points file or a pseudospectrum file (eps < 0 = sole/first level)
std::vector<Complex> load_point_set(const std::string& text, double eps = -1);

void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace spexact
