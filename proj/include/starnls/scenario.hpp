#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "starnls/dynamics.hpp"
#include "starnls/io.hpp"
#include "starnls/symmetry.hpp"

namespace starnls {

/// Parse or validation failure; the message names the field and line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProfileEntry {
  double t_shift = 0.0;
  double y_shift = 0.0;
  int edge = 1;  // 1-based
  std::string shape = "gaussian";  // gaussian | sech | bump
  double width = 1.0;
  double amplitude = 1.0;
  double velocity = 0.0;
};

struct InitialDataSpec {
  enum class Kind { edge_soliton, radial_soliton, gaussian, profile_sum, file };
  Kind kind = Kind::gaussian;
  int edge = 1;  // 1-based
  double y = 0.0;
  double scale = 1.0;
  double velocity = 0.0;
  bool radial = false;
  double width = 1.0;
  double center = 0.0;
  double amplitude = 1.0;
  std::vector<ProfileEntry> profiles;
  std::string path;
};

struct DiagnosticsSpec {
  bool dichotomy = true;
  std::vector<double> virial_radii;
  bool scattering = false;
  /// Name of a built-in group, or "custom" for explicit generators.
  std::string symmetry_group;
  /// Closed element list of the group (empty: no symmetry diagnostic).
  std::vector<GroupElement> symmetry_elements;
  std::vector<double> dispersive_times;
};

struct OutputSpec {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool svg = false;
  bool snapshots = false;
};

struct Scenario {
  ModelParams model{3, 0.0, 7.0, -1};
  EdgeGrid grid{60.0, 3001};
  InitialDataSpec initial;
  EvolveConfig evolve;
  DiagnosticsSpec diagnostics;
  OutputSpec outputs;
  std::uint64_t seed = 1;
  /// Directory of the config file; relative file paths resolve against it.
  std::string base_dir = ".";
};

/// Parameter grid of a sweep. An absent list means the base value only; an
/// explicitly empty list gives an empty sweep.
struct SweepGrid {
  std::vector<double> scales;
  std::vector<double> gammas;
  std::vector<double> ps;
};

Scenario parse_scenario_text(const std::string& text, const std::string& origin = "<config>");
Scenario parse_scenario_file(const std::string& path);
SweepGrid parse_sweep_text(const std::string& text, const Scenario& base,
                           const std::string& origin = "<config>");

const char* to_string(InitialDataSpec::Kind kind);

/// Initial data on the scenario grid. edge_soliton puts Q(x - y) on the
/// designated edge and Q(x + y) on the others, times scale, with e^{ivx} on
/// the designated edge.
GraphFunction build_initial_data(const Scenario& sc);

struct ScenarioResult {
  Trajectory trajectory;
  std::optional<ThresholdTable> thresholds;
  std::optional<DichotomyVerdict> verdict;
  std::optional<ScatteringReport> scattering;
  std::optional<BlowupReport> blowup;
  std::vector<VirialSeries> virial;
  std::vector<double> symmetry_drift;
  std::vector<double> dispersive;
  double omega_star = 0.0;
  int exit_status = 0;
};

/// Runs the evolution and every requested diagnostic without touching disk.
ScenarioResult execute_scenario(const Scenario& sc);

/// execute_scenario plus diagnostics.csv, verdict.json and the optional
/// snapshots and plots.svg under `out_dir` (scenario directory if empty).
/// Returns 0 on success, 3 on boundary contamination, 4 on non-finite data.
int run_scenario(const Scenario& sc, const std::string& out_dir = "");

io::CsvTable diagnostics_table(const ScenarioResult& r, const Scenario& sc);
std::string verdict_json(const ScenarioResult& r, const Scenario& sc);

struct SweepRow {
  double scale = 0.0;
  double gamma = 0.0;
  double p = 0.0;
  bool ok = false;
  std::string error;
  std::string verdict;
  double me_margin = 0.0;
  double k2_margin = 0.0;
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  std::string termination;
  double termination_time = 0.0;
  double final_h1 = 0.0;
  double cauchy_tail = 0.0;
};

/// Worker budget from STARNLS_WORKERS, else the OpenMP default.
int worker_budget();

/// One isolated run per cell, concurrently up to the worker budget, merged in
/// declaration order (scale fastest, then gamma, then p).
std::vector<SweepRow> run_sweep(const Scenario& base, const SweepGrid& grid, int workers = 0);
io::CsvTable sweep_table(const std::vector<SweepRow>& rows);

/// Quick built-in property suite used by the `check` verb; prints one line per
/// property and returns the number of failures.
int run_property_suite(std::ostream& os);

}  // namespace starnls
