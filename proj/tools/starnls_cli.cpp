#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "starnls/scenario.hpp"
#include "starnls/variational.hpp"

using namespace starnls;

namespace {

using Json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_run(const std::string& config, const std::string& out) {
  const Scenario sc = parse_scenario_file(config);
  const int status = run_scenario(sc, out);
  const std::string dir = out.empty() ? sc.outputs.directory : out;
  std::cout << "wrote " << dir << " (exit status " << status << ")\n";
  return status;
}

int cmd_sweep(const std::string& config, const std::string& out, int workers) {
  const Scenario base = parse_scenario_file(config);
  const SweepGrid grid = parse_sweep_text(slurp(config), base, config);
  const auto rows = run_sweep(base, grid, workers);
  const std::filesystem::path dir = out.empty() ? base.outputs.directory : out;
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "sweep.csv");
  sweep_table(rows).write(csv);
  int failed = 0;
  for (const auto& r : rows) failed += r.ok ? 0 : 1;
  std::cout << "sweep: " << rows.size() << " cells, " << failed << " failed, wrote "
            << (dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_thresholds(double p, double omega, double gamma, int edges) {
  const ModelParams mp(edges, gamma, p, -1, omega);
  const auto t = threshold_table(mp);
  Json j;
  j["p"] = t.p;
  j["omega"] = t.omega;
  j["gamma"] = gamma;
  j["s_c"] = t.s_c;
  j["M_Q"] = t.m_line_q;
  j["grad_Q_sq"] = t.grad_line_q;
  j["lp1_Q"] = t.lp1_line_q;
  j["E0_Q"] = t.e_line_q;
  j["me_threshold"] = t.me_threshold;
  j["k2_threshold"] = t.k2_threshold;
  j["n_omega"] = t.n_omega;
  j["C_GN_line"] = t.c_gn_line;
  j["C_GN_direct"] = t.c_gn_direct;
  j["sharp_relation_gap"] = t.sharp_relation_gap();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_gn(double p, double gamma, int edges, int budget, std::uint64_t seed, int restarts) {
  const ModelParams mp(edges, gamma, p, -1);
  GNOptions opts;
  opts.budget = budget;
  opts.seed = seed;
  opts.restarts = restarts;
  const auto est = estimate_gn_constant(mp, opts);
  Json j;
  j["p"] = p;
  j["gamma"] = gamma;
  j["edges"] = edges;
  j["seed"] = seed;
  j["budget"] = budget;
  j["restarts"] = restarts;
  j["estimate"] = est.value;
  j["target_line_constant"] = est.target;
  j["relative_gap"] = (est.value - est.target) / est.target;
  j["ascent_best"] = est.ascent_best;
  j["max_trial_ratio"] = est.max_trial_ratio;
  j["witness_centroid"] = est.witness_centroid;
  j["escape_shifts"] = est.escape_shifts;
  j["escape_series"] = est.escape_series;
  Json dil = Json::array();
  for (const auto& d : est.dilation_series)
    dil.push_back({{"lambda", d.lambda}, {"ratio", d.ratio}, {"vertex_fraction", d.vertex_fraction}});
  j["dilation_series"] = dil;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlinear Schroedinger dynamics on star graphs"};
  app.require_subcommand(1);

  std::string config, out;
  int workers = 0;
  auto* run = app.add_subcommand("run", "Run one scenario config");
  run->add_option("config", config, "YAML scenario")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out, "Output directory (overrides output.directory)");

  auto* sweep = app.add_subcommand("sweep", "Run the parameter grid of a sweep config");
  sweep->add_option("config", config, "YAML scenario with a sweep section")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", out, "Output directory (overrides output.directory)");
  sweep->add_option("-w,--workers", workers, "Concurrent cells (default STARNLS_WORKERS or all cores)");

  double p = 7.0, omega = 1.0, gamma = 0.0;
  int edges = 3;
  auto* thr = app.add_subcommand("thresholds", "Print the line ground-state threshold table");
  thr->add_option("--p", p, "Nonlinearity power (> 5)")->required();
  thr->add_option("--omega", omega, "Frequency")->capture_default_str();
  thr->add_option("--gamma", gamma, "Vertex strength")->capture_default_str();
  thr->add_option("--edges", edges, "Number of edges")->capture_default_str();

  int budget = 200, restarts = 4;
  std::uint64_t seed = 1;
  auto* gn = app.add_subcommand("gn-estimate", "Estimate the graph Gagliardo-Nirenberg constant");
  gn->add_option("--p", p, "Nonlinearity power")->required();
  gn->add_option("--gamma", gamma, "Vertex strength")->capture_default_str();
  gn->add_option("--edges", edges, "Number of edges")->capture_default_str();
  gn->add_option("--budget", budget, "Ascent iterations per restart")->capture_default_str();
  gn->add_option("--seed", seed, "Random seed")->capture_default_str();
  gn->add_option("--restarts", restarts, "Random restarts")->capture_default_str();

  auto* check = app.add_subcommand("check", "Run the built-in property suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, out);
    if (*sweep) return cmd_sweep(config, out, workers);
    if (*thr) return cmd_thresholds(p, omega, gamma, edges);
    if (*gn) return cmd_gn(p, gamma, edges, budget, seed, restarts);
    if (*check) {
      const int failures = run_property_suite(std::cout);
      std::cout << (failures ? "check: FAILED (" + std::to_string(failures) + ")" : std::string("check: ok"))
                << "\n";
      return failures ? 1 : 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
