#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "starnls/scenario.hpp"

using namespace starnls;

namespace {

const std::string kBase = R"(model:
  edges: 3
  gamma: 1.0
  p: 7
grid:
  length: 20
  h: 0.05
initial:
  type: gaussian
  radial: true
  center: 1.0
  amplitude: 0.5
evolve:
  dt: 0.01
  t_end: 0.2
  store_stride: 5
)";

std::string error_of(const std::string& text) {
  try {
    (void)parse_scenario_text(text, "cfg.yaml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("a minimal scenario parses with defaults") {
  const auto sc = parse_scenario_text(kBase);
  CHECK(sc.model.p() == 7.0);
  CHECK(sc.model.mu() == -1);
  CHECK(sc.grid.h() == doctest::Approx(0.05));
  CHECK(sc.evolve.splitting == Splitting::suzuki4);
  CHECK(sc.diagnostics.symmetry_elements.empty());
}

TEST_CASE("missing p names the field and the line") {
  std::ifstream in(std::string(STARNLS_TEST_DATA) + "/missing_p.yaml");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto msg = error_of(ss.str());
  CHECK(msg.find("model.p") != std::string::npos);
  CHECK(msg.find("cfg.yaml:2") != std::string::npos);
}

TEST_CASE("unknown and ill-typed fields are rejected with their line") {
  const auto unknown = error_of(kBase + "  wobble: 3\n");
  CHECK(unknown.find("evolve.wobble") != std::string::npos);
  CHECK(unknown.find(":17") != std::string::npos);
  CHECK(error_of("model:\n  p: seven\n").find("model.p") != std::string::npos);
  CHECK(error_of("model:\n  p: 7\n  gamma: -1\n").find("model.gamma") != std::string::npos);
  CHECK(error_of("model: [1, 2\n").find("parse error") != std::string::npos);
  CHECK(error_of("").find("empty") != std::string::npos);
}

TEST_CASE("symmetry by name or by generators") {
  auto sc = parse_scenario_text(kBase + "diagnostics:\n  symmetry: sigma\n");
  CHECK(sc.diagnostics.symmetry_elements.size() == 3);
  sc = parse_scenario_text(kBase + "diagnostics:\n  symmetry:\n    - {perm: [2, 3, 1]}\n    - {perm: [1, 3, 2], phase: [-1, 0]}\n");
  CHECK(sc.diagnostics.symmetry_group == "custom");
  CHECK(sc.diagnostics.symmetry_elements.size() == 6);
  CHECK(error_of(kBase + "diagnostics:\n  symmetry:\n    - {perm: [1, 1, 2]}\n").find("perm") != std::string::npos);
  CHECK(error_of(kBase + "diagnostics:\n  symmetry:\n    - {perm: [1, 2, 3], phase: [2, 0]}\n").find("modulus") != std::string::npos);
  CHECK(error_of(kBase + "diagnostics:\n  symmetry: octahedral\n").find("symmetry") != std::string::npos);
}

TEST_CASE("sweep grids") {
  const auto base = parse_scenario_text(kBase);
  auto g = parse_sweep_text("sweep:\n  gamma: [0, 1, 2]\n", base);
  CHECK(g.gammas.size() == 3);
  CHECK(g.scales == std::vector<double>{1.0});
  g = parse_sweep_text("sweep:\n  scale: []\n", base);
  CHECK(g.scales.empty());
  CHECK(run_sweep(base, g, 1).empty());
  CHECK_THROWS_AS(parse_sweep_text("model:\n  p: 7\n", base), ConfigError);
}

TEST_CASE("gamma sweep is deterministic and independent of the worker count") {
  const auto base = parse_scenario_text(kBase);
  const auto g = parse_sweep_text("sweep:\n  gamma: [0.5, 1.0]\n  scale: [0.5, 1.0]\n", base);
  const auto a = run_sweep(base, g, 1), b = run_sweep(base, g, 2);
  REQUIRE(a.size() == 4);
  REQUIRE(b.size() == 4);
  std::ostringstream sa, sb;
  sweep_table(a).write(sa);
  sweep_table(b).write(sb);
  CHECK(sa.str() == sb.str());
  CHECK(a[0].scale == 0.5);
  CHECK(a[1].scale == 1.0);
  CHECK(a[2].gamma == 1.0);
  for (const auto& r : a) CHECK(r.ok);
}

TEST_CASE("worker budget honours the environment") {
  setenv("STARNLS_WORKERS", "3", 1);
  CHECK(worker_budget() == 3);
  unsetenv("STARNLS_WORKERS");
  CHECK(worker_budget() >= 1);
}

TEST_CASE("execute is deterministic and writes the declared outputs") {
  const auto sc = parse_scenario_text(kBase + "diagnostics:\n  symmetry: sigma\n  virial: [5]\n  scattering: true\n");
  const auto a = execute_scenario(sc), b = execute_scenario(sc);
  CHECK(verdict_json(a, sc) == verdict_json(b, sc));
  CHECK(a.verdict.has_value());
  for (double d : a.symmetry_drift) CHECK(d < 1e-12);
  const auto dir = std::filesystem::temp_directory_path() / "starnls_scenario_test";
  std::filesystem::remove_all(dir);
  CHECK(run_scenario(sc, dir.string()) == 0);
  CHECK(std::filesystem::exists(dir / "diagnostics.csv"));
  CHECK(std::filesystem::exists(dir / "verdict.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("edge soliton initial data") {
  const auto sc = parse_scenario_text(R"(model: {p: 7, gamma: 0}
grid: {length: 30, h: 0.05}
initial: {type: edge_soliton, edge: 2, y: 10}
)");
  const auto f = build_initial_data(sc);
  CHECK(std::abs(f.at(1, 200)) == doctest::Approx(soliton_value(7.0, 1.0, 0.0)));
  CHECK(std::abs(f.at(0, 200)) == doctest::Approx(soliton_value(7.0, 1.0, 20.0)));
}
