#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "starnls/dynamics.hpp"
#include "starnls/symmetry.hpp"

using namespace starnls;

TEST_CASE("orders of the named groups") {
  CHECK(groups::by_name("sigma").size() == 3);
  CHECK(groups::by_name("g23").size() == 2);
  CHECK(groups::by_name("g23_tilde").size() == 2);
  CHECK(groups::by_name("sigma_tilde").size() == 3);
  CHECK(generate_group({groups::sigma(), groups::g23()}).size() == 6);
  CHECK(generate_group({groups::sigma_tilde(), groups::g23_tilde()}).size() == 18);
  CHECK_THROWS_AS(groups::by_name("nope"), std::invalid_argument);
}

TEST_CASE("group elements act as documented") {
  const EdgeGrid grid(5.0, 51);
  const auto f = GraphFunction::sample(grid, 3, [](int k, double x) { return cplx(std::exp(-x) * (1.0 + k * x)); });
  const auto g = apply_group_element(f, groups::g23_tilde());
  for (int i = 0; i < grid.n_points(); ++i) {
    CHECK(g.at(0, i) == -f.at(0, i));
    CHECK(g.at(1, i) == -f.at(2, i));
    CHECK(g.at(2, i) == -f.at(1, i));
  }
  const auto s = groups::sigma();
  CHECK(compose(s, compose(s, s)).same_as(GroupElement::identity(3)));
  CHECK_FALSE(s.same_as(GroupElement::identity(3)));
}

TEST_CASE("bad group elements are rejected") {
  const GraphFunction f(EdgeGrid(5.0, 51), 3);
  CHECK_THROWS_AS(apply_group_element(f, {{1, 0, 2}, cplx(2.0)}), std::invalid_argument);
  CHECK_THROWS_AS(apply_group_element(f, {{0, 0, 2}, cplx(1.0)}), std::invalid_argument);
  CHECK_THROWS_AS(apply_group_element(f, {{0, 1}, cplx(1.0)}), std::invalid_argument);
  CHECK_THROWS_AS(project_invariant(f, {groups::sigma()}), std::invalid_argument);
}

TEST_CASE("property: projection is idempotent and lands in the invariant subspace") {
  std::mt19937_64 rng(51);
  const EdgeGrid grid(10.0, 401);
  for (const char* name : {"sigma", "g23", "g23_tilde", "sigma_tilde"}) {
    const auto group = groups::by_name(name);
    for (int r = 0; r < 3; ++r) {
      const auto p = project_invariant(testgen::rough_graph(grid, 3, rng), group);
      CHECK(testgen::rel_l2(project_invariant(p, group), p) < 1e-15);
      for (const auto& g : group) CHECK(norm_lq(apply_group_element(p, g) - p, 2.0) < 1e-14);
    }
  }
}

TEST_CASE("odd sector: g23_tilde-invariant data follows the free line flow") {
  const EdgeGrid grid(30.0, 1501);
  const auto shape = [](double x) { return cplx(x * std::exp(-0.5 * (x - 1.0) * (x - 1.0)), 0.2 * x * std::exp(-x * x)); };
  const auto f = project_invariant(GraphFunction::sample(grid, 3, [&](int k, double x) { return k == 1 ? shape(x) : cplx(0.0); }),
                                   groups::by_name("g23_tilde"));
  const auto u = propagate_graph_linear(f, 0.8, {0.01, LinearMethod::q_conjugated, 3.0});
  // the invariant part is (0, g/2, -g/2); its odd line extension evolves freely
  const auto line = propagate_free_line(
      LineFunction::sample(grid, [&](double x) { return x >= 0 ? 0.5 * shape(x) : -0.5 * shape(-x); }), 0.8);
  double worst = 0.0;
  for (int i = 0; i < grid.n_points(); ++i) {
    worst = std::max(worst, std::abs(u.at(0, i)));
    worst = std::max(worst, std::abs(u.at(1, i) - line.at(i)));
    worst = std::max(worst, std::abs(u.at(2, i) + line.at(i)));
  }
  CHECK(worst < 1e-13);
}

TEST_CASE("invariant data stays invariant under the nonlinear flow") {
  const EdgeGrid grid(15.0, 301);
  const auto group = groups::by_name("sigma");
  const auto f = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(0.8 * std::exp(x - 0.5 * x * x)); });
  EvolveConfig cfg;
  cfg.t_end = 0.5;
  cfg.store_stride = 10;
  const auto tr = evolve_nls(f, ModelParams(3, 1.0, 7.0, -1), cfg);
  for (double d : invariance_drift(tr, group)) CHECK(d < 1e-13);
}
