#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "starnls/propagator.hpp"

using namespace starnls;

namespace {

// e^{it d_xx} applied to exp(-x^2/2)
cplx free_gaussian(double x, double t) {
  const cplx s(1.0, 2.0 * t);
  return std::exp(-x * x / (2.0 * s)) / std::sqrt(s);
}

LineFunction gaussian_line(const EdgeGrid& g) {
  return LineFunction::sample(g, [](double x) { return cplx(std::exp(-0.5 * x * x)); });
}

double gap_to_closed_form(const LineFunction& u, double t) {
  const auto exact = LineFunction::sample(u.half_grid(), [&](double x) { return free_gaussian(x, t); });
  return norm_lq(u - exact, 2.0) / norm_lq(exact, 2.0);
}

}  // namespace

TEST_CASE("spectral free flow reproduces the spreading Gaussian") {
  const EdgeGrid grid(40.0, 2001);
  for (double t : {0.5, 1.0, 3.0}) CHECK(gap_to_closed_form(propagate_free_line(gaussian_line(grid), t), t) < 1e-9);
}

TEST_CASE("line Crank-Nicolson converges at second order to the Gaussian") {
  auto err = [](int n, double dt) {
    const EdgeGrid grid(40.0, n);
    return gap_to_closed_form(propagate_line_cn(gaussian_line(grid), 1.0, 0.0, dt), 1.0);
  };
  const double e1 = err(801, 0.05), e2 = err(1601, 0.025);
  CHECK(e1 < 1e-2);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("delta line leaves odd data to the free flow") {
  const EdgeGrid grid(30.0, 1501);
  const auto g = LineFunction::sample(grid, [](double x) { return cplx(x * std::exp(-x * x), 0.0); });
  const auto a = propagate_delta_line(g, 0.7, 2.5, 0.01);
  const auto b = propagate_free_line(g, 0.7);
  CHECK(norm_lq(a - b, 2.0) < 1e-13);
}

TEST_CASE("delta line at zero strength matches the free flow to discretization error") {
  const EdgeGrid grid(40.0, 2001);
  const auto a = propagate_delta_line(gaussian_line(grid), 1.0, 0.0, 0.01);
  CHECK(gap_to_closed_form(a, 1.0) < 5e-4);
}

TEST_CASE("radial graph data follows the even line problem with the same delta") {
  const EdgeGrid grid(20.0, 801);
  const double gamma = 1.5;
  const auto shape = [&](double x) { return cplx(std::exp(gamma * std::abs(x) - x * x)); };
  const auto f = GraphFunction::sample(grid, 3, [&](int, double x) { return shape(x); });
  const auto u = propagate_graph_linear(f, 0.8, {0.01, LinearMethod::direct_cn, gamma});
  const auto line = propagate_line_cn(LineFunction::sample(grid, shape), 0.8, gamma, 0.01);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < grid.n_points(); ++i) worst = std::max(worst, std::abs(u.at(k, i) - line.at(i)));
  CHECK(worst < 1e-12);
}

TEST_CASE("property: direct CN is unitary and conserves the discrete energy norm") {
  std::mt19937_64 rng(31);
  const EdgeGrid grid(20.0, 801);
  for (double gamma : {0.0, 1.0, 4.0})
    for (int r = 0; r < 4; ++r) {
      const auto f = testgen::smooth_graph(grid, 3 + r % 2, rng);
      const auto u = propagate_graph_linear(f, 0.5, {0.01, LinearMethod::direct_cn, gamma});
      CHECK(lq_power(u, 2.0) == doctest::Approx(lq_power(f, 2.0)).epsilon(1e-12));
      CHECK(norm_h1_energy_sq(u, gamma) == doctest::Approx(norm_h1_energy_sq(f, gamma)).epsilon(1e-11));
    }
}

TEST_CASE("property: both graph propagators agree on smooth data") {
  std::mt19937_64 rng(32);
  const EdgeGrid grid(40.0, 2001);
  for (double gamma : {0.0, 2.0}) {
    const auto f = testgen::smooth_graph(grid, 3, rng, 12.0, 1.0, 1.5);
    const auto a = propagate_graph_linear(f, 1.0, {0.01, LinearMethod::direct_cn, gamma});
    const auto b = propagate_graph_linear(f, 1.0, {0.01, LinearMethod::q_conjugated, gamma});
    CHECK(testgen::rel_l2(a, b) < 5e-3);
  }
}

TEST_CASE("negative time undoes positive time") {
  std::mt19937_64 rng(33);
  const EdgeGrid grid(20.0, 801);
  const auto f = testgen::smooth_graph(grid, 3, rng);
  for (auto m : {LinearMethod::direct_cn, LinearMethod::q_conjugated}) {
    const auto u = propagate_graph_linear(f, 0.6, {0.01, m, 1.0});
    CHECK(testgen::rel_l2(propagate_graph_linear(u, -0.6, {0.01, m, 1.0}), f) < 1e-11);
  }
}

TEST_CASE("absorbing layer only removes mass") {
  const EdgeGrid grid = EdgeGrid::with_spacing(30.0, 0.05, FarBoundary::absorbing(10.0, 3.0));
  const auto f = GraphFunction::sample(grid, 3, [](int k, double x) {
    return k == 0 ? cplx(x * std::exp(-0.5 * (x - 5.0) * (x - 5.0))) * std::polar(1.0, 3.0 * x) : cplx(0.0);
  });
  double prev = lq_power(f, 2.0);
  GraphFunction u = f;
  for (int s = 0; s < 10; ++s) {
    u = propagate_graph_linear(u, 1.0, {0.02, LinearMethod::direct_cn, 0.0});
    const double m = lq_power(u, 2.0);
    CHECK(m <= prev * (1.0 + 1e-13));
    prev = m;
  }
  CHECK(prev < 0.1 * lq_power(f, 2.0));
}

TEST_CASE("plan_steps caps the step by h and dt") {
  const auto p = plan_steps(1.0, 0.03, 0.02);
  CHECK(p.n_steps == 50);
  CHECK(p.step == doctest::Approx(0.02));
  const auto q = plan_steps(-1.0, 0.01, 0.02);
  CHECK(q.n_steps == 100);
  CHECK(q.step == doctest::Approx(-0.01));
  CHECK(plan_steps(0.0, 0.01, 0.02).n_steps == 0);
  CHECK(plan_steps(0.35, 0.1, 1.0).n_steps == 4);
  CHECK_THROWS_AS(plan_steps(1.0, 0.0, 0.02), std::invalid_argument);
}

TEST_CASE("dispersive ratio edge cases") {
  const EdgeGrid grid(20.0, 401);
  const GraphFunction zero(grid, 3);
  CHECK(dispersive_ratio(zero, {1.0, 2.0}, {}) == std::vector<double>{0.0, 0.0});
  const auto f = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(std::exp(-x * x)); });
  CHECK_THROWS_AS(dispersive_ratio(f, {2.0, 1.0}, {}), std::invalid_argument);
  CHECK_THROWS_AS(dispersive_ratio(f, {0.0, 1.0}, {}), std::invalid_argument);
  // long times on a short box hit the reflection guard
  Flags flags;
  const auto r = dispersive_ratio(f, {1.0, 50.0}, {0.02, LinearMethod::direct_cn, 0.0}, &flags);
  CHECK(r.size() == 1);
  CHECK_FALSE(flags.empty());
}

TEST_CASE("L1 norm of three decaying exponentials") {
  const EdgeGrid grid(40.0, 8001);
  const auto f = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(0.0, std::exp(-x)); });
  // trapezoid sum of e^{-x} on a uniform grid, the far tail e^{-40} dropped
  const double h = grid.h();
  CHECK(norm_l1(f) == doctest::Approx(1.5 * h * (1.0 + std::exp(-h)) / (1.0 - std::exp(-h))).epsilon(1e-12));
}
