#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "../support/generators.hpp"
#include "../support/oracles.hpp"
#include "starnls/graph.hpp"

using namespace starnls;

TEST_CASE("norms of the zero function vanish") {
  const GraphFunction f(EdgeGrid(10.0, 101), 3);
  for (double q : {2.0, 4.0, 8.0, std::numeric_limits<double>::infinity()}) CHECK(norm_lq(f, q) == 0.0);
  CHECK(norm_h1gamma_sq(f, 1.0) == 0.0);
}

TEST_CASE("L2 norm of a smoothed unit indicator is one") {
  const EdgeGrid grid(10.0, 1001);
  GraphFunction f(grid, 3);
  for (int i = 0; i < grid.n_points(); ++i) f.at(0, i) = std::sqrt(0.5 * std::erfc((grid.x(i) - 1.0) / 0.1));
  // edges 2 and 3 carry only the shared vertex sample, worth h/2 each
  f.at(1, 0) = f.at(2, 0) = f.at(0, 0);
  CHECK(norm_lq(f, 2.0) * norm_lq(f, 2.0) == doctest::Approx(1.0 + grid.h()).epsilon(1e-9));
}

TEST_CASE("soliton mass on one edge matches an independent quadrature") {
  const double y = 15.0;
  const EdgeGrid grid(60.0, 6001);
  GraphFunction f(grid, 3);
  for (int i = 0; i < grid.n_points(); ++i) f.at(0, i) = oracle::soliton(7.0, 1.0, grid.x(i) - y);
  const double tiny = f.at(0, 0).real();
  f.at(1, 0) = f.at(2, 0) = tiny;
  const double ref = oracle::simpson([&](double x) { return std::pow(oracle::soliton(7.0, 1.0, x - y), 2); },
                                     0.0, 60.0);
  // the two extra vertex samples add h * tiny^2 / 2 each
  CHECK(lq_power(f, 2.0) == doctest::Approx(ref + grid.h() * tiny * tiny).epsilon(1e-10));
}

TEST_CASE("graph L-infinity is the sum of edge sup norms") {
  const EdgeGrid grid(5.0, 51);
  GraphFunction f(grid, 3);
  f.at(0, 3) = 2.0;
  f.at(1, 7) = cplx(0.0, -1.5);
  f.at(2, 9) = 0.25;
  CHECK(norm_linf_sum(f) == doctest::Approx(3.75));
  CHECK(norm_lq(f, std::numeric_limits<double>::infinity()) == doctest::Approx(3.75));
  CHECK(norm_linf_max(f) == doctest::Approx(2.0));
}

TEST_CASE("trapezoid quadrature converges at second order") {
  auto mass = [](int n) {
    const EdgeGrid grid(20.0, n);
    const auto f = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(std::exp(-x)); });
    return lq_power(f, 2.0);
  };
  const double exact = 3.0 * 0.5 * (1.0 - std::exp(-40.0));
  const double e1 = std::abs(mass(401) - exact), e2 = std::abs(mass(801) - exact);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("non-finite samples are rejected") {
  GraphFunction f(EdgeGrid(5.0, 51), 3);
  f.at(1, 4) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(norm_lq(f, 2.0), std::domain_error);
  CHECK_THROWS_AS(norm_lq(f, 0.5), std::invalid_argument);
}

TEST_CASE("H1_gamma of a radial triple at gamma = 0 is three half-line energies") {
  const EdgeGrid grid(20.0, 4001);
  const auto f = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(std::exp(-x * x)); });
  const double half = oracle::simpson([](double x) { return std::pow(2.0 * x * std::exp(-x * x), 2); }, 0.0, 20.0);
  CHECK(norm_h1gamma_sq(f, 0.0) == doctest::Approx(3.0 * half).epsilon(2e-5));
}

TEST_CASE("H1_gamma adds N gamma |f(0)|^2") {
  std::mt19937_64 rng(5);
  const EdgeGrid grid(20.0, 1001);
  auto f = testgen::smooth_graph(grid, 3, rng);
  f *= 1.0 / std::abs(f.vertex_value());
  CHECK(norm_h1gamma_sq(f, 1.0) == doctest::Approx(dirichlet_sq(f) + 3.0).epsilon(1e-14));
  CHECK(norm_h1gamma_sq(f, 0.0) == doctest::Approx(dirichlet_sq(f)).epsilon(1e-14));
}

TEST_CASE("vertex-discontinuous data is rejected with its residual") {
  const EdgeGrid grid(5.0, 51);
  auto f = GraphFunction::sample(grid, 3, [](int k, double x) { return cplx(std::exp(-x) * (k == 1 ? 2.0 : 1.0)); });
  try {
    (void)norm_h1gamma_sq(f, 1.0);
    FAIL("expected VertexDiscontinuity");
  } catch (const VertexDiscontinuity& e) {
    CHECK(e.residual() == doctest::Approx(1.0));
  }
}

TEST_CASE("vertex residual of radial Robin data vanishes") {
  const double gamma = 0.7;
  const EdgeGrid grid(10.0, 2001);
  const auto f = GraphFunction::sample(grid, 3, [&](int, double x) { return cplx(std::exp(gamma * x - x * x)); });
  const auto r = vertex_residual(f, gamma);
  CHECK(r.continuity_gap == 0.0);
  CHECK(r.flux_gap < 1e-4);
}

TEST_CASE("vertex residual of (x e^-x, 0, 0) has unit flux gap") {
  const EdgeGrid grid(10.0, 2001);
  const auto f = GraphFunction::sample(grid, 3, [](int k, double x) { return cplx(k == 0 ? x * std::exp(-x) : 0.0); });
  const auto r = vertex_residual(f, 0.0);
  CHECK(r.continuity_gap == 0.0);
  CHECK(r.flux_gap == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("exponential profiles: attractive sign balances, repulsive reports 6 gamma") {
  const double gamma = 1.3;
  const EdgeGrid grid(10.0, 4001);
  const auto up = GraphFunction::sample(grid, 3, [&](int, double x) { return cplx(std::exp(gamma * x - x * x)); });
  const auto down = GraphFunction::sample(grid, 3, [&](int, double x) { return cplx(std::exp(-gamma * x - x * x)); });
  CHECK(vertex_residual(up, gamma).flux_gap < 1e-4);
  CHECK(vertex_residual(down, gamma).flux_gap == doctest::Approx(6.0 * gamma).epsilon(1e-5));
}

TEST_CASE("inner product properties") {
  std::mt19937_64 rng(8);
  const EdgeGrid grid(20.0, 801);
  for (int r = 0; r < 10; ++r) {
    const auto f = testgen::smooth_graph(grid, 3, rng), g = testgen::smooth_graph(grid, 3, rng);
    CHECK(inner_l2(f, f).real() == doctest::Approx(lq_power(f, 2.0)).epsilon(1e-13));
    CHECK(std::abs(inner_l2(f, f).imag()) < 1e-14);
    CHECK(std::abs(inner_l2(f, g) - std::conj(inner_l2(g, f))) < 1e-13);
  }
  const auto a = GraphFunction::sample(grid, 3, [](int k, double x) {
    return cplx(k == 0 && x > 2.0 && x < 4.0 ? std::sin(x) : 0.0);
  });
  const auto b = GraphFunction::sample(grid, 3, [](int k, double x) {
    return cplx(k == 1 && x > 2.0 && x < 4.0 ? 1.0 : 0.0);
  });
  CHECK(inner_l2(a, b) == cplx(0.0));
  CHECK_THROWS(inner_l2(a, GraphFunction(EdgeGrid(20.0, 401), 3)));
}

TEST_CASE("edge grid bookkeeping") {
  const EdgeGrid g = EdgeGrid::with_spacing(60.0, 0.02);
  CHECK(g.n_points() == 3001);
  CHECK(g.h() == doctest::Approx(0.02));
  const EdgeGrid a = g.with_boundary(FarBoundary::absorbing(10.0, 3.0));
  CHECK(a.damping(1.0) == 0.0);
  CHECK(a.damping(59.9) > 0.0);
  CHECK(a.same_as(g));
  CHECK(a.boundary().kind != g.boundary().kind);
  CHECK_FALSE(EdgeGrid(60.0, 3000).same_as(g));
  CHECK_THROWS(EdgeGrid(10.0, 8));
}

TEST_CASE("line function parity parts") {
  const EdgeGrid grid(5.0, 51);
  const auto g = LineFunction::sample(grid, [](double x) { return cplx(std::exp(x), x * x); });
  const auto e = g.even_part(), o = g.odd_part();
  CHECK(norm_lq((e + o) - g, 2.0) < 1e-14);
  CHECK(norm_lq(e - e.reflected(), 2.0) < 1e-14);
  CHECK(norm_lq(o + o.reflected(), 2.0) < 1e-14);
  CHECK(o.at(0) == cplx(0.0));
  CHECK(g.size() == 101);
  CHECK(g.x_of(0) == doctest::Approx(-5.0));
}
