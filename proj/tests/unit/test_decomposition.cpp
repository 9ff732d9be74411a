#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/generators.hpp"
#include "starnls/decomposition.hpp"

using namespace starnls;

namespace {

const EdgeGrid kGrid(10.0, 201);

double line_gap(const LineFunction& a, const LineFunction& b) { return norm_lq(a - b, 2.0); }

}  // namespace

TEST_CASE("constant triple maps to the even part only") {
  const auto f = GraphFunction::sample(kGrid, 3, [](int, double x) { return cplx(std::exp(-x * x), 0.5); });
  const auto t = decompose(f);
  REQUIRE(t.n_parts() == 3);
  CHECK(norm_lq(t.parts[0], 2.0) < 1e-15);
  CHECK(norm_lq(t.parts[1], 2.0) < 1e-15);
  for (int j = -200; j <= 200; ++j) CHECK(std::abs(t.parts[2].at(j) - f.at(0, std::abs(j))) < 1e-15);
}

TEST_CASE("(g, 0, 0) gives -2g/3, -g/3, g/3") {
  const auto g = [](double x) { return cplx(x * std::exp(-x), std::sin(x) * std::exp(-x)); };
  const auto f = GraphFunction::sample(kGrid, 3, [&](int k, double x) { return k == 0 ? g(x) : cplx(0.0); });
  const auto t = decompose(f);
  for (int i = 0; i < kGrid.n_points(); ++i) {
    const cplx gx = g(kGrid.x(i));
    CHECK(std::abs(t.parts[0].at(i) - (-2.0 / 3.0) * gx) < 1e-15);
    CHECK(std::abs(t.parts[1].at(i) - (-1.0 / 3.0) * gx) < 1e-15);
    CHECK(std::abs(t.parts[2].at(i) - (1.0 / 3.0) * gx) < 1e-15);
    // parity of the extensions
    CHECK(std::abs(t.parts[0].at(-i) + t.parts[0].at(i)) < 1e-15);
    CHECK(std::abs(t.parts[2].at(-i) - t.parts[2].at(i)) < 1e-15);
  }
}

TEST_CASE("reconstruct of a pure even part is radial for every N") {
  for (int n : {3, 5}) {
    LineTriple t;
    for (int k = 0; k < n - 1; ++k) t.parts.emplace_back(kGrid);
    t.parts.push_back(LineFunction::sample(kGrid, [](double x) { return cplx(1.0 / std::cosh(x)); }));
    const auto f = reconstruct(t);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < kGrid.n_points(); ++i)
        CHECK(std::abs(f.at(k, i) - 1.0 / std::cosh(kGrid.x(i))) < 1e-15);
  }
}

TEST_CASE("forward and inverse matrices are mutual inverses") {
  for (int n = 3; n <= 7; ++n) {
    const auto m = decomposition_matrix(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < n; ++k) s += m.b(i, k) * m.a(k, j);
        CHECK(s == doctest::Approx(i == j ? 1.0 : 0.0));
      }
    // last column of the inverse is all ones, rows of the odd forward block sum to zero
    for (int k = 0; k < n; ++k) CHECK(m.b(k, n - 1) == doctest::Approx(1.0));
    for (int j = 0; j < n - 1; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) s += m.a(j, k);
      CHECK(s == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("property: decomposition is a bijection") {
  std::mt19937_64 rng(21);
  for (int n = 3; n <= 6; ++n)
    for (int r = 0; r < 10; ++r) {
      const auto f = testgen::rough_graph(kGrid, n, rng);
      CHECK(testgen::rel_l2(reconstruct(decompose(f)), f) < 1e-14);
      const auto t = testgen::random_triple(kGrid, n, rng);
      const auto back = decompose(reconstruct(t));
      for (int k = 0; k < n; ++k) CHECK(testgen::rel_l2(back.parts[size_t(k)], t.parts[size_t(k)]) < 1e-14);
    }
}

TEST_CASE("parity residual") {
  std::mt19937_64 rng(22);
  const auto t = testgen::random_triple(kGrid, 3, rng);
  CHECK(parity_residual(t) == 0.0);
  CHECK(parity_residual(decompose(testgen::rough_graph(kGrid, 4, rng))) < 1e-15);

  LineTriple bad = t;
  bad.parts[0] = LineFunction::sample(kGrid, [](double x) { return cplx(std::exp(-x * x)); });
  CHECK(parity_residual(bad) == doctest::Approx(2.0 * norm_lq(bad.parts[0], 2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(reconstruct(bad), std::invalid_argument);
}

TEST_CASE("L2 Gram form reproduces the graph mass") {
  std::mt19937_64 rng(23);
  for (int n : {3, 4, 6}) {
    const auto f = testgen::smooth_graph(kGrid, n, rng);
    CHECK(triple_l2_form(decompose(f)) == doctest::Approx(lq_power(f, 2.0)).epsilon(1e-13));
  }
}

TEST_CASE("decomposition is linear") {
  std::mt19937_64 rng(24);
  const auto f = testgen::smooth_graph(kGrid, 3, rng), g = testgen::smooth_graph(kGrid, 3, rng);
  const cplx c(0.3, -1.2);
  const auto lhs = decompose(f + c * g);
  const auto a = decompose(f), b = decompose(g);
  for (int k = 0; k < 3; ++k) CHECK(line_gap(lhs.parts[size_t(k)], a.parts[size_t(k)] + c * b.parts[size_t(k)]) < 1e-14);
}
