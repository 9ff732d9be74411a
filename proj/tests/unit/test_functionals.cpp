#include <doctest.h>

#include <cmath>

#include "../support/oracles.hpp"
#include "starnls/functionals.hpp"

using namespace starnls;

namespace {

GraphFunction edge_soliton(const EdgeGrid& grid, double y, double scale = 1.0) {
  GraphFunction f(grid, 3);
  for (int i = 0; i < grid.n_points(); ++i) f.at(0, i) = scale * oracle::soliton(7.0, 1.0, grid.x(i) - y);
  f.at(1, 0) = f.at(2, 0) = f.at(0, 0);
  return f;
}

double line_mass_of_q(double p, double omega) {
  return 2.0 * oracle::simpson([&](double x) { return std::pow(oracle::soliton(p, omega, x), 2); }, 0.0, 40.0);
}

}  // namespace

TEST_CASE("soliton amplitude at the origin") {
  CHECK(soliton_value(7.0, 1.0, 0.0) == doctest::Approx(std::pow(4.0, 1.0 / 6.0)).epsilon(1e-15));
  CHECK(soliton_value(9.0, 2.0, 0.0) == doctest::Approx(std::pow(10.0, 1.0 / 8.0)).epsilon(1e-15));
  for (double x : {-2.0, 0.3, 1.7}) {
    CHECK(soliton_value(7.0, 1.3, x) == doctest::Approx(oracle::soliton(7.0, 1.3, x)).epsilon(1e-14));
    CHECK(soliton_derivative(7.0, 1.3, x) == doctest::Approx(oracle::soliton_prime(7.0, 1.3, x)).epsilon(1e-12));
  }
  const auto q = soliton_line(7.0, 1.0, EdgeGrid(10.0, 101));
  CHECK(q.at(0).real() == doctest::Approx(std::pow(4.0, 1.0 / 6.0)));
  CHECK(q.at(-30) == q.at(30));
}

TEST_CASE("functionals of zero vanish") {
  const GraphFunction f(EdgeGrid(10.0, 101), 3);
  const auto r = evaluate_functionals(f, ModelParams(3, 1.0, 7.0, -1));
  CHECK(r.mass == 0.0);
  CHECK(r.energy == 0.0);
  CHECK(r.action == 0.0);
  CHECK(r.virial_k == 0.0);
  CHECK(r.h1gamma == 0.0);
  CHECK(r.lp1 == 0.0);
}

TEST_CASE("far edge soliton: K vanishes and E matches quadrature") {
  const EdgeGrid grid(60.0, 12001);
  const auto f = edge_soliton(grid, 30.0);
  const auto r = evaluate_functionals(f, ModelParams(3, 0.0, 7.0, -1));
  const double grad = oracle::simpson([](double x) { return std::pow(oracle::soliton_prime(7.0, 1.0, x), 2); }, -30.0, 30.0);
  const double lp1 = oracle::simpson([](double x) { return std::pow(oracle::soliton(7.0, 1.0, x), 8); }, -30.0, 30.0);
  CHECK(std::abs(r.virial_k) < 1e-3 * grad);
  CHECK(r.energy == doctest::Approx(0.5 * grad - lp1 / 8.0).epsilon(1e-3));
  CHECK(r.mass == doctest::Approx(line_mass_of_q(7.0, 1.0)).epsilon(1e-8));
}

TEST_CASE("amplitude scaling of the functionals") {
  const EdgeGrid grid(40.0, 4001);
  const auto f = edge_soliton(grid, 15.0);
  const ModelParams mp(3, 1.0, 7.0, -1);
  const auto a = evaluate_functionals(f, mp), b = evaluate_functionals(f * cplx(2.0), mp);
  CHECK(b.mass == doctest::Approx(4.0 * a.mass));
  CHECK(b.h1gamma == doctest::Approx(4.0 * a.h1gamma));
  CHECK(b.lp1 == doctest::Approx(256.0 * a.lp1));
}

TEST_CASE("Pohozaev ratios for p = 7 and p = 9") {
  const EdgeGrid grid(40.0, 8001);
  const auto r7 = pohozaev_check(7.0, 1.0, grid);
  CHECK(r7.mass_energy_ratio == doctest::Approx(10.0).epsilon(1e-6));
  CHECK(r7.max_identity_gap() < 1e-6);
  const auto r9 = pohozaev_check(9.0, 1.0, grid);
  CHECK(r9.mass_energy_ratio == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(r9.ratio_gap < 1e-6);
}

TEST_CASE("finite-difference Pohozaev gaps shrink at second order") {
  const double g1 = pohozaev_check(7.0, 1.0, EdgeGrid(20.0, 401), DerivativeRule::finite_difference).max_identity_gap();
  const double g2 = pohozaev_check(7.0, 1.0, EdgeGrid(20.0, 801), DerivativeRule::finite_difference).max_identity_gap();
  CHECK(g1 / g2 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("threshold table for p = 7") {
  const ModelParams mp(3, 1.0, 7.0, -1);
  const auto t = threshold_table(mp);
  CHECK(t.s_c == doctest::Approx(1.0 / 6.0));
  CHECK(t.me_threshold / std::pow(t.m_line_q, (1.0 - t.s_c) / t.s_c) == doctest::Approx(t.e_line_q).epsilon(1e-14));
  CHECK(t.sharp_relation_gap() < 1e-6);
  CHECK(t.m_line_q == doctest::Approx(line_mass_of_q(7.0, 1.0)).epsilon(1e-8));
  CHECK(t.c_gn_line == doctest::Approx(gn_line_constant(7.0)).epsilon(1e-6));
  CHECK_THROWS_AS(threshold_table(mp.with_p(5.0)), std::invalid_argument);
  CHECK_THROWS_AS(threshold_table(mp.with_p(3.0)), std::invalid_argument);
}

TEST_CASE("tangent frequency inverts the soliton mass") {
  const auto t = threshold_table(ModelParams(3, 0.0, 7.0, -1));
  for (double omega : {0.5, 1.0, 2.5}) CHECK(tangent_frequency(line_mass_of_q(7.0, omega), t) == doctest::Approx(omega).epsilon(1e-7));
  CHECK_THROWS_AS(tangent_frequency(0.0, t), std::invalid_argument);
}

TEST_CASE("potential-well classification") {
  const EdgeGrid grid(40.0, 4001);
  const ModelParams mp(3, 1.0, 7.0, -1);

  const auto tiny = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(1e-3 * std::exp(x - x * x)); });
  const auto v0 = classify_potential_well(tiny, mp);
  CHECK(v0.side == WellSide::pw_plus);
  CHECK(v0.me_margin > 0.99);
  CHECK(v0.k2_margin > 0.9);
  CHECK(v0.consistent);

  const auto big = edge_soliton(grid, 15.0, 1.5);
  const auto v1 = classify_potential_well(big, mp);
  CHECK(v1.side != WellSide::pw_plus);
  CHECK(evaluate_functionals(big, mp).virial_k < 0.0);
  CHECK(v1.virial_k == doctest::Approx(evaluate_functionals(big, mp).virial_k));

  const auto wide = GraphFunction::sample(grid, 3, [](int, double x) { return cplx(0.5 * std::exp(-x * x / 200.0)); });
  const auto v2 = classify_potential_well(wide, mp);
  CHECK(v2.side == WellSide::above_threshold);
  CHECK(v2.me_margin < 0.0);
  CHECK(std::string(to_string(WellSide::pw_minus)).size() > 0);
}

TEST_CASE("cutoff profile: quadratic core, zero tail, certified curvature") {
  const auto& c = cutoff();
  for (double x : {0.0, 0.4, 1.0}) CHECK(c.derivative(0, x) == doctest::Approx(x * x).epsilon(1e-15));
  for (double x : {3.0, 3.5, 10.0}) CHECK(c.derivative(0, x) == 0.0);
  CHECK(c.max_second_derivative() <= 2.0 + 1e-12);
  for (double R : {2.0, 10.0}) {
    CHECK(c.scaled(0, 0.5 * R, R) == doctest::Approx(0.25 * R * R).epsilon(1e-14));
    CHECK(c.scaled(0, 3.0 * R, R) == 0.0);
    CHECK(c.scaled(2, 0.5 * R, R) == doctest::Approx(2.0));
  }
  // derivatives through order four are continuous at the joints
  for (double joint : {1.0, 3.0})
    for (int k = 0; k <= 4; ++k)
      CHECK(c.derivative(k, joint - 1e-9) == doctest::Approx(c.derivative(k, joint + 1e-9)).epsilon(1e-5).scale(1.0));
  const auto s = cutoff_profile(5.0, EdgeGrid(30.0, 3001));
  CHECK(s.max_d2 <= 2.0 + 1e-12);
  CHECK(s.value[100] == doctest::Approx(1.0));
}

TEST_CASE("time derivative is exact on quadratics over a nonuniform grid") {
  const std::vector<double> t = {0.0, 0.1, 0.35, 0.4, 0.9, 1.0};
  std::vector<double> y;
  for (double s : t) y.push_back(3.0 * s * s - s + 2.0);
  const auto d = time_derivative(t, y);
  for (size_t i = 0; i < t.size(); ++i) CHECK(d[i] == doctest::Approx(6.0 * t[i] - 1.0).epsilon(1e-12));
}
