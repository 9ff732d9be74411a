#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "starnls/kernels.hpp"

using namespace starnls;
namespace ser = starnls::kernels::serial;
namespace par = starnls::kernels::parallel;

namespace {

std::vector<cplx> random_samples(size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(d(rng), d(rng));
  return v;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("serial and parallel reductions agree across block boundaries") {
  std::mt19937_64 rng(11);
  for (size_t n : {size_t(1), size_t(2), size_t(2047), size_t(2048), size_t(2049), size_t(100003)}) {
    const auto f = random_samples(n, rng), g = random_samples(n, rng);
    for (double q : {2.0, 3.0, 8.0})
      CHECK(rel(par::trapezoid_power(f, q, 0.01), ser::trapezoid_power(f, q, 0.01)) < 1e-12);
    if (n > 1) CHECK(rel(par::diff_sq(f), ser::diff_sq(f)) < 1e-12);
    CHECK(std::abs(par::trapezoid_inner(f, g, 0.1) - ser::trapezoid_inner(f, g, 0.1)) <
          1e-12 * (1.0 + std::abs(ser::trapezoid_inner(f, g, 0.1))));
    CHECK(par::max_abs(f) == ser::max_abs(f));
  }
}

TEST_CASE("empty spans reduce to zero") {
  const std::vector<cplx> e;
  CHECK(ser::trapezoid_power(e, 2.0, 0.1) == 0.0);
  CHECK(par::trapezoid_power(e, 2.0, 0.1) == 0.0);
  CHECK(par::max_abs(e) == 0.0);
}

TEST_CASE("trapezoid weights are one half at both ends") {
  const std::vector<cplx> v = {2.0, 1.0, 1.0, 2.0};
  CHECK(ser::trapezoid_power(v, 2.0, 1.0) == doctest::Approx(2.0 + 1.0 + 1.0 + 2.0));
  CHECK(par::trapezoid_power(v, 2.0, 1.0) == doctest::Approx(6.0));
}

TEST_CASE("abs_pow matches std::pow") {
  for (double a : {0.0, 1e-3, 0.5, 1.0, 3.7})
    for (double e : {1.0, 2.0, 6.0, 7.0, 8.0, 2.5}) {
      const double ref = std::pow(std::sqrt(a), e);
      CHECK(kernels::abs_pow(a, e) == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("phase rotation keeps moduli and matches the serial reference") {
  std::mt19937_64 rng(12);
  auto a = random_samples(5000, rng);
  auto b = a;
  const auto orig = a;
  ser::phase_rotate(a, 0.3, 6.0);
  par::phase_rotate(b, 0.3, 6.0);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(std::abs(a[i]) == doctest::Approx(std::abs(orig[i])).epsilon(1e-14));
    CHECK(a[i] == b[i]);
  }
  const cplx z = orig[7];
  const cplx expect = z * std::polar(1.0, -0.3 * std::pow(std::abs(z), 6.0));
  CHECK(std::abs(a[7] - expect) < 1e-13);
}

TEST_CASE("perturbation phase flow equals the full flow minus the carrier") {
  std::mt19937_64 rng(13);
  const auto v = random_samples(3000, rng);
  auto w = random_samples(3000, rng);
  for (auto& z : w) z *= 1e-3;
  std::vector<cplx> full(v.size());
  for (size_t i = 0; i < v.size(); ++i) full[i] = v[i] + w[i];
  auto w_par = w;
  ser::phase_rotate(full, 0.05, 6.0);
  ser::phase_rotate_perturbation(v, w, 0.05, 6.0);
  par::phase_rotate_perturbation(v, w_par, 0.05, 6.0);
  for (size_t i = 0; i < v.size(); ++i) {
    // v is not advanced, so the update is relative to the unrotated carrier
    CHECK(std::abs((v[i] + w[i]) - full[i]) < 1e-10 * (1.0 + std::abs(full[i])));
    CHECK(w[i] == w_par[i]);
  }
}
