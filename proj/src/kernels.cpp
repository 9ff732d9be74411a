#include "starnls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace starnls::kernels {

namespace {

constexpr std::ptrdiff_t kBlock = 2048;

std::ptrdiff_t block_count(std::ptrdiff_t n) { return (n + kBlock - 1) / kBlock; }

double endpoint_weight(std::ptrdiff_t i, std::ptrdiff_t n) {
  return (i == 0 || i == n - 1) ? 0.5 : 1.0;
}

// e^{i theta} - 1 without cancellation for small theta.
cplx expm1_i(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

void perturbation_update(const cplx& v, cplx& w, double c, double e) {
  const double theta = -c * abs_pow(std::norm(v + w), e);
  const cplx m1 = expm1_i(theta);
  w = w + w * m1 + v * m1;
}

}  // namespace

double abs_pow(double abs_sq, double e) {
  const double half = 0.5 * e;
  const double rounded = std::round(half);
  if (rounded == half && half >= 0.0 && half <= 16.0) {
    double r = 1.0;
    for (int k = 0; k < int(rounded); ++k) r *= abs_sq;
    return r;
  }
  if (abs_sq == 0.0) return 0.0;
  return std::pow(abs_sq, half);
}

namespace serial {

double trapezoid_power(std::span<const cplx> f, double q, double h) {
  const auto n = std::ptrdiff_t(f.size());
  double s = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) s += endpoint_weight(i, n) * abs_pow(std::norm(f[i]), q);
  return h * s;
}

double diff_sq(std::span<const cplx> f) {
  double s = 0.0;
  for (size_t i = 0; i + 1 < f.size(); ++i) s += std::norm(f[i + 1] - f[i]);
  return s;
}

cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h) {
  const auto n = std::ptrdiff_t(f.size());
  cplx s = 0.0;
  for (std::ptrdiff_t i = 0; i < n; ++i) s += endpoint_weight(i, n) * f[i] * std::conj(g[i]);
  return h * s;
}

double max_abs(std::span<const cplx> f) {
  double m = 0.0;
  for (const auto& z : f) m = std::max(m, std::abs(z));
  return m;
}

void phase_rotate(std::span<cplx> u, double c, double e) {
  for (auto& z : u) {
    const double theta = -c * abs_pow(std::norm(z), e);
    z *= cplx(std::cos(theta), std::sin(theta));
  }
}

void phase_rotate_perturbation(std::span<const cplx> v, std::span<cplx> w, double c, double e) {
  for (size_t i = 0; i < w.size(); ++i) perturbation_update(v[i], w[i], c, e);
}

}  // namespace serial

namespace parallel {

double trapezoid_power(std::span<const cplx> f, double q, double h) {
  const auto n = std::ptrdiff_t(f.size());
  const auto nb = block_count(n);
  std::vector<double> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    double s = 0.0;
    const auto end = std::min(n, (b + 1) * kBlock);
    for (std::ptrdiff_t i = b * kBlock; i < end; ++i)
      s += endpoint_weight(i, n) * abs_pow(std::norm(f[i]), q);
    partial[size_t(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return h * s;
}

double diff_sq(std::span<const cplx> f) {
  const auto n = std::ptrdiff_t(f.size()) - 1;
  if (n <= 0) return 0.0;
  const auto nb = block_count(n);
  std::vector<double> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    double s = 0.0;
    const auto end = std::min(n, (b + 1) * kBlock);
    for (std::ptrdiff_t i = b * kBlock; i < end; ++i) s += std::norm(f[i + 1] - f[i]);
    partial[size_t(b)] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}

cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h) {
  const auto n = std::ptrdiff_t(f.size());
  const auto nb = block_count(n);
  std::vector<cplx> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    cplx s = 0.0;
    const auto end = std::min(n, (b + 1) * kBlock);
    for (std::ptrdiff_t i = b * kBlock; i < end; ++i)
      s += endpoint_weight(i, n) * f[i] * std::conj(g[i]);
    partial[size_t(b)] = s;
  }
  cplx s = 0.0;
  for (const auto& v : partial) s += v;
  return h * s;
}

double max_abs(std::span<const cplx> f) {
  const auto n = std::ptrdiff_t(f.size());
  double m = 0.0;
#pragma omp parallel for schedule(static) reduction(max : m)
  for (std::ptrdiff_t i = 0; i < n; ++i) m = std::max(m, std::abs(f[i]));
  return m;
}

void phase_rotate(std::span<cplx> u, double c, double e) {
  const auto n = std::ptrdiff_t(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double theta = -c * abs_pow(std::norm(u[i]), e);
    u[i] *= cplx(std::cos(theta), std::sin(theta));
  }
}

void phase_rotate_perturbation(std::span<const cplx> v, std::span<cplx> w, double c, double e) {
  const auto n = std::ptrdiff_t(w.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) perturbation_update(v[size_t(i)], w[size_t(i)], c, e);
}

}  // namespace parallel

}  // namespace starnls::kernels
