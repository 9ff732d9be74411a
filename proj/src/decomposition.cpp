#include "starnls/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace starnls {

namespace {

// Edge-value matrix: f = B alpha. Row 1 is (-1, 0, ..., 0, 1), row k has +1
// at column k-1, -1 at column k and +1 in the last column, and the last row
// is (0, ..., 0, 1, 1).
std::vector<double> inverse_matrix(int n) {
  std::vector<double> b(size_t(n * n), 0.0);
  auto at = [&](int r, int c) -> double& { return b[size_t(r * n + c)]; };
  at(0, 0) = -1.0;
  for (int r = 1; r < n - 1; ++r) {
    at(r, r - 1) = 1.0;
    at(r, r) = -1.0;
  }
  at(n - 1, n - 2) = 1.0;
  for (int r = 0; r < n; ++r) at(r, n - 1) = 1.0;
  return b;
}

std::vector<double> invert(std::vector<double> m, int n) {
  std::vector<double> inv(size_t(n * n), 0.0);
  for (int i = 0; i < n; ++i) inv[size_t(i * n + i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[size_t(r * n + col)]) > std::abs(m[size_t(pivot * n + col)])) pivot = r;
    if (m[size_t(pivot * n + col)] == 0.0) throw std::logic_error("singular decomposition matrix");
    for (int c = 0; c < n; ++c) {
      std::swap(m[size_t(col * n + c)], m[size_t(pivot * n + c)]);
      std::swap(inv[size_t(col * n + c)], inv[size_t(pivot * n + c)]);
    }
    const double d = m[size_t(col * n + col)];
    for (int c = 0; c < n; ++c) {
      m[size_t(col * n + c)] /= d;
      inv[size_t(col * n + c)] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = m[size_t(r * n + col)];
      if (factor == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        m[size_t(r * n + c)] -= factor * m[size_t(col * n + c)];
        inv[size_t(r * n + c)] -= factor * inv[size_t(col * n + c)];
      }
    }
  }
  return inv;
}

}  // namespace

DecompositionMatrix decomposition_matrix(int n_edges) {
  if (n_edges < 2) throw std::invalid_argument("decomposition needs at least 2 edges");
  DecompositionMatrix q;
  q.n = n_edges;
  q.inverse = inverse_matrix(n_edges);
  q.forward = invert(q.inverse, n_edges);
  return q;
}

LineTriple decompose(const GraphFunction& f) {
  const int n = f.n_edges();
  const int np = f.n_points();
  const auto q = decomposition_matrix(n);
  LineTriple t;
  t.parts.assign(size_t(n), LineFunction(f.grid()));
  for (int j = 0; j < n; ++j) {
    auto& part = t.parts[size_t(j)];
    const double sign = t.is_odd(j) ? -1.0 : 1.0;
    for (int i = 0; i < np; ++i) {
      cplx s = 0.0;
      for (int k = 0; k < n; ++k) s += q.a(j, k) * f.at(k, i);
      part.at(i) = s;
      part.at(-i) = sign * s;
    }
    if (t.is_odd(j)) part.at(0) = 0.0;
  }
  return t;
}

double parity_residual(const LineTriple& t) {
  double worst = 0.0;
  for (int k = 0; k < t.n_parts(); ++k) {
    const auto& part = t.parts[size_t(k)];
    LineFunction r = part.reflected();
    if (t.is_odd(k)) r += part;
    else r = part - r;
    worst = std::max(worst, norm_lq(r, 2.0));
  }
  return worst;
}

GraphFunction reconstruct(const LineTriple& t) {
  const int n = t.n_parts();
  if (n < 2) throw std::invalid_argument("reconstruct: need at least 2 parts");
  for (const auto& part : t.parts)
    if (!part.half_grid().same_as(t.half_grid()))
      throw std::invalid_argument("reconstruct: parts on different grids");
  double scale = 0.0;
  for (const auto& part : t.parts) scale = std::max(scale, norm_lq(part, 2.0));
  const double residual = parity_residual(t);
  if (residual > kParityTolerance * std::max(scale, 1e-300) && residual > 0.0) {
    std::ostringstream msg;
    msg << "reconstruct: parity violation " << residual;
    throw std::invalid_argument(msg.str());
  }
  const auto q = decomposition_matrix(n);
  GraphFunction f(t.half_grid(), n);
  const int np = f.n_points();
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < np; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < n; ++j) {
        if (q.b(k, j) == 0.0) continue;
        const cplx v = (t.is_odd(j) && i == 0) ? cplx(0.0) : t.parts[size_t(j)].at(i);
        s += q.b(k, j) * v;
      }
      f.at(k, i) = s;
    }
  return f;
}

double triple_l2_form(const LineTriple& t) {
  const int n = t.n_parts();
  const auto q = decomposition_matrix(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g += q.b(k, i) * q.b(k, j);
      if (g == 0.0) continue;
      s += g * inner_l2(t.parts[size_t(j)], t.parts[size_t(i)]).real();
    }
  return 0.5 * s;
}

}  // namespace starnls
