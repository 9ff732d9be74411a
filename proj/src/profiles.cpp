#include "starnls/profiles.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "starnls/decomposition.hpp"

namespace starnls {

namespace {

int grid_shift(double y, double h) {
  if (!(y >= 0.0)) throw std::invalid_argument("profile shift y must be >= 0");
  const double s = y / h;
  const long r = std::lround(s);
  if (std::abs(s - double(r)) > 1e-6) throw std::invalid_argument("profile shift y must be a multiple of h");
  return int(r);
}

// psi at signed line index j, zero outside the grid.
cplx sample(const LineFunction& psi, int j) {
  const int lim = psi.half_grid().n_points() - 1;
  return (j < -lim || j > lim) ? cplx(0.0) : psi.at(j);
}

void check_overflow(const LineFunction& psi, int shift, Flags* flags) {
  if (!flags) return;
  const int lim = psi.half_grid().n_points() - 1;
  double lost = 0.0, total = 0.0;
  for (int j = -lim; j <= lim; ++j) {
    const double a = std::norm(psi.at(j));
    total += a;
    if (j + shift > lim || -j - shift < -lim) lost += a;
  }
  if (total > 0.0 && lost > 1e-12 * total) {
    std::ostringstream msg;
    msg << "edge_bump: profile support leaves the grid after shifting by " << shift << " cells";
    flags->raise(msg.str());
  }
}

}  // namespace

GraphFunction edge_bump(int k, double y, const LineFunction& psi, int n_edges, Flags* flags) {
  if (k < 0 || k >= n_edges) throw std::invalid_argument("edge_bump: edge index out of range");
  const EdgeGrid& grid = psi.half_grid();
  const int s = grid_shift(y, grid.h());
  check_overflow(psi, s, flags);
  GraphFunction f(grid, n_edges);
  const double tail = 2.0 / n_edges;
  for (int e = 0; e < n_edges; ++e)
    for (int i = 0; i < grid.n_points(); ++i) {
      const cplx reflected = sample(psi, -i - s);
      f.at(e, i) = (e == k) ? sample(psi, i - s) + (tail - 1.0) * reflected : tail * reflected;
    }
  return f;
}

GraphFunction shift_profile(const ProfileSpec& spec, double gamma, const LinearPropagatorConfig& cfg,
                            Flags* flags) {
  const int n = int(spec.psis.size());
  if (n < 1) throw std::invalid_argument("shift_profile: empty profile list");
  GraphFunction f(spec.psis.front().half_grid(), n);
  for (int k = 0; k < n; ++k) f += edge_bump(k, spec.y_shift, spec.psis[size_t(k)], n, flags);
  if (spec.t_shift == 0.0) return f;
  LinearPropagatorConfig c = cfg;
  c.gamma = gamma;
  return propagate_graph_linear(f, -spec.t_shift, c, flags);
}

GraphFunction shift_profile_via_decomposition(const ProfileSpec& spec) {
  const int n = int(spec.psis.size());
  if (n < 2) throw std::invalid_argument("shift_profile_via_decomposition: need >= 2 profiles");
  const EdgeGrid& grid = spec.psis.front().half_grid();
  const int s = grid_shift(spec.y_shift, grid.h());
  const auto q = decomposition_matrix(n);
  const int lim = grid.n_points() - 1;
  LineTriple t;
  for (int j = 0; j < n; ++j) {
    LineFunction a(grid);
    for (int idx = -lim; idx <= lim; ++idx) {
      cplx v = 0.0;
      for (int k = 0; k < n; ++k) v += q.a(j, k) * spec.psis[size_t(k)].at(idx);
      a.at(idx) = v;
    }
    const double sign = (j < n - 1) ? -1.0 : 1.0;
    LineFunction part(grid);
    for (int idx = -lim; idx <= lim; ++idx)
      part.at(idx) = sample(a, idx - s) + sign * sample(a, -idx - s);
    if (j < n - 1) part.at(0) = 0.0;
    t.parts.push_back(std::move(part));
  }
  return reconstruct(t);
}

OrthogonalityResidual orthogonality_report(const std::vector<ProfileSpec>& specs,
                                           const GraphFunction& remainder, double q, double gamma,
                                           const LinearPropagatorConfig& cfg) {
  GraphFunction total = remainder;
  double sum_q = lq_power(remainder, q);
  double sum_2 = lq_power(remainder, 2.0);
  double sum_h = norm_h1gamma_sq(remainder, gamma);
  for (const auto& spec : specs) {
    const GraphFunction tj = shift_profile(spec, gamma, cfg);
    total += tj;
    sum_q += lq_power(tj, q);
    sum_2 += lq_power(tj, 2.0);
    sum_h += norm_h1gamma_sq(tj, gamma);
  }
  OrthogonalityResidual r;
  r.lq = std::abs(lq_power(total, q) - sum_q);
  r.l2 = std::abs(lq_power(total, 2.0) - sum_2);
  r.h1gamma = std::abs(norm_h1gamma_sq(total, gamma) - sum_h);
  r.lq_relative = sum_q > 0.0 ? r.lq / sum_q : 0.0;
  r.l2_relative = sum_2 > 0.0 ? r.l2 / sum_2 : 0.0;
  r.h1gamma_relative = sum_h > 0.0 ? r.h1gamma / sum_h : 0.0;
  return r;
}

ProfileNormLimits profile_norm_limits(const ProfileSpec& spec, double q) {
  ProfileNormLimits l;
  for (const auto& psi : spec.psis) {
    l.l2_sq += lq_power(psi, 2.0);
    l.h1_sq += dirichlet_sq(psi);
    l.lq_power += lq_power(psi, q);
  }
  return l;
}

double shifted_vertex_value(const ProfileSpec& spec) {
  const int n = int(spec.psis.size());
  if (n < 1) return 0.0;
  const int s = grid_shift(spec.y_shift, spec.psis.front().half_grid().h());
  cplx sum = 0.0;
  for (const auto& psi : spec.psis) sum += sample(psi, -s);
  return 2.0 / n * std::abs(sum);
}

}  // namespace starnls
