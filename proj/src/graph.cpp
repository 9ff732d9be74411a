#include "starnls/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "starnls/kernels.hpp"

namespace starnls {

namespace kp = kernels::parallel;

// --- ModelParams ---

ModelParams::ModelParams(int n_edges, double gamma, double p, int mu, double omega)
    : n_edges_(n_edges), gamma_(gamma), p_(p), mu_(mu), omega_(omega) {
  if (n_edges < 3) throw std::invalid_argument("ModelParams: n_edges must be >= 3");
  if (!(gamma >= 0.0)) throw std::invalid_argument("ModelParams: gamma must be >= 0");
  if (!(p > 1.0)) throw std::invalid_argument("ModelParams: p must be > 1");
  if (mu != 1 && mu != -1) throw std::invalid_argument("ModelParams: mu must be +1 or -1");
  if (!(omega > 0.0)) throw std::invalid_argument("ModelParams: omega must be > 0");
}

StrichartzExponents ModelParams::strichartz() const {
  const double p2 = p_ * p_;
  return {2.0 * (p2 - 1.0) / (p_ + 3.0), p_ + 1.0, 2.0 * (p2 - 1.0) / (p2 - 3.0 * p_ - 2.0)};
}

ModelParams ModelParams::with_gamma(double gamma) const {
  return {n_edges_, gamma, p_, mu_, omega_};
}
ModelParams ModelParams::with_p(double p) const { return {n_edges_, gamma_, p, mu_, omega_}; }
ModelParams ModelParams::with_mu(int mu) const { return {n_edges_, gamma_, p_, mu, omega_}; }
ModelParams ModelParams::with_omega(double omega) const {
  return {n_edges_, gamma_, p_, mu_, omega};
}

// --- EdgeGrid ---

EdgeGrid::EdgeGrid(double length, int n_points, FarBoundary boundary)
    : length_(length), n_points_(n_points), h_(0.0), boundary_(boundary) {
  if (!(length > 0.0)) throw std::invalid_argument("EdgeGrid: length must be > 0");
  if (n_points < 16) throw std::invalid_argument("EdgeGrid: n_points must be >= 16");
  h_ = length / (n_points - 1);
  if (boundary.kind == FarBoundary::Kind::absorbing_layer) {
    if (!(boundary.width > 0.0) || !(boundary.width < 0.5 * length))
      throw std::invalid_argument("EdgeGrid: absorbing layer width must lie in (0, L/2)");
    if (!(boundary.strength >= 0.0))
      throw std::invalid_argument("EdgeGrid: absorbing layer strength must be >= 0");
  }
}

EdgeGrid EdgeGrid::with_spacing(double length, double h, FarBoundary boundary) {
  if (!(h > 0.0)) throw std::invalid_argument("EdgeGrid: spacing must be > 0");
  const int cells = std::max(15, int(std::lround(length / h)));
  return EdgeGrid(cells * h, cells + 1, boundary);
}

EdgeGrid EdgeGrid::with_boundary(FarBoundary boundary) const {
  return EdgeGrid(length_, n_points_, boundary);
}

double EdgeGrid::damping(double x) const {
  if (boundary_.kind != FarBoundary::Kind::absorbing_layer) return 0.0;
  const double start = length_ - boundary_.width;
  if (x <= start) return 0.0;
  const double s = std::min(1.0, (x - start) / boundary_.width);
  return boundary_.strength * s * s * (3.0 - 2.0 * s);
}

bool EdgeGrid::same_as(const EdgeGrid& other) const {
  return n_points_ == other.n_points_ && std::abs(length_ - other.length_) <= 1e-12 * length_;
}

// --- GraphFunction ---

GraphFunction::GraphFunction(EdgeGrid grid, int n_edges)
    : grid_(grid), n_edges_(n_edges), values_(size_t(n_edges) * size_t(grid.n_points())) {
  if (n_edges < 1) throw std::invalid_argument("GraphFunction: n_edges must be >= 1");
}

GraphFunction GraphFunction::sample(EdgeGrid grid, int n_edges,
                                    const std::function<cplx(int, double)>& fn) {
  GraphFunction f(grid, n_edges);
  for (int k = 0; k < n_edges; ++k)
    for (int i = 0; i < grid.n_points(); ++i) f.at(k, i) = fn(k, grid.x(i));
  return f;
}

void GraphFunction::project_vertex_continuity() {
  cplx mean = 0.0;
  for (int k = 0; k < n_edges_; ++k) mean += at(k, 0);
  mean /= double(n_edges_);
  for (int k = 0; k < n_edges_; ++k) at(k, 0) = mean;
}

bool GraphFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

void GraphFunction::require_compatible(const GraphFunction& o) const {
  if (n_edges_ != o.n_edges_ || !grid_.same_as(o.grid_))
    throw std::invalid_argument("GraphFunction: grid mismatch");
}

GraphFunction& GraphFunction::operator+=(const GraphFunction& o) {
  require_compatible(o);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GraphFunction& GraphFunction::operator-=(const GraphFunction& o) {
  require_compatible(o);
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GraphFunction& GraphFunction::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

// --- LineFunction ---

LineFunction::LineFunction(EdgeGrid half_grid)
    : grid_(half_grid), values_(size_t(2 * half_grid.n_points() - 1)) {}

LineFunction LineFunction::sample(EdgeGrid half_grid, const std::function<cplx(double)>& fn) {
  LineFunction g(half_grid);
  for (int idx = 0; idx < g.size(); ++idx) g.values_[size_t(idx)] = fn(g.x_of(idx));
  return g;
}

LineFunction LineFunction::reflected() const {
  LineFunction r(grid_);
  const int n = size();
  for (int idx = 0; idx < n; ++idx) r.values_[size_t(idx)] = values_[size_t(n - 1 - idx)];
  return r;
}

LineFunction LineFunction::even_part() const {
  LineFunction r = reflected();
  r += *this;
  r *= 0.5;
  return r;
}

LineFunction LineFunction::odd_part() const {
  LineFunction r = *this;
  r -= reflected();
  r *= 0.5;
  r.at(0) = 0.0;
  return r;
}

bool LineFunction::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

LineFunction& LineFunction::operator+=(const LineFunction& o) {
  if (!grid_.same_as(o.grid_)) throw std::invalid_argument("LineFunction: grid mismatch");
  for (size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

LineFunction& LineFunction::operator-=(const LineFunction& o) {
  if (!grid_.same_as(o.grid_)) throw std::invalid_argument("LineFunction: grid mismatch");
  for (size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

LineFunction& LineFunction::operator*=(cplx s) {
  for (auto& z : values_) z *= s;
  return *this;
}

// --- norms ---

namespace {

void require_finite(const GraphFunction& f) {
  if (!f.all_finite()) throw std::domain_error("non-finite samples in graph function");
}
void require_finite(const LineFunction& f) {
  if (!f.all_finite()) throw std::domain_error("non-finite samples in line function");
}
void require_q(double q) {
  if (!(q >= 2.0)) throw std::invalid_argument("norm_lq: q must be >= 2 or infinity");
}

}  // namespace

double lq_power(const GraphFunction& f, double q) {
  require_q(q);
  require_finite(f);
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k) s += kp::trapezoid_power(f.edge(k), q, f.grid().h());
  return s;
}

double lq_power(const LineFunction& f, double q) {
  require_q(q);
  require_finite(f);
  return kp::trapezoid_power(f.values(), q, f.half_grid().h());
}

double norm_lq(const GraphFunction& f, double q) {
  if (std::isinf(q)) {
    require_finite(f);
    return norm_linf_sum(f);
  }
  return std::pow(lq_power(f, q), 1.0 / q);
}

double norm_lq(const LineFunction& f, double q) {
  if (std::isinf(q)) {
    require_finite(f);
    return kp::max_abs(f.values());
  }
  return std::pow(lq_power(f, q), 1.0 / q);
}

double norm_linf_sum(const GraphFunction& f) {
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k) s += kp::max_abs(f.edge(k));
  return s;
}

double norm_linf_max(const GraphFunction& f) { return kp::max_abs(f.flat()); }

double dirichlet_sq(const GraphFunction& f) {
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k) s += kp::diff_sq(f.edge(k));
  return s / f.grid().h();
}

double dirichlet_sq(const LineFunction& f) { return kp::diff_sq(f.values()) / f.half_grid().h(); }

double vertex_tolerance(const GraphFunction& f) { return 1e-9 * (1.0 + norm_linf_max(f)); }

void require_vertex_continuity(const GraphFunction& f, const char* context) {
  const double gap = vertex_residual(f, 0.0).continuity_gap;
  if (gap > vertex_tolerance(f)) {
    std::ostringstream msg;
    msg << context << ": function is discontinuous at the vertex (gap " << gap << ")";
    throw VertexDiscontinuity(msg.str(), gap);
  }
}

double norm_h1gamma_sq(const GraphFunction& f, double gamma) {
  require_finite(f);
  require_vertex_continuity(f, "norm_h1gamma_sq");
  return dirichlet_sq(f) + f.n_edges() * gamma * std::norm(f.vertex_value());
}

double norm_h1_sq(const GraphFunction& f) { return lq_power(f, 2.0) + dirichlet_sq(f); }

double norm_h1_energy_sq(const GraphFunction& f, double gamma) {
  return lq_power(f, 2.0) + norm_h1gamma_sq(f, gamma);
}

VertexResidual vertex_residual(const GraphFunction& f, double gamma) {
  VertexResidual r;
  const double h = f.grid().h();
  cplx flux = 0.0;
  for (int j = 0; j < f.n_edges(); ++j) {
    for (int k = j + 1; k < f.n_edges(); ++k)
      r.continuity_gap = std::max(r.continuity_gap, std::abs(f.at(j, 0) - f.at(k, 0)));
    flux += (-3.0 * f.at(j, 0) + 4.0 * f.at(j, 1) - f.at(j, 2)) / (2.0 * h);
  }
  r.flux_gap = std::abs(flux - double(f.n_edges()) * gamma * f.vertex_value());
  return r;
}

cplx inner_l2(const GraphFunction& f, const GraphFunction& g) {
  if (f.n_edges() != g.n_edges() || !f.grid().same_as(g.grid()))
    throw std::invalid_argument("inner_l2: grid mismatch");
  cplx s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k) s += kp::trapezoid_inner(f.edge(k), g.edge(k), f.grid().h());
  return s;
}

cplx inner_l2(const LineFunction& f, const LineFunction& g) {
  if (!f.half_grid().same_as(g.half_grid())) throw std::invalid_argument("inner_l2: grid mismatch");
  return kp::trapezoid_inner(f.values(), g.values(), f.half_grid().h());
}

}  // namespace starnls
