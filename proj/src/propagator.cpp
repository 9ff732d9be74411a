#include "starnls/propagator.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "starnls/kernels.hpp"

namespace starnls {

// --- ArrowCrankNicolson ---

ArrowCrankNicolson::ArrowCrankNicolson(EdgeGrid grid, int n_edges, double gamma, double dt)
    : grid_(grid), n_edges_(n_edges), gamma_(gamma), dt_(dt), m_(grid.n_points() - 2) {
  if (n_edges < 1) throw std::invalid_argument("ArrowCrankNicolson: n_edges must be >= 1");
  if (!(std::abs(dt) > 0.0) || !std::isfinite(dt))
    throw std::invalid_argument("ArrowCrankNicolson: dt must be finite and nonzero");
  const double h = grid.h();
  const double tau = 0.5 * dt;
  const cplx I(0.0, 1.0);
  damping_.resize(size_t(grid.n_points()));
  for (int i = 0; i < grid.n_points(); ++i) damping_[size_t(i)] = grid.damping(grid.x(i));

  off_ = -I * tau / (h * h);
  pivot_.resize(size_t(m_));
  lower_.resize(size_t(m_));
  for (int r = 0; r < m_; ++r) {
    const cplx diag = 1.0 + 2.0 * I * tau / (h * h) + tau * damping_[size_t(r + 1)];
    if (r == 0) {
      pivot_[0] = diag;
    } else {
      lower_[size_t(r)] = off_ / pivot_[size_t(r - 1)];
      pivot_[size_t(r)] = diag - lower_[size_t(r)] * off_;
    }
  }
  vertex_diag_ = 1.0 + I * tau * (2.0 / (h * h) + 2.0 * gamma / h) + tau * damping_[0];
  vertex_coupling_ = -I * tau * 2.0 / (n_edges * h * h);

  schur_w_.assign(size_t(m_), 0.0);
  schur_w_[0] = off_;
  solve_interior(schur_w_);
}

void ArrowCrankNicolson::solve_interior(std::span<cplx> x) const {
  for (int r = 1; r < m_; ++r) x[size_t(r)] -= lower_[size_t(r)] * x[size_t(r - 1)];
  x[size_t(m_ - 1)] /= pivot_[size_t(m_ - 1)];
  for (int r = m_ - 2; r >= 0; --r)
    x[size_t(r)] = (x[size_t(r)] - off_ * x[size_t(r + 1)]) / pivot_[size_t(r)];
}

void ArrowCrankNicolson::apply_explicit(std::span<const cplx> u, std::span<cplx> out) const {
  const int np = grid_.n_points();
  const double h = grid_.h();
  const double tau = 0.5 * dt_;
  const cplx I(0.0, 1.0);
  const double inv_h2 = 1.0 / (h * h);
  const cplx u0 = u[0];
  cplx flux = 0.0;
  for (int k = 0; k < n_edges_; ++k) {
    const cplx* e = u.data() + size_t(k) * size_t(np);
    cplx* o = out.data() + size_t(k) * size_t(np);
    flux += e[1] - u0;
    for (int i = 1; i < np - 1; ++i) {
      const cplx left = (i == 1) ? u0 : e[i - 1];
      const cplx lap = (left - 2.0 * e[i] + e[i + 1]) * inv_h2;
      o[i] = e[i] + tau * (I * lap - damping_[size_t(i)] * e[i]);
    }
    o[np - 1] = 0.0;
  }
  const cplx lap0 = (2.0 / n_edges_) * flux * inv_h2 - (2.0 * gamma_ / h) * u0;
  const cplx v0 = u0 + tau * (I * lap0 - damping_[0] * u0);
  for (int k = 0; k < n_edges_; ++k) out[size_t(k) * size_t(np)] = v0;
}

void ArrowCrankNicolson::step(std::span<cplx> values) const {
  const int np = grid_.n_points();
  if (values.size() != size_t(n_edges_) * size_t(np))
    throw std::invalid_argument("ArrowCrankNicolson::step: size mismatch");
  std::vector<cplx> rhs(values.size());
  apply_explicit(values, rhs);

  cplx first_sum = 0.0;
  for (int k = 0; k < n_edges_; ++k) {
    std::span<cplx> z(rhs.data() + size_t(k) * size_t(np) + 1, size_t(m_));
    solve_interior(z);
    first_sum += z[0];
  }
  const cplx r0 = rhs[0];
  const cplx u0 = (r0 - vertex_coupling_ * first_sum) /
                  (vertex_diag_ - double(n_edges_) * vertex_coupling_ * schur_w_[0]);
  for (int k = 0; k < n_edges_; ++k) {
    cplx* e = values.data() + size_t(k) * size_t(np);
    const cplx* z = rhs.data() + size_t(k) * size_t(np) + 1;
    e[0] = u0;
    for (int r = 0; r < m_; ++r) e[r + 1] = z[r] - u0 * schur_w_[size_t(r)];
    e[np - 1] = 0.0;
  }
}

// --- graph steppers ---

GraphCnStepper::GraphCnStepper(EdgeGrid grid, int n_edges, double gamma, double dt)
    : cn_(grid, n_edges, gamma, dt) {}

void GraphCnStepper::step(GraphFunction& u) const {
  if (u.n_edges() != cn_.n_edges() || !u.grid().same_as(cn_.grid()))
    throw std::invalid_argument("GraphCnStepper: grid mismatch");
  cn_.step(u.flat());
}

QConjugatedStepper::QConjugatedStepper(EdgeGrid grid, int n_edges, double gamma, double dt)
    : grid_(grid),
      n_edges_(n_edges),
      dt_(dt),
      even_cn_(grid.with_boundary(FarBoundary::dirichlet()), 1, gamma, dt) {
  half_damping_.resize(size_t(grid.n_points()));
  for (int i = 0; i < grid.n_points(); ++i)
    half_damping_[size_t(i)] = std::exp(-0.5 * dt * grid.damping(grid.x(i)));
}

void QConjugatedStepper::step(GraphFunction& u) const {
  if (u.n_edges() != n_edges_ || !u.grid().same_as(grid_))
    throw std::invalid_argument("QConjugatedStepper: grid mismatch");
  const int np = grid_.n_points();
  const bool damped = grid_.boundary().kind == FarBoundary::Kind::absorbing_layer;
  auto damp = [&](GraphFunction& f) {
    if (!damped) return;
    for (int k = 0; k < n_edges_; ++k)
      for (int i = 0; i < np; ++i) f.at(k, i) *= half_damping_[size_t(i)];
  };
  damp(u);
  LineTriple t = decompose(u);
  for (int j = 0; j < t.n_parts(); ++j) {
    auto& part = t.parts[size_t(j)];
    if (t.is_odd(j)) {
      part = propagate_free_line(part, dt_).odd_part();
    } else {
      std::vector<cplx> half(static_cast<size_t>(np));
      for (int i = 0; i < np; ++i) half[size_t(i)] = part.at(i);
      even_cn_.step(half);
      for (int i = 0; i < np; ++i) {
        part.at(i) = half[size_t(i)];
        part.at(-i) = half[size_t(i)];
      }
    }
  }
  u = reconstruct(t);
  damp(u);
}

std::unique_ptr<LinearStepper> make_linear_stepper(const EdgeGrid& grid, int n_edges,
                                                   LinearMethod method, double gamma, double dt) {
  if (method == LinearMethod::direct_cn)
    return std::make_unique<GraphCnStepper>(grid, n_edges, gamma, dt);
  return std::make_unique<QConjugatedStepper>(grid, n_edges, gamma, dt);
}

StepPlan plan_steps(double t, double requested_dt, double h) {
  if (!(requested_dt > 0.0)) throw std::invalid_argument("plan_steps: dt must be > 0");
  if (t == 0.0) return {};
  const double cap = std::min(h, requested_dt);
  const int n = std::max(1, int(std::ceil(std::abs(t) / cap - 1e-9)));
  return {n, t / n};
}

// --- spectral free line ---

namespace {

struct FftPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex fft_mutex;

const FftPlans& plans_for(int size) {
  static std::map<int, FftPlans> cache;
  std::lock_guard<std::mutex> lock(fft_mutex);
  auto it = cache.find(size);
  if (it != cache.end()) return it->second;
  std::vector<cplx> scratch(static_cast<size_t>(size));
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  FftPlans p;
  p.forward = fftw_plan_dft_1d(size, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_1d(size, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  return cache.emplace(size, p).first->second;
}

double line_mass(const LineFunction& g) { return lq_power(g, 2.0); }

}  // namespace

LineFunction propagate_free_line(const LineFunction& g, double t, Flags* flags) {
  if (!g.all_finite()) throw std::domain_error("propagate_free_line: non-finite input");
  if (t == 0.0) return g;
  const int n = g.half_grid().n_points();
  const int span = 2 * (n - 1);
  const int m = 2 * span;
  const double h = g.half_grid().h();

  const double peak = kernels::parallel::max_abs(g.values());
  const double edge_level = std::max({std::abs(g.values()[0]), std::abs(g.values()[1]),
                                      std::abs(g.values()[size_t(span)]),
                                      std::abs(g.values()[size_t(span - 1)])});
  if (peak > 0.0 && edge_level > 1e-8 * peak)
    raise_flag(flags, "propagate_free_line: data not decayed at the box ends");

  std::vector<cplx> ext(static_cast<size_t>(m));
  for (int j = 1; j < span; ++j) ext[size_t(j)] = g.values()[size_t(j)];
  for (int j = span + 1; j < m; ++j) ext[size_t(j)] = -ext[size_t(m - j)];

  const auto& plans = plans_for(m);
  auto* buf = reinterpret_cast<fftw_complex*>(ext.data());
  fftw_execute_dft(plans.forward, buf, buf);
  const double dk = 2.0 * std::numbers::pi / (m * h);
  for (int j = 0; j < m; ++j) {
    const int mode = (j <= m / 2) ? j : j - m;
    const double k = mode * dk;
    const double phase = -k * k * t;
    ext[size_t(j)] *= cplx(std::cos(phase), std::sin(phase)) / double(m);
  }
  fftw_execute_dft(plans.backward, buf, buf);

  LineFunction out(g.half_grid());
  for (int j = 0; j <= span; ++j) out.values()[size_t(j)] = ext[size_t(j)];
  out.values()[0] = 0.0;
  out.values()[size_t(span)] = 0.0;

  if (flags) {
    LineFunction clipped = g;
    clipped.values()[0] = 0.0;
    clipped.values()[size_t(span)] = 0.0;
    const double m0 = line_mass(clipped);
    if (m0 > 0.0 && std::abs(line_mass(out) - m0) > 1e-10 * m0)
      flags->raise("propagate_free_line: mass changed by more than 1e-10 relative");
  }
  return out;
}

LineFunction propagate_delta_line(const LineFunction& g, double t, double gamma, double dt,
                                  Flags* flags) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("propagate_delta_line: gamma must be >= 0");
  if (t == 0.0) return g;
  const EdgeGrid grid = g.half_grid().with_boundary(FarBoundary::dirichlet());
  const int np = grid.n_points();
  LineFunction odd = propagate_free_line(g.odd_part(), t, flags).odd_part();

  const LineFunction even = g.even_part();
  std::vector<cplx> half(static_cast<size_t>(np));
  for (int i = 0; i < np; ++i) half[size_t(i)] = even.at(i);
  const double m0 = kernels::parallel::trapezoid_power(half, 2.0, grid.h());
  const StepPlan plan = plan_steps(t, dt, grid.h());
  ArrowCrankNicolson cn(grid, 1, gamma, plan.step);
  for (int s = 0; s < plan.n_steps; ++s) cn.step(half);
  const double m1 = kernels::parallel::trapezoid_power(half, 2.0, grid.h());
  if (m0 > 0.0 && std::abs(m1 - m0) > 1e-8 * m0 * std::max(1.0, std::abs(t)))
    raise_flag(flags, "propagate_delta_line: L2 drift above 1e-8 per unit time");

  LineFunction out = odd;
  for (int i = 0; i < np; ++i) {
    out.at(i) += half[size_t(i)];
    if (i > 0) out.at(-i) += half[size_t(i)];
  }
  return out;
}

LineFunction propagate_line_cn(const LineFunction& g, double t, double gamma, double dt) {
  if (t == 0.0) return g;
  const EdgeGrid& grid = g.half_grid();
  const int np = grid.n_points();
  std::vector<cplx> buf(size_t(2 * np));
  for (int i = 0; i < np; ++i) {
    buf[size_t(i)] = g.at(i);
    buf[size_t(np + i)] = g.at(-i);
  }
  const StepPlan plan = plan_steps(t, dt, grid.h());
  ArrowCrankNicolson cn(grid, 2, gamma, plan.step);
  for (int s = 0; s < plan.n_steps; ++s) cn.step(buf);
  LineFunction out(grid);
  for (int i = 0; i < np; ++i) {
    out.at(i) = buf[size_t(i)];
    out.at(-i) = buf[size_t(np + i)];
  }
  return out;
}

GraphFunction propagate_graph_linear(const GraphFunction& f, double t,
                                     const LinearPropagatorConfig& cfg, Flags* flags) {
  require_vertex_continuity(f, "propagate_graph_linear");
  if (!(cfg.gamma >= 0.0)) throw std::invalid_argument("propagate_graph_linear: gamma must be >= 0");
  if (t == 0.0) return f;
  const StepPlan plan = plan_steps(t, cfg.dt, f.grid().h());
  const auto stepper = make_linear_stepper(f.grid(), f.n_edges(), cfg.method, cfg.gamma, plan.step);
  GraphFunction u = f;
  for (int s = 0; s < plan.n_steps; ++s) stepper->step(u);

  if (flags) {
    if (vertex_residual(u, cfg.gamma).continuity_gap > vertex_tolerance(u))
      flags->raise("propagate_graph_linear: vertex continuity lost");
    if (f.grid().boundary().kind == FarBoundary::Kind::dirichlet) {
      const double m0 = lq_power(f, 2.0);
      const double m1 = lq_power(u, 2.0);
      if (m0 > 0.0 && std::abs(m1 - m0) > 1e-10 * m0 * std::max(1.0, std::abs(t)))
        flags->raise("propagate_graph_linear: L2 drift above 1e-10 per unit time");
    }
  }
  return u;
}

double norm_l1(const GraphFunction& f) {
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k)
    s += kernels::parallel::trapezoid_power(f.edge(k), 1.0, f.grid().h());
  return s;
}

double far_strip_mass(const GraphFunction& f) {
  const EdgeGrid& grid = f.grid();
  const double width = grid.boundary().kind == FarBoundary::Kind::absorbing_layer
                           ? grid.boundary().width
                           : 0.1 * grid.length();
  const int start = std::clamp(int(std::floor((grid.length() - width) / grid.h())), 0,
                               grid.n_points() - 1);
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k)
    s += kernels::parallel::trapezoid_power(f.edge(k).subspan(size_t(start)), 2.0, grid.h());
  return s;
}

std::vector<double> dispersive_ratio(const GraphFunction& f, const std::vector<double>& times,
                                     const LinearPropagatorConfig& cfg, Flags* flags) {
  if (!std::is_sorted(times.begin(), times.end()) ||
      (!times.empty() && !(times.front() > 0.0)))
    throw std::invalid_argument("dispersive_ratio: times must be positive and increasing");
  std::vector<double> out;
  const double l1 = norm_l1(f);
  if (l1 == 0.0) return std::vector<double>(times.size(), 0.0);
  require_vertex_continuity(f, "dispersive_ratio");
  const double h = f.grid().h();
  const double dt = std::min(cfg.dt, h);
  const auto stepper = make_linear_stepper(f.grid(), f.n_edges(), cfg.method, cfg.gamma, dt);
  const double m0 = lq_power(f, 2.0);
  GraphFunction u = f;
  double now = 0.0;
  for (double target : times) {
    const int steps = int(std::lround((target - now) / dt));
    for (int s = 0; s < steps; ++s) stepper->step(u);
    now += steps * dt;
    if (far_strip_mass(u) > 0.01 * m0) {
      std::ostringstream msg;
      msg << "dispersive_ratio: boundary reflection risk at t = " << now << ", series truncated";
      raise_flag(flags, msg.str());
      break;
    }
    out.push_back(norm_linf_sum(u) * std::sqrt(now) / l1);
  }
  return out;
}

}  // namespace starnls
