#pragma once

#include <memory>
#include <vector>

#include "starnls/decomposition.hpp"
#include "starnls/graph.hpp"

namespace starnls {

enum class LinearMethod { q_conjugated, direct_cn };

struct LinearPropagatorConfig {
  double dt = 0.01;
  LinearMethod method = LinearMethod::direct_cn;
  double gamma = 0.0;
};

/// Crank-Nicolson step for N half-lines coupled at a shared vertex value with
/// sum_k u_k'(0+) = N gamma u(0). N = 1 is the half-line Robin problem and
/// N = 2 is the whole line with a delta of strength gamma at the origin.
///
/// The tridiagonal block of every edge is factored once; a step costs N
/// Thomas sweeps plus one scalar Schur solve for the vertex.
class ArrowCrankNicolson {
 public:
  ArrowCrankNicolson(EdgeGrid grid, int n_edges, double gamma, double dt);

  double dt() const { return dt_; }
  const EdgeGrid& grid() const { return grid_; }
  int n_edges() const { return n_edges_; }

  /// Advances `values` (edge-major, n_edges * n_points) by dt in place.
  void step(std::span<cplx> values) const;

 private:
  void apply_explicit(std::span<const cplx> u, std::span<cplx> out) const;
  void solve_interior(std::span<cplx> x) const;

  EdgeGrid grid_;
  int n_edges_;
  double gamma_;
  double dt_;
  int m_;  // interior unknowns per edge, indices 1..n_points-2
  std::vector<double> damping_;
  // (I - tau H) factors: off-diagonal is constant, lower multipliers and pivots vary.
  cplx off_;
  std::vector<cplx> pivot_;
  std::vector<cplx> lower_;
  std::vector<cplx> schur_w_;
  cplx vertex_diag_;
  cplx vertex_coupling_;
};

/// One linear step of fixed size on graph functions.
class LinearStepper {
 public:
  virtual ~LinearStepper() = default;
  virtual void step(GraphFunction& u) const = 0;
  virtual double dt() const = 0;
};

/// Direct vertex-coupled Crank-Nicolson on the graph.
class GraphCnStepper final : public LinearStepper {
 public:
  GraphCnStepper(EdgeGrid grid, int n_edges, double gamma, double dt);
  void step(GraphFunction& u) const override;
  double dt() const override { return cn_.dt(); }

 private:
  ArrowCrankNicolson cn_;
};

/// Decompose, advance odd parts with the exact free flow and the even part
/// with the half-line Robin scheme, reconstruct. An absorbing layer enters as
/// a symmetric split damping factor.
class QConjugatedStepper final : public LinearStepper {
 public:
  QConjugatedStepper(EdgeGrid grid, int n_edges, double gamma, double dt);
  void step(GraphFunction& u) const override;
  double dt() const override { return dt_; }

 private:
  EdgeGrid grid_;
  int n_edges_;
  double dt_;
  ArrowCrankNicolson even_cn_;
  std::vector<double> half_damping_;
};

std::unique_ptr<LinearStepper> make_linear_stepper(const EdgeGrid& grid, int n_edges,
                                                   LinearMethod method, double gamma, double dt);

/// Step count and signed step size covering time t with |step| <= min(h, dt).
struct StepPlan {
  int n_steps = 0;
  double step = 0.0;
};
StepPlan plan_steps(double t, double requested_dt, double h);

/// Exact free evolution on the Dirichlet box [-L, L], computed with a sine
/// series (FFT of the odd 4L-periodic extension). Parity preserving.
LineFunction propagate_free_line(const LineFunction& g, double t, Flags* flags = nullptr);

/// Line with a delta of strength gamma at 0: odd part by the free flow, even
/// part by the half-line Robin Crank-Nicolson scheme.
LineFunction propagate_delta_line(const LineFunction& g, double t, double gamma, double dt,
                                  Flags* flags = nullptr);

/// Whole-line Crank-Nicolson with the jump condition at the center sample.
/// Shares its discretization with the graph scheme.
LineFunction propagate_line_cn(const LineFunction& g, double t, double gamma, double dt);

GraphFunction propagate_graph_linear(const GraphFunction& f, double t,
                                     const LinearPropagatorConfig& cfg, Flags* flags = nullptr);

/// ||u(t)||_inf * t^(1/2) / ||f||_1 at each time, L-infinity in the graph
/// (sum of edge sups) convention. Stops early if more than 1% of the initial
/// mass reaches the far layer.
std::vector<double> dispersive_ratio(const GraphFunction& f, const std::vector<double>& times,
                                     const LinearPropagatorConfig& cfg, Flags* flags = nullptr);

/// Trapezoid L1 norm over all edges.
double norm_l1(const GraphFunction& f);

/// Mass on the outer strip of each edge: the absorbing layer if present,
/// otherwise the last tenth of the edge.
double far_strip_mass(const GraphFunction& f);

}  // namespace starnls
