#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "starnls/model.hpp"

namespace starnls {

/// Far-end treatment of each truncated half-line.
struct FarBoundary {
  enum class Kind { dirichlet, absorbing_layer };
  Kind kind = Kind::dirichlet;
  double width = 0.0;     // layer width (absorbing only)
  double strength = 0.0;  // peak damping rate (absorbing only)

  static FarBoundary dirichlet() { return {}; }
  static FarBoundary absorbing(double width, double strength) {
    return {Kind::absorbing_layer, width, strength};
  }
};

/// Uniform sampling of [0, L] shared by every edge; x_i = i*h, i = 0..n-1.
class EdgeGrid {
 public:
  EdgeGrid(double length, int n_points, FarBoundary boundary = FarBoundary::dirichlet());

  /// Grid of spacing close to `h` on [0, length]; length is rounded to a multiple of h.
  static EdgeGrid with_spacing(double length, double h,
                               FarBoundary boundary = FarBoundary::dirichlet());

  double length() const { return length_; }
  int n_points() const { return n_points_; }
  double h() const { return h_; }
  double x(int i) const { return i * h_; }
  const FarBoundary& boundary() const { return boundary_; }
  EdgeGrid with_boundary(FarBoundary boundary) const;

  /// Complex-potential damping rate at x (zero outside the absorbing layer).
  double damping(double x) const;

  /// Same sampling; the far boundary is not compared.
  bool same_as(const EdgeGrid& other) const;

 private:
  double length_;
  int n_points_;
  double h_;
  FarBoundary boundary_;
};

/// Raised when a graph function is not continuous at the vertex.
class VertexDiscontinuity : public std::invalid_argument {
 public:
  VertexDiscontinuity(const std::string& what, double residual)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Complex samples of u_k(x_i) on N half-lines joined at x = 0.
class GraphFunction {
 public:
  GraphFunction(EdgeGrid grid, int n_edges);

  /// Samples fn(k, x) on every edge.
  static GraphFunction sample(EdgeGrid grid, int n_edges,
                              const std::function<cplx(int, double)>& fn);

  const EdgeGrid& grid() const { return grid_; }
  int n_edges() const { return n_edges_; }
  int n_points() const { return grid_.n_points(); }

  std::span<cplx> edge(int k) { return {values_.data() + offset(k), size_t(grid_.n_points())}; }
  std::span<const cplx> edge(int k) const {
    return {values_.data() + offset(k), size_t(grid_.n_points())};
  }
  cplx& at(int k, int i) { return values_[offset(k) + i]; }
  cplx at(int k, int i) const { return values_[offset(k) + i]; }

  std::span<cplx> flat() { return values_; }
  std::span<const cplx> flat() const { return values_; }

  /// Value at the vertex as read from edge 1.
  cplx vertex_value() const { return values_[0]; }
  /// Replace every edge's vertex sample by their mean.
  void project_vertex_continuity();

  bool all_finite() const;

  GraphFunction& operator+=(const GraphFunction& o);
  GraphFunction& operator-=(const GraphFunction& o);
  GraphFunction& operator*=(cplx s);
  friend GraphFunction operator+(GraphFunction a, const GraphFunction& b) { return a += b; }
  friend GraphFunction operator-(GraphFunction a, const GraphFunction& b) { return a -= b; }
  friend GraphFunction operator*(GraphFunction a, cplx s) { return a *= s; }
  friend GraphFunction operator*(cplx s, GraphFunction a) { return a *= s; }

 private:
  size_t offset(int k) const { return size_t(k) * size_t(grid_.n_points()); }
  void require_compatible(const GraphFunction& o) const;

  EdgeGrid grid_;
  int n_edges_;
  std::vector<cplx> values_;
};

/// Samples on the symmetric grid {-L, ..., 0, ..., L} (2n-1 points) built from an EdgeGrid.
class LineFunction {
 public:
  explicit LineFunction(EdgeGrid half_grid);

  static LineFunction sample(EdgeGrid half_grid, const std::function<cplx(double)>& fn);

  const EdgeGrid& half_grid() const { return grid_; }
  int size() const { return 2 * grid_.n_points() - 1; }
  int center() const { return grid_.n_points() - 1; }
  double x_of(int idx) const { return (idx - center()) * grid_.h(); }

  /// Sample at signed offset j from the center, j in [-(n-1), n-1].
  cplx& at(int j) { return values_[size_t(center() + j)]; }
  cplx at(int j) const { return values_[size_t(center() + j)]; }

  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }

  /// Mirror image x -> -x.
  LineFunction reflected() const;
  LineFunction even_part() const;
  LineFunction odd_part() const;
  bool all_finite() const;

  LineFunction& operator+=(const LineFunction& o);
  LineFunction& operator-=(const LineFunction& o);
  LineFunction& operator*=(cplx s);
  friend LineFunction operator+(LineFunction a, const LineFunction& b) { return a += b; }
  friend LineFunction operator-(LineFunction a, const LineFunction& b) { return a -= b; }
  friend LineFunction operator*(LineFunction a, cplx s) { return a *= s; }
  friend LineFunction operator*(cplx s, LineFunction a) { return a *= s; }

 private:
  EdgeGrid grid_;
  std::vector<cplx> values_;
};

// --- norms and inner products (composite trapezoid, forward differences) ---

/// (sum_k int |f_k|^q)^(1/q); q = infinity gives the sum of per-edge sup norms.
double norm_lq(const GraphFunction& f, double q);
double norm_lq(const LineFunction& f, double q);
/// sum_k int |f_k|^q without the q-th root.
double lq_power(const GraphFunction& f, double q);
double lq_power(const LineFunction& f, double q);
/// Sum over edges of sup |f_k| (the graph L-infinity convention).
double norm_linf_sum(const GraphFunction& f);
/// Plain max over all samples; diagnostic only.
double norm_linf_max(const GraphFunction& f);

/// ||d_x f||^2 with cell-centred differences, sum_k sum_i |f_{i+1} - f_i|^2 / h.
double dirichlet_sq(const GraphFunction& f);
double dirichlet_sq(const LineFunction& f);

/// ||d_x f||^2 + N gamma |f_1(0)|^2. Throws VertexDiscontinuity if f is not
/// continuous at the vertex.
double norm_h1gamma_sq(const GraphFunction& f, double gamma);
/// M + ||d_x f||^2.
double norm_h1_sq(const GraphFunction& f);
/// M + ||f||^2_{H1_gamma}; the norm conserved by the discrete linear flow.
double norm_h1_energy_sq(const GraphFunction& f, double gamma);

struct VertexResidual {
  double continuity_gap = 0.0;
  double flux_gap = 0.0;
};

/// max_{j,k} |f_j(0) - f_k(0)| and |sum_k f_k'(0+) - N gamma f_1(0)| with
/// second-order one-sided derivatives.
VertexResidual vertex_residual(const GraphFunction& f, double gamma);

/// Tolerance used to accept a sample set as continuous at the vertex.
double vertex_tolerance(const GraphFunction& f);
void require_vertex_continuity(const GraphFunction& f, const char* context);

cplx inner_l2(const GraphFunction& f, const GraphFunction& g);
cplx inner_l2(const LineFunction& f, const LineFunction& g);

}  // namespace starnls
