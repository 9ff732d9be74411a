#pragma once

#include <vector>

#include "starnls/graph.hpp"

namespace starnls {

/// Image of a graph function under the odd/even decomposition: N line
/// functions, parts 0..N-2 odd and part N-1 even.
struct LineTriple {
  std::vector<LineFunction> parts;

  int n_parts() const { return int(parts.size()); }
  bool is_odd(int k) const { return k < n_parts() - 1; }
  const EdgeGrid& half_grid() const { return parts.front().half_grid(); }
};

/// Row-major N x N matrices of the decomposition. `forward` maps edge values
/// to (alpha_1..alpha_N); `inverse` maps them back.
struct DecompositionMatrix {
  int n = 0;
  std::vector<double> forward;
  std::vector<double> inverse;

  double a(int j, int k) const { return forward[size_t(j * n + k)]; }
  double b(int k, int j) const { return inverse[size_t(k * n + j)]; }
};

DecompositionMatrix decomposition_matrix(int n_edges);

/// Relative parity residual above which reconstruct rejects its input.
inline constexpr double kParityTolerance = 1e-8;

LineTriple decompose(const GraphFunction& f);
/// Throws std::invalid_argument if a part violates its declared parity.
GraphFunction reconstruct(const LineTriple& t);

/// max over parts of ||part -/+ reflected part||_2, sign chosen by declared parity.
double parity_residual(const LineTriple& t);

/// ||reconstruct(t)||^2 evaluated from the parts through the matrix Gram form.
double triple_l2_form(const LineTriple& t);

}  // namespace starnls
