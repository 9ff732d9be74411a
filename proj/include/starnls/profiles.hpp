#pragma once

#include <vector>

#include "starnls/graph.hpp"
#include "starnls/propagator.hpp"

namespace starnls {

/// Time shift t, space shift y >= 0 and one line profile per edge.
struct ProfileSpec {
  double t_shift = 0.0;
  double y_shift = 0.0;
  std::vector<LineFunction> psis;
};

/// Bump psi(x - y) on edge k plus the reflected tail weights
/// (2/N - 1) on edge k and 2/N elsewhere, all applied to psi(-x - y).
/// y is rounded to the grid; the profile must share the graph grid.
GraphFunction edge_bump(int k, double y, const LineFunction& psi, int n_edges,
                        Flags* flags = nullptr);

/// Sum of edge bumps followed by the linear flow over time -t_shift.
GraphFunction shift_profile(const ProfileSpec& spec, double gamma,
                            const LinearPropagatorConfig& cfg = {}, Flags* flags = nullptr);

/// Same operator at t = 0 assembled as reconstruct of
/// (tau_y a_j -/+ tau_{-y} R a_j) with a the decomposition matrix applied to the psis.
GraphFunction shift_profile_via_decomposition(const ProfileSpec& spec);

struct OrthogonalityResidual {
  double lq = 0.0;        // | ||sum||_q^q - sum ||T_j||_q^q - ||w||_q^q |
  double l2 = 0.0;
  double h1gamma = 0.0;
  double lq_relative = 0.0;
  double l2_relative = 0.0;
  double h1gamma_relative = 0.0;
};

OrthogonalityResidual orthogonality_report(const std::vector<ProfileSpec>& specs,
                                           const GraphFunction& remainder, double q, double gamma,
                                           const LinearPropagatorConfig& cfg = {});

/// The line-side sums the shifted norms converge to as y grows.
struct ProfileNormLimits {
  double l2_sq = 0.0;
  double h1_sq = 0.0;
  double lq_power = 0.0;
};
ProfileNormLimits profile_norm_limits(const ProfileSpec& spec, double q);

/// (2/N) |sum_k psi_k(-y)|, the vertex value of the t = 0 shifted profile.
double shifted_vertex_value(const ProfileSpec& spec);

}  // namespace starnls
