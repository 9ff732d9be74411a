#pragma once

#include <string>
#include <vector>

#include "starnls/graph.hpp"

namespace starnls {

struct Trajectory;

/// (g u)_k = phase * u_{perm[k]}.
struct GroupElement {
  std::vector<int> perm;
  cplx phase = 1.0;

  static GroupElement identity(int n_edges);
  bool same_as(const GroupElement& o, double tol = 1e-12) const;
};

/// g then h applied as g(h(u)).
GroupElement compose(const GroupElement& g, const GroupElement& h);

/// Throws std::invalid_argument on a non-unit phase or a bad permutation.
GraphFunction apply_group_element(const GraphFunction& f, const GroupElement& g);

/// Closure of the generators under composition (at most `max_order` elements).
std::vector<GroupElement> generate_group(const std::vector<GroupElement>& generators,
                                         int max_order = 720);

/// Group average; throws std::invalid_argument if the list is not closed.
GraphFunction project_invariant(const GraphFunction& f, const std::vector<GroupElement>& group);

/// max_g ||g u(t) - u(t)||_{H1} at each stored state.
std::vector<double> invariance_drift(const Trajectory& traj, const std::vector<GroupElement>& group);

namespace groups {

/// Swap edges 2 and 3.
GroupElement g23();
/// Swap edges 2 and 3 and negate.
GroupElement g23_tilde();
/// Cyclic shift of three edges.
GroupElement sigma();
/// Cyclic shift times a primitive cube root of unity.
GroupElement sigma_tilde();

/// Named group on three edges: "sigma", "g23", "g23_tilde", "sigma_tilde".
std::vector<GroupElement> by_name(const std::string& name);

}  // namespace groups

}  // namespace starnls
