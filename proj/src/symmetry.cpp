#include "starnls/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "starnls/dynamics.hpp"

namespace starnls {

GroupElement GroupElement::identity(int n_edges) {
  GroupElement g;
  g.perm.resize(size_t(n_edges));
  for (int k = 0; k < n_edges; ++k) g.perm[size_t(k)] = k;
  return g;
}

bool GroupElement::same_as(const GroupElement& o, double tol) const {
  return perm == o.perm && std::abs(phase - o.phase) <= tol;
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
  if (g.perm.size() != h.perm.size()) throw std::invalid_argument("compose: size mismatch");
  GroupElement c;
  c.perm.resize(g.perm.size());
  for (size_t k = 0; k < g.perm.size(); ++k) c.perm[k] = h.perm[size_t(g.perm[k])];
  c.phase = g.phase * h.phase;
  return c;
}

namespace {

void validate(const GroupElement& g, int n_edges) {
  if (std::abs(std::abs(g.phase) - 1.0) > 1e-12)
    throw std::invalid_argument("group element: phase must have modulus 1");
  if (int(g.perm.size()) != n_edges) throw std::invalid_argument("group element: wrong edge count");
  std::vector<int> sorted = g.perm;
  std::sort(sorted.begin(), sorted.end());
  for (int k = 0; k < n_edges; ++k)
    if (sorted[size_t(k)] != k) throw std::invalid_argument("group element: not a permutation");
}

bool contains(const std::vector<GroupElement>& group, const GroupElement& g) {
  return std::any_of(group.begin(), group.end(),
                     [&](const GroupElement& e) { return e.same_as(g, 1e-9); });
}

}  // namespace

GraphFunction apply_group_element(const GraphFunction& f, const GroupElement& g) {
  validate(g, f.n_edges());
  GraphFunction out(f.grid(), f.n_edges());
  for (int k = 0; k < f.n_edges(); ++k) {
    const auto src = f.edge(g.perm[size_t(k)]);
    auto dst = out.edge(k);
    for (size_t i = 0; i < src.size(); ++i) dst[i] = g.phase * src[i];
  }
  return out;
}

std::vector<GroupElement> generate_group(const std::vector<GroupElement>& generators, int max_order) {
  if (generators.empty()) throw std::invalid_argument("generate_group: no generators");
  const int n = int(generators.front().perm.size());
  for (const auto& g : generators) validate(g, n);
  std::vector<GroupElement> group{GroupElement::identity(n)};
  for (size_t i = 0; i < group.size(); ++i) {
    for (const auto& g : generators) {
      const GroupElement c = compose(g, group[i]);
      if (!contains(group, c)) {
        group.push_back(c);
        if (int(group.size()) > max_order)
          throw std::invalid_argument("generate_group: group is infinite or too large");
      }
    }
  }
  return group;
}

GraphFunction project_invariant(const GraphFunction& f, const std::vector<GroupElement>& group) {
  if (group.empty()) throw std::invalid_argument("project_invariant: empty group");
  for (const auto& g : group)
    for (const auto& h : group)
      if (!contains(group, compose(g, h)))
        throw std::invalid_argument("project_invariant: element list is not closed");
  GraphFunction avg(f.grid(), f.n_edges());
  for (const auto& g : group) avg += apply_group_element(f, g);
  avg *= 1.0 / double(group.size());
  return avg;
}

std::vector<double> invariance_drift(const Trajectory& traj, const std::vector<GroupElement>& group) {
  std::vector<double> out;
  for (const auto& u : traj.states) {
    double worst = 0.0;
    for (const auto& g : group) {
      const GraphFunction d = apply_group_element(u, g) - u;
      worst = std::max(worst, std::sqrt(norm_h1_sq(d)));
    }
    out.push_back(worst);
  }
  return out;
}

namespace groups {

GroupElement g23() { return {{0, 2, 1}, 1.0}; }
GroupElement g23_tilde() { return {{0, 2, 1}, -1.0}; }
GroupElement sigma() { return {{1, 2, 0}, 1.0}; }
GroupElement sigma_tilde() {
  return {{1, 2, 0}, std::polar(1.0, 2.0 * std::numbers::pi / 3.0)};
}

std::vector<GroupElement> by_name(const std::string& name) {
  if (name == "sigma") return generate_group({sigma()});
  if (name == "g23") return generate_group({g23()});
  if (name == "g23_tilde") return generate_group({g23_tilde()});
  if (name == "sigma_tilde") return generate_group({sigma_tilde()});
  throw std::invalid_argument("unknown group '" + name + "'");
}

}  // namespace groups

}  // namespace starnls
