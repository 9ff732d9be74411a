#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "starnls/decomposition.hpp"
#include "starnls/kernels.hpp"
#include "starnls/scenario.hpp"
#include "starnls/symmetry.hpp"

namespace starnls {

namespace {

GraphFunction smooth_random(const EdgeGrid& grid, int n_edges, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(1.0, 6.0), a(-1.0, 1.0);
  const double c0 = c(rng), re0 = a(rng), im0 = a(rng);
  std::vector<double> cs, res, ims;
  for (int k = 0; k < n_edges; ++k) {
    cs.push_back(c(rng));
    res.push_back(a(rng));
    ims.push_back(a(rng));
  }
  const double w0 = 0.5 + c0 / 3.0;
  auto f = GraphFunction::sample(grid, n_edges, [&](int k, double x) {
    const cplx shared(re0, im0), own(res[size_t(k)], ims[size_t(k)]);
    const double d = x - cs[size_t(k)];
    return shared * std::exp(-0.5 * x * x / (w0 * w0)) + own * x * std::exp(-0.5 * d * d);
  });
  for (int k = 0; k < n_edges; ++k) f.at(k, grid.n_points() - 1) = 0.0;
  return f;
}

double rel_l2(const GraphFunction& a, const GraphFunction& b) {
  return norm_lq(a - b, 2.0) / norm_lq(b, 2.0);
}

}  // namespace

int run_property_suite(std::ostream& os) {
  int failures = 0;
  auto report = [&](const std::string& name, bool ok, double value, double bound) {
    std::ostringstream line;
    line << (ok ? "PASS " : "FAIL ") << name << "  value=" << io::fmt(value)
         << " bound=" << io::fmt(bound);
    os << line.str() << '\n';
    if (!ok) ++failures;
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      os << "FAIL " << name << "  exception: " << e.what() << '\n';
      ++failures;
    }
  };

  std::mt19937_64 rng(20240601);
  const EdgeGrid grid(20.0, 401);

  guarded("decomposition round trip", [&] {
    double worst = 0.0;
    for (int n : {3, 4, 5})
      for (int r = 0; r < 5; ++r) {
        const auto f = smooth_random(grid, n, rng);
        worst = std::max(worst, rel_l2(reconstruct(decompose(f)), f));
      }
    report("decomposition round trip", worst <= 1e-12, worst, 1e-12);
  });

  guarded("decomposition L2 form", [&] {
    const auto f = smooth_random(grid, 4, rng);
    const double a = lq_power(f, 2.0), b = triple_l2_form(decompose(f));
    const double gap = std::abs(a - b) / a;
    report("decomposition L2 form", gap <= 1e-12, gap, 1e-12);
  });

  guarded("linear flow unitarity", [&] {
    const auto f = smooth_random(grid, 3, rng);
    const double m0 = lq_power(f, 2.0);
    double worst = 0.0;
    for (auto method : {LinearMethod::direct_cn, LinearMethod::q_conjugated}) {
      const auto u = propagate_graph_linear(f, 1.0, {0.01, method, 1.0});
      worst = std::max(worst, std::abs(lq_power(u, 2.0) - m0) / m0);
    }
    report("linear flow unitarity", worst <= 1e-10, worst, 1e-10);
  });

  guarded("linear group law", [&] {
    const auto f = smooth_random(grid, 3, rng);
    const LinearPropagatorConfig cfg{0.01, LinearMethod::direct_cn, 0.5};
    const auto a = propagate_graph_linear(propagate_graph_linear(f, 0.3, cfg), 0.5, cfg);
    const auto b = propagate_graph_linear(f, 0.8, cfg);
    const double gap = rel_l2(a, b);
    report("linear group law", gap <= 1e-12, gap, 1e-12);
  });

  guarded("Pohozaev identities p=7", [&] {
    const auto r = pohozaev_check(7.0, 1.0, EdgeGrid(40.0, 8001));
    const double worst = std::max(r.max_identity_gap(), r.ratio_gap);
    report("Pohozaev identities p=7", worst <= 1e-6, worst, 1e-6);
  });

  guarded("cutoff second-derivative certificate", [&] {
    const double m = cutoff().max_second_derivative();
    report("cutoff second-derivative certificate", m <= 2.0 + 1e-12, m, 2.0 + 1e-12);
  });

  guarded("serial and parallel kernels agree", [&] {
    const auto f = smooth_random(EdgeGrid(20.0, 20001), 3, rng);
    const auto v = f.flat();
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
    double gap = rel(kernels::serial::trapezoid_power(v, 8.0, 0.01),
                     kernels::parallel::trapezoid_power(v, 8.0, 0.01));
    gap = std::max(gap, rel(kernels::serial::diff_sq(v), kernels::parallel::diff_sq(v)));
    std::vector<cplx> a(v.begin(), v.end()), b = a;
    kernels::serial::phase_rotate(a, 0.3, 6.0);
    kernels::parallel::phase_rotate(b, 0.3, 6.0);
    for (size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
    report("serial and parallel kernels agree", gap <= 1e-12, gap, 1e-12);
  });

  guarded("permutation equivariance", [&] {
    auto f = smooth_random(grid, 3, rng);
    f *= 0.5 / norm_linf_max(f);
    f.project_vertex_continuity();
    const ModelParams mp(3, 1.0, 7.0, -1);
    EvolveConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    cfg.store_stride = 50;
    const auto g = groups::sigma_tilde();
    const auto a = evolve_nls(apply_group_element(f, g), mp, cfg).last();
    const auto b = apply_group_element(evolve_nls(f, mp, cfg).last(), g);
    const double gap = rel_l2(a, b);
    report("permutation equivariance", gap <= 1e-12, gap, 1e-12);
  });

  guarded("snapshot round trip", [&] {
    const auto f = smooth_random(grid, 3, rng);
    std::stringstream ss;
    io::write_snapshot(ss, f);
    const auto g = io::read_snapshot(ss);
    const double gap = norm_lq(f - g, 2.0);
    report("snapshot round trip", gap == 0.0, gap, 0.0);
  });

  return failures;
}

}  // namespace starnls
