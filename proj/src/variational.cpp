#include "starnls/variational.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "starnls/functionals.hpp"
#include "starnls/kernels.hpp"

namespace starnls {

double gn_ratio(const GraphFunction& f, const ModelParams& mp) {
  const double p = mp.p();
  const double mass = lq_power(f, 2.0);
  const double d = norm_h1gamma_sq(f, mp.gamma());
  if (!(mass > 0.0) || !(d > 0.0)) throw std::domain_error("gn_ratio: zero denominator");
  return lq_power(f, p + 1.0) / (std::pow(mass, 0.25 * (p + 3.0)) * std::pow(d, 0.25 * (p - 1.0)));
}

double escape_cutoff(double x) {
  if (x <= 1.0) return 0.0;
  if (x >= 2.0) return 1.0;
  const double t = x - 1.0;
  return t * t * t * t * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
}

GraphFunction escape_profile(const EdgeGrid& grid, int n_edges, double p, double n) {
  return GraphFunction::sample(grid, n_edges, [&](int k, double x) {
    return k == 0 ? cplx(escape_cutoff(x) * soliton_value(p, 1.0, x - n)) : cplx(0.0);
  });
}

double centroid(const GraphFunction& f) {
  const double mass = lq_power(f, 2.0);
  if (!(mass > 0.0)) return 0.0;
  const double h = f.grid().h();
  double s = 0.0;
  for (int k = 0; k < f.n_edges(); ++k)
    for (int i = 0; i < f.n_points(); ++i) {
      const double w = (i == 0 || i == f.n_points() - 1) ? 0.5 * h : h;
      s += w * f.grid().x(i) * std::norm(f.at(k, i));
    }
  return s / mass;
}

namespace {

// Real arrow solve of (I - Laplacian) s = g on the graph with Kirchhoff
// coupling and zero far values; used to smooth ascent directions.
class SobolevSmoother {
 public:
  SobolevSmoother(const EdgeGrid& grid, int n_edges) : grid_(grid), n_edges_(n_edges) {
    const double h = grid.h();
    m_ = grid.n_points() - 2;
    off_ = -1.0 / (h * h);
    pivot_.resize(size_t(m_));
    lower_.resize(size_t(m_));
    const double diag = 1.0 + 2.0 / (h * h);
    pivot_[0] = diag;
    for (int r = 1; r < m_; ++r) {
      lower_[size_t(r)] = off_ / pivot_[size_t(r - 1)];
      pivot_[size_t(r)] = diag - lower_[size_t(r)] * off_;
    }
    vertex_diag_ = 1.0 + 2.0 / (h * h);
    coupling_ = -2.0 / (n_edges * h * h);
    w_.assign(size_t(m_), 0.0);
    w_[0] = off_;
    solve(w_.data());
  }

  void apply(std::vector<double>& g) const {
    const int np = grid_.n_points();
    double sum = 0.0;
    for (int k = 0; k < n_edges_; ++k) {
      double* z = g.data() + size_t(k) * size_t(np) + 1;
      solve(z);
      sum += z[0];
    }
    const double u0 = (g[0] - coupling_ * sum) / (vertex_diag_ - n_edges_ * coupling_ * w_[0]);
    for (int k = 0; k < n_edges_; ++k) {
      double* e = g.data() + size_t(k) * size_t(np);
      e[0] = u0;
      for (int r = 0; r < m_; ++r) e[r + 1] -= u0 * w_[size_t(r)];
      e[np - 1] = 0.0;
    }
  }

 private:
  void solve(double* x) const {
    for (int r = 1; r < m_; ++r) x[r] -= lower_[size_t(r)] * x[r - 1];
    x[m_ - 1] /= pivot_[size_t(m_ - 1)];
    for (int r = m_ - 2; r >= 0; --r) x[r] = (x[r] - off_ * x[r + 1]) / pivot_[size_t(r)];
  }

  EdgeGrid grid_;
  int n_edges_;
  int m_ = 0;
  double off_ = 0.0;
  std::vector<double> pivot_, lower_, w_;
  double vertex_diag_ = 0.0;
  double coupling_ = 0.0;
};

GraphFunction from_real(const EdgeGrid& grid, int n_edges, const std::vector<double>& v) {
  GraphFunction f(grid, n_edges);
  for (size_t i = 0; i < v.size(); ++i) f.flat()[i] = v[i];
  return f;
}

double log_ratio(const std::vector<double>& v, const EdgeGrid& grid, const ModelParams& mp) {
  const GraphFunction f = from_real(grid, mp.n_edges(), v);
  return std::log(gn_ratio(f, mp));
}

// L2(weighted) gradient of log(ratio) for real f with a shared vertex value.
std::vector<double> log_ratio_gradient(const std::vector<double>& v, const EdgeGrid& grid,
                                       const ModelParams& mp) {
  const GraphFunction f = from_real(grid, mp.n_edges(), v);
  const double p = mp.p();
  const double h = grid.h();
  const int np = grid.n_points();
  const int n = mp.n_edges();
  const double pw = lq_power(f, p + 1.0);
  const double mass = lq_power(f, 2.0);
  const double d = norm_h1gamma_sq(f, mp.gamma());
  const double a = 0.25 * (p + 3.0);
  const double b = 0.25 * (p - 1.0);
  std::vector<double> g(v.size(), 0.0);
  const double u0 = v[0];
  double flux = 0.0;
  for (int k = 0; k < n; ++k) {
    const double* e = v.data() + size_t(k) * size_t(np);
    double* o = g.data() + size_t(k) * size_t(np);
    flux += e[1] - u0;
    for (int i = 1; i < np - 1; ++i) {
      const double left = (i == 1) ? u0 : e[i - 1];
      const double lap = (left - 2.0 * e[i] + e[i + 1]) / (h * h);
      o[i] = (p + 1.0) * std::pow(std::abs(e[i]), p - 1.0) * e[i] / pw - 2.0 * a * e[i] / mass +
             2.0 * b * lap / d;
    }
  }
  const double lap0 = (2.0 / n) * flux / (h * h) - (2.0 * mp.gamma() / h) * u0;
  const double g0 = (p + 1.0) * std::pow(std::abs(u0), p - 1.0) * u0 / pw - 2.0 * a * u0 / mass +
                    2.0 * b * lap0 / d;
  for (int k = 0; k < n; ++k) g[size_t(k) * size_t(np)] = g0;
  return g;
}

void normalize(std::vector<double>& v, const EdgeGrid& grid, int n_edges) {
  const double mass = lq_power(from_real(grid, n_edges, v), 2.0);
  const double s = 1.0 / std::sqrt(mass);
  for (auto& x : v) x *= s;
}

std::vector<double> random_start(const EdgeGrid& grid, int n_edges, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> edge(0, n_edges - 1);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> center(0.0, 12.0), width(1.0, 3.0), amp(0.5, 1.5);
  const int np = grid.n_points();
  std::vector<double> v(size_t(n_edges) * size_t(np), 0.0);
  const int bumps = count(rng);
  for (int b = 0; b < bumps; ++b) {
    const int k0 = edge(rng);
    const double c = center(rng), w = width(rng), a = amp(rng);
    for (int k = 0; k < n_edges; ++k)
      for (int i = 0; i < np; ++i) {
        const double x = grid.x(i);
        const double y = (k == k0) ? x - c : -x - c;
        v[size_t(k) * size_t(np) + size_t(i)] += a * std::exp(-0.5 * y * y / (w * w));
      }
  }
  for (int k = 0; k < n_edges; ++k) v[size_t(k) * size_t(np) + size_t(np - 1)] = 0.0;
  return v;
}

struct AscentResult {
  double best = 0.0;
  double max_trial = 0.0;
  std::vector<double> witness;
};

AscentResult ascend(const EdgeGrid& grid, const ModelParams& mp, int iterations,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int n = mp.n_edges();
  const SobolevSmoother smoother(grid, n);
  std::vector<double> v = random_start(grid, n, rng);
  normalize(v, grid, n);
  double j = log_ratio(v, grid, mp);
  AscentResult r;
  r.max_trial = std::exp(j);
  double eta = 0.05;
  for (int it = 0; it < iterations; ++it) {
    std::vector<double> s = log_ratio_gradient(v, grid, mp);
    smoother.apply(s);
    double snorm = 0.0;
    for (double x : s) snorm = std::max(snorm, std::abs(x));
    if (!(snorm > 0.0) || !std::isfinite(snorm)) break;
    bool accepted = false;
    for (int tries = 0; tries < 30; ++tries) {
      std::vector<double> trial = v;
      for (size_t i = 0; i < v.size(); ++i) trial[i] += eta * s[i] / snorm;
      normalize(trial, grid, n);
      const double jt = log_ratio(trial, grid, mp);
      if (std::isfinite(jt)) r.max_trial = std::max(r.max_trial, std::exp(jt));
      if (std::isfinite(jt) && jt > j) {
        v = std::move(trial);
        j = jt;
        eta *= 1.5;
        accepted = true;
        break;
      }
      eta *= 0.5;
    }
    if (!accepted) break;
  }
  r.best = std::exp(j);
  r.witness = std::move(v);
  return r;
}

}  // namespace

GNEstimate estimate_gn_constant(const ModelParams& mp, const GNOptions& opts) {
  if (opts.budget < 1 || opts.restarts < 1)
    throw std::invalid_argument("estimate_gn_constant: budget and restarts must be >= 1");
  const double p = mp.p();
  const int n = mp.n_edges();
  GNEstimate est;
  est.target = gn_line_constant(p);
  est.seed = opts.seed;
  est.restarts = opts.restarts;

  const int jmax = std::max(1, 1 + int(std::floor(std::log2(opts.budget / 25.0))));
  for (int j = 1; j <= jmax; ++j) est.escape_shifts.push_back(std::pow(2.0, j));
  const double length = std::max(40.0, est.escape_shifts.back() + 24.0);
  const EdgeGrid grid = EdgeGrid::with_spacing(length, opts.h);

  double best = -1.0;
  auto consider = [&](double ratio, const GraphFunction& f) {
    est.max_trial_ratio = std::max(est.max_trial_ratio, ratio);
    if (ratio > best) {
      best = ratio;
      est.witness = f;
    }
  };

  for (double shift : est.escape_shifts) {
    const GraphFunction f = escape_profile(grid, n, p, shift);
    const double r = gn_ratio(f, mp);
    est.escape_series.push_back(r);
    consider(r, f);
  }

  if (mp.gamma() > 0.0) {
    const double y = 3.0;
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
      const GraphFunction f = GraphFunction::sample(grid, n, [&](int k, double x) {
        const double s = lambda * x;
        return cplx(soliton_value(p, 1.0, k == 0 ? s - y : s + y));
      });
      DilationSample d;
      d.lambda = lambda;
      d.ratio = gn_ratio(f, mp);
      d.vertex_fraction = n * mp.gamma() * std::norm(f.vertex_value()) / dirichlet_sq(f);
      est.dilation_series.push_back(d);
      consider(d.ratio, f);
    }
  }

  std::vector<AscentResult> runs(size_t(opts.restarts));
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < opts.restarts; ++r)
    runs[size_t(r)] = ascend(grid, mp, opts.budget, opts.seed + 0x9e3779b97f4a7c15ULL * (r + 1));
  for (const auto& run : runs) {
    est.ascent_best = std::max(est.ascent_best, run.best);
    est.max_trial_ratio = std::max(est.max_trial_ratio, run.max_trial);
    consider(run.best, from_real(grid, n, run.witness));
  }

  est.value = best;
  est.witness_centroid = centroid(est.witness);
  return est;
}

}  // namespace starnls
