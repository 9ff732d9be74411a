#include "starnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "starnls/kernels.hpp"

namespace starnls {

namespace kp = kernels::parallel;

const char* to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::blowup_suspected: return "blowup_suspected";
    case Termination::boundary_contaminated: return "boundary_contaminated";
    case Termination::non_finite: return "non_finite";
  }
  return "unknown";
}

const char* to_string(GrowthKind g) {
  switch (g) {
    case GrowthKind::bounded: return "bounded";
    case GrowthKind::growing: return "growing";
    case GrowthKind::blowup_suspected: return "blowup_suspected";
  }
  return "unknown";
}

// --- StrangStepper ---

StrangStepper::StrangStepper(const EdgeGrid& grid, const ModelParams& mp, double dt,
                             LinearMethod method, bool nonlinear)
    : mp_(mp),
      dt_(dt),
      nonlinear_(nonlinear),
      linear_(make_linear_stepper(grid, mp.n_edges(), method, mp.gamma(), dt)) {}

void StrangStepper::half_phase(GraphFunction& u) const {
  if (!nonlinear_) return;
  kp::phase_rotate(u.flat(), mp_.mu() * 0.5 * dt_, mp_.p() - 1.0);
}

void StrangStepper::half_phase_perturbation(const GraphFunction& v, GraphFunction& w) const {
  if (!nonlinear_) return;
  kp::phase_rotate_perturbation(v.flat(), w.flat(), mp_.mu() * 0.5 * dt_, mp_.p() - 1.0);
}

void StrangStepper::step(GraphFunction& u) const {
  half_phase(u);
  linear_->step(u);
  half_phase(u);
}

void StrangStepper::step_perturbation(const GraphFunction& v_now, const GraphFunction& v_next,
                                      GraphFunction& w) const {
  half_phase_perturbation(v_now, w);
  linear_->step(w);
  half_phase_perturbation(v_next, w);
}

const char* to_string(Splitting s) {
  switch (s) {
    case Splitting::strang: return "strang";
    case Splitting::suzuki4: return "suzuki4";
  }
  return "unknown";
}

namespace {

double suzuki_weight() { return 1.0 / (4.0 - std::cbrt(4.0)); }

}  // namespace

SplittingStepper::SplittingStepper(const EdgeGrid& grid, const ModelParams& mp, double dt,
                                   LinearMethod method, Splitting splitting, bool nonlinear)
    : dt_(dt),
      splitting_(splitting),
      outer_(grid, mp, splitting == Splitting::strang ? dt : suzuki_weight() * dt, method, nonlinear) {
  if (splitting == Splitting::suzuki4)
    inner_ = std::make_unique<StrangStepper>(grid, mp, (1.0 - 4.0 * suzuki_weight()) * dt, method,
                                             nonlinear);
}

void SplittingStepper::step(GraphFunction& u) const {
  if (splitting_ == Splitting::strang) {
    outer_.step(u);
    return;
  }
  outer_.step(u);
  outer_.step(u);
  inner_->step(u);
  outer_.step(u);
  outer_.step(u);
}

// --- evolve_nls ---

namespace {

double h1_norm(const GraphFunction& u) { return std::sqrt(norm_h1_sq(u)); }

GraphFunction rebase(const GraphFunction& f, const EdgeGrid& grid) {
  if (f.grid().same_as(grid)) return f;
  GraphFunction g(grid, f.n_edges());
  std::copy(f.flat().begin(), f.flat().end(), g.flat().begin());
  return g;
}

void validate(const EvolveConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("EvolveConfig: dt must be > 0");
  if (!(cfg.t_end > 0.0)) throw std::invalid_argument("EvolveConfig: t_end must be > 0");
  if (cfg.store_stride < 1) throw std::invalid_argument("EvolveConfig: store_stride must be >= 1");
  if (!(cfg.blowup_h1_factor > 1.0))
    throw std::invalid_argument("EvolveConfig: blowup_h1_factor must be > 1");
}

}  // namespace

Trajectory evolve_nls(const GraphFunction& f0, const ModelParams& mp, const EvolveConfig& cfg) {
  validate(cfg);
  if (f0.n_edges() != mp.n_edges()) throw std::invalid_argument("evolve_nls: edge count mismatch");
  if (!f0.all_finite()) throw std::domain_error("evolve_nls: non-finite initial data");
  require_vertex_continuity(f0, "evolve_nls");

  const EdgeGrid& grid = f0.grid();
  double dt = std::min(cfg.dt, grid.h());
  auto make = [&](double step) {
    return std::make_unique<SplittingStepper>(grid, mp, step, cfg.method, cfg.splitting, cfg.nonlinear);
  };
  auto stepper = make(dt);
  // With an absorbing layer the energy loss is physical; adaptation then
  // measures the jump of the same step taken on the undamped grid.
  const bool damped_check = cfg.adapt && grid.boundary().kind == FarBoundary::Kind::absorbing_layer;
  const EdgeGrid check_grid = grid.with_boundary(FarBoundary::dirichlet());
  auto make_check = [&](double step) -> std::unique_ptr<SplittingStepper> {
    if (!damped_check) return nullptr;
    return std::make_unique<SplittingStepper>(check_grid, mp, step, cfg.method, cfg.splitting,
                                              cfg.nonlinear);
  };
  auto check = make_check(dt);

  Trajectory traj;
  traj.method = cfg.method;
  traj.splitting = cfg.splitting;
  const FunctionalReport first = evaluate_functionals(f0, mp);
  const double m0 = first.mass;
  const double e0 = first.energy;
  const double h1_0 = h1_norm(f0);
  double worst_mass = 0.0;
  double worst_energy = 0.0;

  auto record = [&](double t, const GraphFunction& u, const FunctionalReport& fr) {
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.diagnostics.push_back(fr);
    if (m0 > 0.0) worst_mass = std::max(worst_mass, std::abs(fr.mass - m0) / m0);
    const double escale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
    worst_energy = std::max(worst_energy, std::abs(fr.energy - e0) / escale);
    traj.mass_drift.push_back(worst_mass);
    traj.energy_drift.push_back(worst_energy);
  };
  record(0.0, f0, first);

  GraphFunction u = f0;
  double t = 0.0;
  double energy_prev = e0;
  // Storage follows the initial step grid so halving dt does not multiply snapshots.
  const double store_interval = cfg.store_stride * dt;
  long stored_slots = 0;
  const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);

  while (t < cfg.t_end - t_tol) {
    const double remaining = cfg.t_end - t;
    std::unique_ptr<SplittingStepper> last_step, last_check;
    const SplittingStepper* active = stepper.get();
    const SplittingStepper* active_check = check.get();
    double this_dt = dt;
    if (remaining < dt - t_tol) {
      this_dt = remaining;
      last_step = make(this_dt);
      last_check = make_check(this_dt);
      active = last_step.get();
      active_check = last_check.get();
    }
    GraphFunction trial = u;
    active->step(trial);
    if (!trial.all_finite()) {
      traj.termination = Termination::non_finite;
      traj.termination_time = t;
      traj.flags.raise("evolve_nls: non-finite state, stopped at last good state");
      break;
    }
    FunctionalReport fr_trial;
    bool have_report = false;
    if (cfg.adapt) {
      fr_trial = evaluate_functionals(trial, mp);
      have_report = true;
      const double scale = std::max({std::abs(energy_prev), 0.5 * fr_trial.h1gamma, 1e-300});
      double jump = std::abs(fr_trial.energy - energy_prev);
      if (active_check) {
        GraphFunction twin = rebase(u, check_grid);
        active_check->step(twin);
        jump = std::abs(evaluate_functionals(twin, mp).energy - energy_prev);
      }
      if (jump > 1e-6 * scale) {
        dt *= 0.5;
        if (dt < cfg.min_dt) {
          traj.termination = Termination::blowup_suspected;
          traj.termination_time = t;
          traj.flags.raise("evolve_nls: time step underflow");
          break;
        }
        stepper = make(dt);
        check = make_check(dt);
        continue;
      }
      energy_prev = fr_trial.energy;
    }
    u = std::move(trial);
    t += this_dt;
    ++traj.steps;

    const bool blown = h1_0 > 0.0 && h1_norm(u) > cfg.blowup_h1_factor * h1_0;
    const bool at_end = t >= cfg.t_end - t_tol;
    const bool slot_due = t >= (stored_slots + 1) * store_interval - t_tol;
    if (slot_due || blown || at_end) {
      record(t, u, have_report ? fr_trial : evaluate_functionals(u, mp));
      stored_slots = std::max(stored_slots + 1, long(std::floor((t + t_tol) / store_interval)));
      if (std::isnan(traj.contamination_time) && m0 > 0.0 && far_strip_mass(u) > 0.01 * m0) {
        traj.contamination_time = t;
        std::ostringstream msg;
        msg << "evolve_nls: far-boundary contamination at t = " << t;
        traj.flags.raise(msg.str());
        if (cfg.abort_on_contamination) {
          traj.termination = Termination::boundary_contaminated;
          traj.termination_time = t;
          break;
        }
      }
    }
    if (blown) {
      traj.termination = Termination::blowup_suspected;
      traj.termination_time = t;
      break;
    }
  }
  traj.final_dt = dt;
  return traj;
}

// --- wave operator ---

WaveOperatorResult solve_wave_operator(const GraphFunction& psi_plus, double T,
                                       const ModelParams& mp, const EvolveConfig& cfg) {
  if (!(T > 0.0)) throw std::invalid_argument("solve_wave_operator: T must be > 0");
  require_vertex_continuity(psi_plus, "solve_wave_operator");
  const EdgeGrid& grid = psi_plus.grid();
  // Backward steps through a damping layer would amplify; the backward solve
  // runs on the undamped grid and only the forward check sees the layer.
  const EdgeGrid closed = grid.with_boundary(FarBoundary::dirichlet());
  const StepPlan plan = plan_steps(T, cfg.dt, grid.h());
  const StrangStepper out(closed, mp, plan.step, cfg.method, cfg.nonlinear);
  const StrangStepper back(closed, mp, -plan.step, cfg.method, cfg.nonlinear);

  GraphFunction v = rebase(psi_plus, closed);
  for (int s = 0; s < plan.n_steps; ++s) out.linear().step(v);

  GraphFunction w(closed, psi_plus.n_edges());
  for (int s = 0; s < plan.n_steps; ++s) {
    GraphFunction v_next = v;
    back.linear().step(v_next);
    back.step_perturbation(v, v_next, w);
    v = std::move(v_next);
  }
  WaveOperatorResult r{psi_plus + rebase(w, grid), rebase(w, grid), 0.0};

  const StrangStepper forward(grid, mp, plan.step, cfg.method, cfg.nonlinear);
  v = psi_plus;
  w = r.correction;
  for (int s = 0; s < 2 * plan.n_steps; ++s) {
    GraphFunction v_next = v;
    forward.linear().step(v_next);
    forward.step_perturbation(v, v_next, w);
    v = std::move(v_next);
  }
  r.matching_residual = h1_norm(w);
  return r;
}

// --- scattering ---

double ScatteringReport::tail_sum(double t0) const {
  double s = 0.0;
  for (size_t i = 0; i < cauchy_residuals.size(); ++i)
    if (times[i] >= t0) s += cauchy_residuals[i];
  return s;
}

ScatteringReport scattering_diagnostic(const Trajectory& traj, const ModelParams& mp) {
  ScatteringReport r;
  r.times = traj.times;
  if (traj.termination == Termination::blowup_suspected ||
      traj.termination == Termination::non_finite) {
    r.applicable = false;
    return r;
  }
  if (traj.states.empty()) return r;
  const EdgeGrid& grid = traj.states.front().grid();
  const auto ex = mp.strichartz();
  const double dt = traj.final_dt > 0.0 ? traj.final_dt : grid.h();

  std::map<long long, std::unique_ptr<SplittingStepper>> steppers;
  double running = 0.0;
  double prev_norm = 0.0;
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& u = traj.states[i];
    const double t = traj.times[i];
    r.linfty_decay.push_back(norm_linf_sum(u) * std::sqrt(t));
    const double lr = std::pow(norm_lq(u, ex.r), ex.a);
    if (i > 0) running += 0.5 * (t - traj.times[i - 1]) * (lr + prev_norm);
    prev_norm = lr;
    r.strichartz_accumulation.push_back(running);
    if (i + 1 == traj.states.size()) break;

    const double gap = traj.times[i + 1] - t;
    const StepPlan plan = plan_steps(gap, dt * (1.0 + 1e-9), grid.h() * (1.0 + 1e-9));
    const long long key = std::llround(plan.step * 1e12);
    auto it = steppers.find(key);
    if (it == steppers.end())
      it = steppers
               .emplace(key, std::make_unique<SplittingStepper>(grid, mp, plan.step, traj.method,
                                                                traj.splitting, false))
               .first;
    GraphFunction lin = u;
    for (int s = 0; s < plan.n_steps; ++s) it->second->step(lin);
    GraphFunction diff = traj.states[i + 1] - lin;
    diff.project_vertex_continuity();
    r.cauchy_residuals.push_back(
        std::sqrt(lq_power(diff, 2.0) + norm_h1gamma_sq(diff, mp.gamma())));
  }
  return r;
}

// --- blow-up ---

BlowupReport blowup_diagnostic(const Trajectory& traj, const ModelParams& mp, double R) {
  BlowupReport r;
  r.times = traj.times;
  if (traj.states.empty()) return r;
  for (const auto& u : traj.states) r.h1_series.push_back(h1_norm(u));
  r.virial = localized_virial(traj, mp, R);
  const double h1_0 = r.h1_series.front();
  const double h1_max = *std::max_element(r.h1_series.begin(), r.h1_series.end());
  r.h1_growth = h1_0 > 0.0 ? h1_max / h1_0 : 0.0;

  const auto& d2 = r.virial.d2v_formula;
  const size_t n = d2.size();
  size_t onset = n;
  while (onset > 0 && d2[onset - 1] < 0.0) --onset;
  if (n >= 2 && onset + 2 <= n) {
    r.concavity_onset = traj.times[onset];
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t i = onset; i < n; ++i) worst = std::max(worst, d2[i]);
    const double a = 0.5 * worst;
    const double b = r.virial.dv_formula.back();
    const double c = r.virial.v.back();
    if (a < 0.0 && c > 0.0) {
      const double disc = b * b - 4.0 * a * c;
      r.t_star = traj.times.back() + (-b - std::sqrt(disc)) / (2.0 * a);
    }
  }

  const SampledCutoff cut = cutoff_profile(R, traj.states.front().grid());
  double d4max = 0.0;
  for (double v : cut.d4) d4max = std::max(d4max, std::abs(v));
  const double p = mp.p();
  const double h = traj.states.front().grid().h();
  size_t certified = 0;
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const auto& u = traj.states[i];
    const auto& fr = traj.diagnostics[i];
    double outer = 0.0;
    const int np = u.n_points();
    for (int k = 0; k < u.n_edges(); ++k)
      for (int j = 0; j < np; ++j) {
        const double w = (j == 0 || j == np - 1) ? 0.5 * h : h;
        outer += w * (2.0 - cut.d2[size_t(j)]) * kernels::abs_pow(std::norm(u.at(k, j)), p + 1.0);
      }
    const double eps = d4max * fr.mass + 2.0 * (p - 1.0) / (p + 1.0) * outer;
    r.eps_r = std::max(r.eps_r, eps);
    if (d2[i] <= 4.0 * fr.virial_k + eps) ++certified;
  }
  r.certificate_fraction = double(certified) / double(traj.states.size());

  if (traj.termination == Termination::blowup_suspected) r.kind = GrowthKind::blowup_suspected;
  else if (r.h1_growth >= 10.0) r.kind = GrowthKind::growing;
  return r;
}

}  // namespace starnls
