#pragma once

#include <limits>
#include <vector>

#include "starnls/functionals.hpp"
#include "starnls/propagator.hpp"

namespace starnls {

enum class Termination { completed, blowup_suspected, boundary_contaminated, non_finite };
const char* to_string(Termination t);

/// strang: one N(dt/2) L(dt) N(dt/2) step. suzuki4: Suzuki's symmetric
/// fourth-order composition of five Strang steps (weights w, w, 1 - 4w, w, w).
enum class Splitting { strang, suzuki4 };
const char* to_string(Splitting s);

struct EvolveConfig {
  double dt = 0.01;
  double t_end = 1.0;
  /// States are stored every store_stride * dt of simulated time.
  int store_stride = 1;
  double blowup_h1_factor = 1e3;
  /// Halve dt whenever one step changes the energy by more than 1e-6 relative.
  bool adapt = false;
  /// Adaptation gives up (blowup_suspected) below this step.
  double min_dt = 1e-7;
  LinearMethod method = LinearMethod::direct_cn;
  Splitting splitting = Splitting::suzuki4;
  /// False drops the nonlinearity, leaving the linear flow.
  bool nonlinear = true;
  /// Stop when more than 1% of the initial mass sits on the far strip.
  bool abort_on_contamination = false;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GraphFunction> states;
  std::vector<FunctionalReport> diagnostics;
  /// Running max of |M(t) - M(0)| / M(0) and |E(t) - E(0)| / |E(0)|.
  std::vector<double> mass_drift;
  std::vector<double> energy_drift;
  Termination termination = Termination::completed;
  double termination_time = std::numeric_limits<double>::quiet_NaN();
  double contamination_time = std::numeric_limits<double>::quiet_NaN();
  double final_dt = 0.0;
  long steps = 0;
  /// Scheme that produced the states; the scattering diagnostic reuses it.
  LinearMethod method = LinearMethod::direct_cn;
  Splitting splitting = Splitting::suzuki4;
  Flags flags;

  const GraphFunction& last() const { return states.back(); }
};

/// Strang splitting N(dt/2) L(dt) N(dt/2) with the exact phase flow for N.
/// Negative dt runs the same scheme backward and inverts a forward step.
class StrangStepper {
 public:
  StrangStepper(const EdgeGrid& grid, const ModelParams& mp, double dt, LinearMethod method,
                bool nonlinear = true);
  void step(GraphFunction& u) const;
  /// Step for u = v + w where v follows the linear flow; only w is updated,
  /// v must be advanced by the caller with linear().
  void step_perturbation(const GraphFunction& v_now, const GraphFunction& v_next,
                         GraphFunction& w) const;
  const LinearStepper& linear() const { return *linear_; }
  double dt() const { return dt_; }

 private:
  void half_phase(GraphFunction& u) const;
  void half_phase_perturbation(const GraphFunction& v, GraphFunction& w) const;

  ModelParams mp_;
  double dt_;
  bool nonlinear_;
  std::unique_ptr<LinearStepper> linear_;
};

/// One time step of size dt assembled from Strang steps.
class SplittingStepper {
 public:
  SplittingStepper(const EdgeGrid& grid, const ModelParams& mp, double dt, LinearMethod method,
                   Splitting splitting, bool nonlinear = true);
  void step(GraphFunction& u) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  Splitting splitting_;
  StrangStepper outer_;
  std::unique_ptr<StrangStepper> inner_;
};

Trajectory evolve_nls(const GraphFunction& f0, const ModelParams& mp, const EvolveConfig& cfg);

struct WaveOperatorResult {
  GraphFunction u0;
  /// u0 - psi_plus, accumulated directly in perturbation form.
  GraphFunction correction;
  /// ||u(2T) - U(2T) psi_plus||_{H1} after re-evolving u0 forward.
  double matching_residual = 0.0;
};

/// Sets u(T) = U(T) psi_plus and integrates back to 0 on the undamped grid.
/// The forward check to 2T runs on psi_plus's own grid, so an absorbing layer
/// there removes outgoing waves without entering the backward solve.
WaveOperatorResult solve_wave_operator(const GraphFunction& psi_plus, double T,
                                       const ModelParams& mp, const EvolveConfig& cfg);

struct ScatteringReport {
  std::vector<double> times;
  /// ||u(t_{i+1}) - U(t_{i+1} - t_i) u(t_i)||, norm sqrt(M + ||.||^2_{H1_gamma}).
  std::vector<double> cauchy_residuals;
  std::vector<double> linfty_decay;
  std::vector<double> strichartz_accumulation;
  bool applicable = true;
  /// Sum of residuals over intervals starting at or after t0.
  double tail_sum(double t0) const;
};

/// The reference linear flow is the trajectory's own splitting with the
/// nonlinearity switched off, so a linear trajectory has zero residuals.
ScatteringReport scattering_diagnostic(const Trajectory& traj, const ModelParams& mp);

enum class GrowthKind { bounded, growing, blowup_suspected };
const char* to_string(GrowthKind g);

struct BlowupReport {
  std::vector<double> times;
  std::vector<double> h1_series;
  VirialSeries virial;
  /// First stored time after which V'' stays negative; NaN if never.
  double concavity_onset = std::numeric_limits<double>::quiet_NaN();
  /// Fraction of states with V'' <= 4 K + eps_R.
  double certificate_fraction = 0.0;
  double eps_r = 0.0;
  /// Root of the concave majorant of V from the last state; NaN if not concave.
  double t_star = std::numeric_limits<double>::quiet_NaN();
  double h1_growth = 0.0;
  GrowthKind kind = GrowthKind::bounded;
};

BlowupReport blowup_diagnostic(const Trajectory& traj, const ModelParams& mp, double R);

}  // namespace starnls
