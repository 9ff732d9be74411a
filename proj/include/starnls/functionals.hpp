#pragma once

#include <array>
#include <vector>

#include "starnls/graph.hpp"

namespace starnls {

struct Trajectory;

struct FunctionalReport {
  double mass = 0.0;      // M
  double energy = 0.0;    // E_gamma
  double action = 0.0;    // S_{omega,gamma} = E + omega M / 2
  double virial_k = 0.0;  // K_gamma
  double l_gamma = 0.0;   // ||f'||^2 / 2 + (N gamma / 2)|f(0)|^2
  double h1gamma = 0.0;   // ||f'||^2 + N gamma |f(0)|^2
  double lp1 = 0.0;       // ||f||_{p+1}^{p+1}
};

/// Requires vertex continuity.
FunctionalReport evaluate_functionals(const GraphFunction& f, const ModelParams& mp);

// --- ground state ---

/// Q_omega(x) = [((p+1) omega / 2) sech^2((p-1) sqrt(omega) x / 2)]^(1/(p-1)).
double soliton_value(double p, double omega, double x);
double soliton_derivative(double p, double omega, double x);
LineFunction soliton_line(double p, double omega, const EdgeGrid& half_grid);

enum class DerivativeRule { analytic, finite_difference };

struct PohozaevResiduals {
  /// Relative gaps between ||Q||^2/(p+3), ||Q'||^2/(p-1), ||Q||_{p+1}^{p+1}/(2(p+1)).
  std::array<double, 3> identity_gaps{};
  double mass_energy_ratio = 0.0;
  /// |M/E - 2(p+3)/(p-5)| / (2(p+3)/(p-5)); zero when p <= 5.
  double ratio_gap = 0.0;
  double max_identity_gap() const;
};

PohozaevResiduals pohozaev_check(double p, double omega, const EdgeGrid& half_grid,
                                 DerivativeRule rule = DerivativeRule::analytic);

/// Sharp line constant 2(p+1) / ((p-1) (||Q||_2^(1-s) ||Q'||_2^s)^(p-1)), s = 1/2 - 2/(p-1),
/// from quadrature of Q_1. Valid for any p > 1.
double gn_line_constant(double p);

/// Line quantities of Q = Q_1 and the thresholds built from them.
struct ThresholdTable {
  double p = 0.0;
  double omega = 0.0;
  double s_c = 0.0;
  double m_line_q = 0.0;      // M(Q)
  double grad_line_q = 0.0;   // ||Q'||^2
  double lp1_line_q = 0.0;    // ||Q||_{p+1}^{p+1}
  double e_line_q = 0.0;      // E_0(Q), focusing
  double me_threshold = 0.0;  // M(Q)^((1-s_c)/s_c) E_0(Q)
  double k2_threshold = 0.0;  // ||Q||_2^(1-s_c) ||Q'||_2^(s_c)
  double n_omega = 0.0;       // omega^((p+3)/(2(p-1))) S_{1,0}(Q)
  double c_gn_line = 0.0;     // from k2_threshold^(p-1) = 2(p+1)/((p-1) C_GN)
  double c_gn_direct = 0.0;   // gn ratio of Q itself
  double sharp_relation_gap() const;
};

/// Throws std::invalid_argument when p <= 5.
ThresholdTable threshold_table(const ModelParams& mp);

/// omega solving M(Q_omega) = mass.
double tangent_frequency(double mass, const ThresholdTable& table);

// --- potential well ---

enum class WellSide { pw_plus, pw_minus, above_threshold };
const char* to_string(WellSide side);

struct DichotomyVerdict {
  WellSide side = WellSide::above_threshold;
  double me_product = 0.0;   // M^((1-s_c)/s_c) E_gamma
  double me_margin = 0.0;    // (threshold - product) / threshold, > 0 below
  double k2_product = 0.0;   // ||f||_2^(1-s_c) ||f||_{H1_gamma}^(s_c)
  double k2_margin = 0.0;    // (threshold - product) / threshold, > 0 on the plus side
  double virial_k = 0.0;
  /// Below threshold: sign(K) agrees with the gradient comparison. Always true above.
  bool consistent = true;
};

DichotomyVerdict classify_potential_well(const GraphFunction& f, const ModelParams& mp,
                                         const ThresholdTable& table);
DichotomyVerdict classify_potential_well(const GraphFunction& f, const ModelParams& mp);

// --- cutoff and virial ---

/// Radial cutoff: x^2 on [0,1], 0 beyond 3, and a C^5 bridge on [1,3] whose
/// second derivative is 2 - (2 + A) S or a mirror of it, S the septic smoothstep.
class Cutoff {
 public:
  Cutoff();
  /// Derivative of order 0..4 of the unscaled profile.
  double derivative(int order, double x) const;
  /// Derivative of order 0..4 of X_R(x) = R^2 X(x/R).
  double scaled(int order, double x, double R) const;
  /// Max of X'' over a fine sampling of [0, 3.5].
  double max_second_derivative(int samples = 200001) const;

  double bridge_a() const { return a_; }
  double bridge_b() const { return b_; }
  double bridge_depth() const { return depth_; }

 private:
  struct Segment {
    double start = 0.0;
    double length = 0.0;
    std::array<double, 10> poly{};  // X as a polynomial in t = (x - start) / length
  };
  void build(double a);

  double a_ = 0.0;
  double b_ = 0.5;
  double depth_ = 0.0;
  std::array<Segment, 4> segments_{};
};

const Cutoff& cutoff();

/// X_R and its derivatives on grid points; d1 and d2 also at cell midpoints.
struct SampledCutoff {
  double R = 0.0;
  std::vector<double> value, d2, d4;
  std::vector<double> d1_mid, d2_mid;
  double max_d2 = 0.0;
};

/// Throws std::logic_error if the certificate max X'' <= 2 + 1e-12 fails.
SampledCutoff cutoff_profile(double R, const EdgeGrid& grid);

struct VirialTerms {
  double v = 0.0;
  double dv = 0.0;
  double d2v = 0.0;
};

/// V, V' = 2 Im int X_R' conj(u) u_x, and the four-term V'' formula on one state.
VirialTerms virial_terms(const GraphFunction& u, const ModelParams& mp, const SampledCutoff& cut);

struct VirialSeries {
  double R = 0.0;
  std::vector<double> t, v, dv_formula, dv_diff, d2v_formula, d2v_diff;
  std::vector<double> dv_residual, d2v_residual;
};

/// Time derivatives by second-order three-point differencing on the stored times.
VirialSeries localized_virial(const Trajectory& traj, const ModelParams& mp, double R);

/// Second-order derivative of samples y(t) on a possibly nonuniform grid.
std::vector<double> time_derivative(const std::vector<double>& t, const std::vector<double>& y);

}  // namespace starnls
