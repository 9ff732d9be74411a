#pragma once

#include <cstdint>
#include <vector>

#include "starnls/graph.hpp"

namespace starnls {

/// ||f||_{p+1}^{p+1} / (||f||_2^((p+3)/2) ||f||_{H1_gamma}^((p-1)/2)).
/// Throws std::domain_error on a zero denominator.
double gn_ratio(const GraphFunction& f, const ModelParams& mp);

struct DilationSample {
  double lambda = 0.0;
  double ratio = 0.0;
  /// N gamma |f(0)|^2 divided by ||f'||^2 for the dilated profile.
  double vertex_fraction = 0.0;
};

struct GNEstimate {
  double value = 0.0;
  double target = 0.0;  // sharp line constant
  GraphFunction witness{EdgeGrid(1.0, 16), 1};
  std::vector<double> escape_shifts;
  std::vector<double> escape_series;
  std::vector<DilationSample> dilation_series;
  double ascent_best = 0.0;
  /// Largest ratio met by any trial, including rejected line-search points.
  double max_trial_ratio = 0.0;
  /// int x |f|^2 / M of the witness.
  double witness_centroid = 0.0;
  std::uint64_t seed = 0;
  int restarts = 0;
};

struct GNOptions {
  int budget = 200;          // ascent iterations per restart
  int restarts = 4;
  std::uint64_t seed = 1;
  double h = 0.02;
};

/// Combines a Sobolev-gradient ascent from random smooth starts with the
/// shifted-soliton escape sequence and a dilation probe of the vertex term.
GNEstimate estimate_gn_constant(const ModelParams& mp, const GNOptions& opts = {});

/// Smooth cutoff vanishing on [0,1] and equal to 1 on [2, inf).
double escape_cutoff(double x);

/// psi(x) Q(x - n) on edge 1, zero elsewhere.
GraphFunction escape_profile(const EdgeGrid& grid, int n_edges, double p, double n);

/// First moment int x |f|^2 / M summed over edges.
double centroid(const GraphFunction& f);

}  // namespace starnls
