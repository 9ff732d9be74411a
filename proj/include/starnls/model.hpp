#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

namespace starnls {

using cplx = std::complex<double>;

/// Non-fatal warnings collected while a solver or diagnostic runs.
struct Flags {
  std::vector<std::string> messages;
  void raise(std::string message) { messages.push_back(std::move(message)); }
  bool empty() const { return messages.empty(); }
};

inline void raise_flag(Flags* flags, std::string message) {
  if (flags) flags->raise(std::move(message));
}

/// Exponents of the non-admissible Strichartz pair used by the scattering norm.
struct StrichartzExponents {
  double a = 0.0;
  double r = 0.0;
  double b = 0.0;
};

/// Parameters of the star-graph NLS: N edges, vertex strength gamma >= 0,
/// power p > 1, focusing sign mu (-1 focusing, +1 defocusing), frequency omega.
class ModelParams {
 public:
  ModelParams(int n_edges, double gamma, double p, int mu, double omega = 1.0);

  int n_edges() const { return n_edges_; }
  double gamma() const { return gamma_; }
  double p() const { return p_; }
  int mu() const { return mu_; }
  double omega() const { return omega_; }

  /// Critical Sobolev index 1/2 - 2/(p-1).
  double s_c() const { return 0.5 - 2.0 / (p_ - 1.0); }
  StrichartzExponents strichartz() const;

  ModelParams with_gamma(double gamma) const;
  ModelParams with_p(double p) const;
  ModelParams with_mu(int mu) const;
  ModelParams with_omega(double omega) const;

 private:
  int n_edges_;
  double gamma_;
  double p_;
  int mu_;
  double omega_;
};

}  // namespace starnls
