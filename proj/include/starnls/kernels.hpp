#pragma once

// Data-parallel inner loops. Every kernel exists twice: an OpenMP version used
// by the library and a plain serial reference kept for tests and benchmarks.
//
// The parallel reductions sum fixed-size blocks and then combine the block
// partials in index order, so results do not depend on the thread count.

#include <span>

#include "starnls/model.hpp"

namespace starnls::kernels {

/// |z|^e computed from |z|^2, with a multiplication path for integer e/2.
double abs_pow(double abs_sq, double e);

namespace serial {

/// Trapezoid sum h * sum_i w_i |f_i|^q, w = 1/2 at both ends.
double trapezoid_power(std::span<const cplx> f, double q, double h);
/// sum_i |f_{i+1} - f_i|^2.
double diff_sq(std::span<const cplx> f);
/// Trapezoid sum h * sum_i w_i f_i conj(g_i).
cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h);
double max_abs(std::span<const cplx> f);
/// u_i <- u_i exp(-i c |u_i|^e), the exact flow of i u_t = c |u|^e u over unit time.
void phase_rotate(std::span<cplx> u, double c, double e);
/// Same phase flow for u = v + w, updating only w:
/// w <- w e^{i theta} + v (e^{i theta} - 1), theta = -c |v + w|^e.
void phase_rotate_perturbation(std::span<const cplx> v, std::span<cplx> w, double c, double e);

}  // namespace serial

namespace parallel {

double trapezoid_power(std::span<const cplx> f, double q, double h);
double diff_sq(std::span<const cplx> f);
cplx trapezoid_inner(std::span<const cplx> f, std::span<const cplx> g, double h);
double max_abs(std::span<const cplx> f);
void phase_rotate(std::span<cplx> u, double c, double e);
void phase_rotate_perturbation(std::span<const cplx> v, std::span<cplx> w, double c, double e);

}  // namespace parallel

}  // namespace starnls::kernels
