/**
 * @file functionals.hpp
 * @brief Particle number and energy of radial profiles with analytic tail
 *        estimates, a radial Poisson solver, and the sharp d = 6
 *        Hardy-Littlewood-Sobolev check at the optimizer (1 + |x|^2)^-2.
 */
#pragma once

#include <functional>
#include <span>

#include "sn/types.hpp"

namespace sn {

/// 2 pi^{d/2} / Gamma(d/2), valid for non-integer d.
[[nodiscard]] double surface_area(Dimension d);

struct QuadratureResult {
  double value = 0.0;
  double r_max_used = 0.0;
  /// Estimated contribution of (r_max_used, inf); +inf when the tail diverges.
  double tail_estimate = 0.0;
  double tolerance = 0.0;  // relative tolerance the convergence flag refers to
  bool converged = false;  // tail_estimate < tolerance * |value|
};

/**
 * @brief N = surface_area(d) * int u^2 r^{d-1} dr.
 *
 * Interior intervals use 5-point Gauss-Legendre on cubic Hermite
 * interpolants of the samples. The tail beyond the last sample is exponential
 * with the local decay rate for d < 6 and a power law with the log-log slope
 * over the last decade for d >= 6.
 */
[[nodiscard]] QuadratureResult particle_number(std::span<const RadialState> profile, Dimension d,
                                               double rel_tol = 1e-6);

/**
 * @brief E = (w/2) int u'^2 r^{d-1} dr - (gamma w/4) int (V - V_inf) u^2 r^{d-1} dr, w = surface_area(d).
 *
 * Throws UnsupportedGauge for d <= 2, where the potential has no decaying gauge.
 */
[[nodiscard]] QuadratureResult energy(std::span<const RadialState> profile, Dimension d, double gamma,
                                      double rel_tol = 1e-6);

using RadialFunction = std::function<double(double)>;

struct PoissonOptions {
  double s_min = -40.0;  // the solve runs over ln r in [s_min, s_max]
  double s_max = 40.0;
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
};

/**
 * @brief int_{R^d} V_f rho_g dx where Laplace V_f = rho_f and V_f -> 0 at infinity.
 *
 * Solves the radial Poisson equation as a quadrature system in s = ln r.
 * Requires d > 2. Throws NonConvergence if the solve stalls.
 */
[[nodiscard]] double poisson_pairing(const RadialFunction& rho_f, const RadialFunction& rho_g, Dimension d,
                                     const PoissonOptions& opts = {});

/// surface_area(d) * int f'(r)^2 r^{d-1} dr.
[[nodiscard]] double dirichlet_energy(const RadialFunction& df, Dimension d, const PoissonOptions& opts = {});

struct Fraction {
  long num = 0;
  long den = 1;
};

/// 4(d-1) / (d^2 (d-2)^2 (d-4)) in lowest terms; d must be an integer > 4.
[[nodiscard]] Fraction hls_constant_fraction(int d);
[[nodiscard]] double hls_constant(int d);

struct HlsOptions {
  /// Trial function and its radial derivative; defaults to (1 + r^2)^-2.
  RadialFunction f;
  RadialFunction df;
  /// The trial is evaluated as f(dilation r).
  double dilation = 1.0;
  PoissonOptions poisson;
};

struct HlsResult {
  double lhs = 0.0;  // int int |x-y|^-4 f^2(x) f^2(y) dx dy
  double rhs = 0.0;  // C_6 (int |grad f|^2)^2
  double ratio = 0.0;
  double c6 = 0.0;
  double gradient_norm_sq = 0.0;
};

/// Evaluates both sides of the d = 6 inequality through the radial Poisson solve.
[[nodiscard]] HlsResult hls_check(const HlsOptions& opts = {});

}  // namespace sn
