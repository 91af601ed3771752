/**
 * @file lane_emden.hpp
 * @brief The reduced equation u'' + (d-1)/r u' = -u^2, u(0) = 1, its Lyapunov
 *        function and Milne variables, and the u = 1 - V reduction of the full system.
 */
#pragma once

#include <optional>
#include <vector>

#include "sn/ode_core.hpp"

namespace sn {

struct LaneEmdenSample {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;
};

struct LaneEmdenProfile {
  Dimension d{3.0};
  std::vector<LaneEmdenSample> samples;
  /// Set when the run stopped at a zero of u; the zero is the last sample.
  std::optional<double> first_zero;
  double abs_tol = 0.0;  // absolute state tolerance the samples were computed at
};

/// Integrates from the series startup to the first zero of u or cfg.r_max.
[[nodiscard]] LaneEmdenProfile solve_lane_emden(Dimension d, const SolverConfig& cfg);

/// Embeds the reduced solution in the full system through V = 1 - u.
[[nodiscard]] Profile as_profile(const LaneEmdenProfile& profile);

/// (1 + r^2/24)^-2, the d = 6 solution.
[[nodiscard]] double exact_d6(double r);

struct LyapunovSample {
  double r = 0.0;
  double L = 0.0;
  /// Change in L caused by perturbing u and u' by ten times the state tolerance.
  double L_uncertainty = 0.0;
  /// |L' + (d-6)/6 u'^2 r^{d-1}| with L' from finite differences; empty where
  /// the stencil is not available.
  std::optional<double> dL_residual;
};

/// L = E r^d + (d/3) u u' r^{d-1} with E = u'^2/2 + u^3/3.
[[nodiscard]] double lyapunov_value(double r, double u, double du, Dimension d);

[[nodiscard]] std::vector<LyapunovSample> lyapunov(const LaneEmdenProfile& profile);

struct MilneSample {
  double r = 0.0;
  double y = 0.0;  // -r u'/u
  double z = 0.0;  // -r u^2/u'
  /// Residuals of y' = (y/r)(2-d+y+z) and z' = (z/r)(d-2y-z), each divided by
  /// max(1, |right-hand side|); empty where the stencil is not available.
  std::optional<double> y_residual;
  std::optional<double> z_residual;
};

struct MilneReport {
  std::vector<MilneSample> samples;
  double y_limit = 0.0;  // extrapolated value at r -> 0+
  double z_limit = 0.0;
  double max_y_residual = 0.0;
  double max_z_residual = 0.0;
};

/**
 * @brief Milne variables on [r_lo, r_hi], stopping before the first zero of u.
 *
 * The r -> 0+ limits are obtained by cubic extrapolation in r^2 from samples
 * near r_lo, 2 r_lo, 4 r_lo, 8 r_lo. Throws DomainError if u' >= 0 in range.
 */
[[nodiscard]] MilneReport milne(const LaneEmdenProfile& profile, double r_lo = 0.1, double r_hi = 10.0);

/**
 * @brief max |u + V - 1| along the full system, up to cfg.r_max or the first zero of u.
 *
 * u + V - 1 solves a linear homogeneous equation with zero data exactly when
 * u0 = 1, so the identity holds for u0 = 1 in every dimension and fails for
 * any other u0 (for instance the d < 6 ground states).
 */
[[nodiscard]] double reduction_check(Dimension d, const SolverConfig& cfg, double u0 = 1.0);

}  // namespace sn
