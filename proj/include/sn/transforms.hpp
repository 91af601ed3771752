/**
 * @file transforms.hpp
 * @brief Rescaling between the universal system and the physical bound-state
 *        system, and the log variables s = ln r, phi = r^2 u, W = r^2 (V - 1)
 *        in which the equations become autonomous.
 */
#pragma once

#include <span>
#include <vector>

#include "sn/types.hpp"

namespace sn {

struct PhysicalScaling {
  double omega = 0.0;
  double gamma = 1.0;
  double sigma = 1.0;
  double A = 1.0;  // sqrt(gamma) / sigma^2
  double B = 1.0;  // gamma / sigma^2
  /// Frequency of the gauge in which v vanishes at infinity, sigma^2 (1 - V_inf).
  double omega_decay = 0.0;
};

/// Both equations hold for any omega; this picks v(0) = 0, so omega = sigma^2.
[[nodiscard]] PhysicalScaling make_scaling(double gamma, double sigma, double v_infinity = 1.0);

struct PhysicalSample {
  double r = 0.0;
  double u = 0.0;
  double du = 0.0;
  double v = 0.0;
  double dv = 0.0;
};

struct PhysicalProfile {
  PhysicalScaling scaling;
  std::vector<PhysicalSample> samples;
};

/// u_w(r) = u(sigma r)/A, v_w(r) = (V(sigma r) - 1)/B + omega/gamma. Throws DomainError unless gamma, sigma > 0.
[[nodiscard]] PhysicalProfile to_physical(std::span<const RadialState> universal, double gamma, double sigma,
                                          double v_infinity = 1.0);

[[nodiscard]] Profile to_universal(const PhysicalProfile& physical);

struct ResidualSummary {
  double max_u = 0.0;  // residual of the wave equation
  double max_v = 0.0;  // residual of the Poisson equation
  std::size_t points = 0;
};

/**
 * @brief Finite-difference residuals of
 *        u'' + (d-1)/r u' = (gamma v - omega) u and v'' + (d-1)/r v' = u^2,
 *        each divided by max(1, |right-hand side|).
 */
[[nodiscard]] ResidualSummary physical_residuals(const PhysicalProfile& profile, Dimension d);

struct LogState {
  double s = 0.0;
  double phi = 0.0;
  double W = 0.0;
  double dphi = 0.0;
  double dW = 0.0;
};

[[nodiscard]] LogState to_log_state(const RadialState& state);
[[nodiscard]] RadialState from_log_state(const LogState& state);

/// Requires r > 0 at every sample.
[[nodiscard]] std::vector<LogState> to_log_variables(std::span<const RadialState> profile);
[[nodiscard]] Profile from_log_variables(std::span<const LogState> states);

/// 2E = phi'^2 - 2(d-4) phi^2 + W'^2/2 - (d-4) W^2 - W phi^2.
[[nodiscard]] double autonomous_energy(const LogState& state, Dimension d);

/// phi'^2 - 4 phi^2 + (2/3) phi^3, which vanishes on the d = 6 soliton.
[[nodiscard]] double zero_energy_residual(const LogState& state);

/// 6 / cosh^2(s - s0).
[[nodiscard]] double soliton_d6(double s, double s0);

struct AutonomousResiduals {
  double max_phi = 0.0;          // phi'' + (d-6) phi' - 2(d-4) phi - W phi
  double max_W = 0.0;            // W'' + (d-6) W' - 2(d-4) W - phi^2
  double max_energy_rate = 0.0;  // E' + (d-6)(phi'^2 + W'^2/2)
  std::size_t points = 0;
};

/// Finite differences on the uniform s-grid, each residual divided by max(1, sum of |terms|).
[[nodiscard]] AutonomousResiduals autonomous_residuals(std::span<const LogState> states, Dimension d);

/// Locates the maximum of phi from the sign change of phi', interpolating phi'
/// with cubic Hermite data (phi'' from the autonomous equation). Throws DomainError if phi' never changes sign.
[[nodiscard]] double fit_soliton_s0(std::span<const LogState> states, Dimension d);

}  // namespace sn
