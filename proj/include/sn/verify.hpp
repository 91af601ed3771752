/**
 * @file verify.hpp
 * @brief Named check suites behind `sn verify`. Every assertion records the
 *        measured quantity, its bound and the comparison used.
 */
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sn/ode_core.hpp"

namespace sn {

struct Assertion {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", "<", ">=" or ">"
  bool passed = false;
};

struct VerifyReport {
  std::string check;
  std::vector<Assertion> assertions;
  [[nodiscard]] bool passed() const;
};

/// Solver settings each suite is calibrated for: r_max = 10 and tolerances of
/// 1e-12 for lyapunov and milne, 1e-14/1e-12 (abs/rel) for autonomous, r_max = 100
/// for reduction, the usual defaults otherwise.
[[nodiscard]] SolverConfig verify_defaults(std::string_view check, Dimension d);

/// Ground state and Lane-Emden solution at d = 6 against (1 + r^2/24)^-2.
[[nodiscard]] VerifyReport verify_d6(const SolverConfig& cfg);

/// Sharp constant, ratio at the optimizer, dilation invariance and a perturbed trial.
[[nodiscard]] VerifyReport verify_hls();

/// Monotonicity of L with the sign of 6 - d and the derivative identity on [0.1, 10].
[[nodiscard]] VerifyReport verify_lyapunov(const SolverConfig& cfg);

/// w r^{d-1} strictly increasing and u2 > u1 while both are positive.
[[nodiscard]] VerifyReport verify_wronskian(const SolverConfig& cfg, double u0_1, double u0_2);

/// Limits y -> 0, z -> d at the origin and the Milne equations on [0.1, 10].
[[nodiscard]] VerifyReport verify_milne(const SolverConfig& cfg);

/// max |u + V - 1| at u0 = 1 up to cfg.r_max.
[[nodiscard]] VerifyReport verify_reduction(const SolverConfig& cfg);

/// Log-variable round trip, zero energy along the d = 6 orbit and the soliton centre.
[[nodiscard]] VerifyReport verify_autonomous(const SolverConfig& cfg);

}  // namespace sn
