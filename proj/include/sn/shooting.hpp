/**
 * @file shooting.hpp
 * @brief Classification of initial values u0 into the negative set (u crosses
 *        zero while decreasing), the positive set (u' turns positive while u > 0)
 *        or ground-state candidates, and bisection to the unique ground state.
 */
#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sn/ode_core.hpp"

namespace sn {

enum class Verdict { Negative, Positive, Candidate };

[[nodiscard]] std::string_view to_string(Verdict v);

/// StopOnDecay ends a run as soon as U_DECAYED fires; ResolveToHorizon keeps
/// integrating to r_max so that late sign changes can still be seen.
enum class ClassifyMode { StopOnDecay, ResolveToHorizon };

struct Classification {
  Verdict verdict = Verdict::Candidate;
  double witness_r = 0.0;  // zero of u, turning point of u', or terminal radius of a candidate
  EventKind event = EventKind::RMaxReached;
  Profile profile;
};

/**
 * @brief Integrate from the series startup and map the terminating event to a verdict.
 *
 * A run that reaches r_max with u >= u_floor is undetermined and throws
 * UndeterminedHorizon; it is never reported as a candidate.
 */
[[nodiscard]] Classification classify(double u0, const SolverConfig& cfg,
                                      ClassifyMode mode = ClassifyMode::StopOnDecay);

struct Bracket {
  double lo = 0.0;  // verified negative
  double hi = 0.0;  // verified positive
};

/// lo = 0.5 and the first positive member of 2, 4, 8, ... (guarded at 2^60).
[[nodiscard]] Bracket bracket(const SolverConfig& cfg);

struct VInfinity {
  double value = 0.0;
  bool divergent = false;
};

/**
 * @brief Limit of the monotone potential from the last profile sample.
 *
 * Extrapolates V(R) with the local power law of V': V_inf = V(R) + R V'(R)/(-q-1),
 * q = R V''/V'. In an exponentially decaying tail q -> 1-d and this is
 * V(R) + R V'(R)/(d-2). When q >= -1 (always for d <= 2) the limit is infinite
 * and V(R) is returned with the divergence flag set.
 */
[[nodiscard]] VInfinity estimate_v_infinity(std::span<const RadialState> profile, Dimension d);

struct DecayEstimate {
  double kappa = 0.0;                // arithmetic mean of -u'/u over [R/10, R]
  double sqrt_vinf_minus_one = 0.0;  // independent prediction from the potential tail
  double v_infinity = 0.0;
  bool v_infinity_divergent = false;
  double window_lo = 0.0;
  double window_hi = 0.0;
  std::size_t window_samples = 0;
};

/// Throws DomainError if u <= 0 anywhere in the window.
[[nodiscard]] DecayEstimate decay_rate(std::span<const RadialState> profile, Dimension d);

struct ShootOptions {
  int max_iterations = 200;
  /// The reported profile stops where the bracketing solutions differ by more
  /// than this fraction of u and by more than ten bracket widths.
  double profile_rel_spread = 1e-6;
};

struct GroundStateResult {
  double u0_star = 0.0;
  Profile profile;
  double v_infinity = 0.0;
  bool v_infinity_divergent = false;
  double kappa = 0.0;
  double sqrt_vinf_minus_one = 0.0;
  int iterations = 0;
  double final_bracket_width = 0.0;
  Bracket final_bracket;
  /// Width of the band of initial values that no run could resolve into either set (0 if none).
  double candidate_band = 0.0;
  /// Width of the refined bracket whose two solutions sandwich the profile.
  double profile_bracket_width = 0.0;
  double u0_tol = 0.0;
};

/**
 * @brief Bisect on classification verdicts until the bracket is narrower than u0_tol.
 *
 * Midpoints that cannot be resolved into either set (candidates, or runs that
 * are still undetermined at r_max) are collected into a candidate band; the
 * search then continues on the sub-intervals between the band and each
 * certified end. Throws BracketFailure or NonConvergence.
 */
[[nodiscard]] GroundStateResult shoot(const SolverConfig& cfg, double u0_tol, const ShootOptions& opts = {});

struct WronskianSample {
  double r = 0.0;
  double w_rd1 = 0.0;  // (u2' u1 - u1' u2) r^{d-1}
  double u1 = 0.0;
  double u2 = 0.0;
};

/// Co-integrates both solutions on the shared output grid, truncated where either u becomes nonpositive.
[[nodiscard]] std::vector<WronskianSample> wronskian_monotonicity(double u0_1, double u0_2, const SolverConfig& cfg);

}  // namespace sn
