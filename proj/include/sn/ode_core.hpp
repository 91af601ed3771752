/**
 * @file ode_core.hpp
 * @brief The universal radial system
 *
 *     u'' + (d-1)/r u' = (V - 1) u,     V'' + (d-1)/r V' = u^2,
 *
 * with u(0) = u0, u'(0) = V(0) = V'(0) = 0, its series startup off the
 * regular singular point r = 0, and an event-driven adaptive integrator.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

#include "sn/types.hpp"

namespace sn {

/** @brief Solver tolerances and horizons. */
struct SolverConfig {
  Dimension d{3.0};
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double r_start = 1e-3;
  double r_max = 100.0;
  double u_floor = 1e-8;
  double event_tol = 1e-12;
  int samples_per_decade = 200;
  long max_steps = 2'000'000;
  double h_min = 1e-14;

  /// Defaults for dimension d: r_max = 100 below d = 6, 1000 for the algebraic tails at d >= 6.
  [[nodiscard]] static SolverConfig defaults(Dimension d);

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

enum class EventKind : std::uint8_t { UZeroDescending, DuZeroAscending, RMaxReached, UDecayed };

[[nodiscard]] std::string_view to_string(EventKind kind);

/** @brief Small set of event kinds to watch. R_MAX_REACHED always terminates the run. */
class EventSet {
 public:
  constexpr EventSet() = default;
  constexpr EventSet(std::initializer_list<EventKind> kinds) {
    for (auto k : kinds) bits_ |= bit(k);
  }
  [[nodiscard]] constexpr bool contains(EventKind k) const { return (bits_ & bit(k)) != 0; }

  static constexpr EventSet all() {
    return {EventKind::UZeroDescending, EventKind::DuZeroAscending, EventKind::RMaxReached,
            EventKind::UDecayed};
  }

 private:
  static constexpr std::uint8_t bit(EventKind k) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(k)); }
  std::uint8_t bits_ = 0;
};

struct Event {
  EventKind kind = EventKind::RMaxReached;
  double r_event = 0.0;
  RadialState state;
};

/** @brief d/dr of (r, u, u', V, V'). */
struct Derivative {
  double dr = 1.0;
  double du = 0.0;
  double ddu = 0.0;
  double dV = 0.0;
  double ddV = 0.0;
};

/// Right-hand side of the universal system. Requires state.r > 0.
[[nodiscard]] Derivative rhs(const RadialState& state, Dimension d);

/// Fourth-order Taylor state at r0 for u(0) = u0. Requires u0 > 0 and r0 > 0.
[[nodiscard]] RadialState series_start(double u0, Dimension d, double r0);

struct IntegrationResult {
  Profile profile;
  Event event;
  long accepted_steps = 0;
  long rejected_steps = 0;
};

/**
 * @brief Advance @p start to the first watched event or to cfg.r_max.
 *
 * Samples lie on a geometric grid (cfg.samples_per_decade points per decade
 * starting at start.r) plus the start and the terminal point. U_DECAYED fires
 * when both u and |u'| have fallen below cfg.u_floor, so that a transversal
 * zero crossing is never mistaken for a decayed tail.
 *
 * Throws IntegrationStalled (with the partial profile) on step underflow,
 * step budget exhaustion, or a non-finite state.
 */
[[nodiscard]] IntegrationResult integrate(const RadialState& start, const SolverConfig& cfg, EventSet watch);

}  // namespace sn
