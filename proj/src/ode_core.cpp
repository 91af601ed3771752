#include "sn/ode_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sn/dopri5.hpp"
#include "sn/errors.hpp"

namespace sn {

SolverConfig SolverConfig::defaults(Dimension d) {
  SolverConfig cfg;
  cfg.d = d;
  cfg.r_max = d.value() < 6.0 ? 100.0 : 1000.0;
  return cfg;
}

void SolverConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw DomainError("abs_tol and rel_tol must be positive");
  if (!(r_start > 0.0) || r_start > 0.1) throw DomainError("r_start must lie in (0, 0.1]");
  if (!(r_max > r_start) || !std::isfinite(r_max)) throw DomainError("r_max must exceed r_start");
  if (!(u_floor > 0.0)) throw DomainError("u_floor must be positive");
  if (!(event_tol > 0.0)) throw DomainError("event_tol must be positive");
  if (samples_per_decade <= 0) throw DomainError("samples_per_decade must be positive");
  if (max_steps <= 0) throw DomainError("max_steps must be positive");
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::UZeroDescending:
      return "U_ZERO_DESCENDING";
    case EventKind::DuZeroAscending:
      return "DU_ZERO_ASCENDING";
    case EventKind::RMaxReached:
      return "R_MAX_REACHED";
    case EventKind::UDecayed:
      return "U_DECAYED";
  }
  return "UNKNOWN";
}

Derivative rhs(const RadialState& s, Dimension d) {
  if (!(s.r > 0.0)) throw DomainError("rhs: the (d-1)/r term is singular at r <= 0");
  const double damp = (d.value() - 1.0) / s.r;
  return {1.0, s.du, (s.V - 1.0) * s.u - damp * s.du, s.dV, s.u * s.u - damp * s.dV};
}

RadialState series_start(double u0, Dimension d, double r0) {
  if (!(u0 > 0.0)) throw DomainError("series_start: u0 must be positive");
  if (!(r0 > 0.0)) throw DomainError("series_start: r0 must be positive");
  const double dd = d.value();
  const double r2 = r0 * r0;
  const double q = u0 * (u0 * u0 + 1.0) / (dd * (dd + 2.0));
  const double w = u0 * u0;
  RadialState s;
  s.r = r0;
  s.u = u0 - u0 / (2.0 * dd) * r2 + q / 8.0 * r2 * r2;
  s.du = -(u0 / dd) * r0 + q / 2.0 * r2 * r0;
  s.V = w / (2.0 * dd) * r2 - w / (4.0 * dd * (dd + 2.0)) * r2 * r2;
  s.dV = w / dd * r0 - w / (dd * (dd + 2.0)) * r2 * r0;
  return s;
}

namespace {

using State4 = ode::Vec<4>;

RadialState to_state(double r, const State4& y) { return {r, y[0], y[1], y[2], y[3]}; }

}  // namespace

IntegrationResult integrate(const RadialState& start, const SolverConfig& cfg, EventSet watch) {
  cfg.validate();
  if (!(start.r > 0.0)) throw DomainError("integrate: start radius must be positive");
  if (start.r >= cfg.r_max) throw DomainError("integrate: start radius must be below r_max");

  const double damp0 = cfg.d.value() - 1.0;
  auto f = [damp0](double r, const State4& y, State4& dy) {
    const double damp = damp0 / r;
    dy[0] = y[1];
    dy[1] = (y[2] - 1.0) * y[0] - damp * y[1];
    dy[2] = y[3];
    dy[3] = y[0] * y[0] - damp * y[3];
  };

  // Order matters: ties go to the earlier entry.
  std::vector<ode::EventSpec<4>> specs;
  std::vector<EventKind> kinds;
  if (watch.contains(EventKind::UZeroDescending)) {
    specs.push_back({[](double, const State4& y) { return y[0]; }, -1});
    kinds.push_back(EventKind::UZeroDescending);
  }
  if (watch.contains(EventKind::DuZeroAscending)) {
    specs.push_back({[](double, const State4& y) { return y[1]; }, +1});
    kinds.push_back(EventKind::DuZeroAscending);
  }
  if (watch.contains(EventKind::UDecayed)) {
    const double floor = cfg.u_floor;
    specs.push_back({[floor](double, const State4& y) { return std::max(y[0], std::abs(y[1])) - floor; }, -1});
    kinds.push_back(EventKind::UDecayed);
  }

  ode::StepControl ctl;
  ctl.abs_tol = cfg.abs_tol;
  ctl.rel_tol = cfg.rel_tol;
  ctl.h_min = cfg.h_min;
  ctl.max_steps = cfg.max_steps;

  const auto grid = ode::geometric_grid(start.r, cfg.r_max, cfg.samples_per_decade);
  const State4 y0{start.u, start.du, start.V, start.dV};
  auto traj = ode::integrate<4>(f, start.r, y0, cfg.r_max, grid, specs, ctl, cfg.event_tol);

  IntegrationResult out;
  out.profile.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.profile.push_back(to_state(s.t, s.y));
  out.accepted_steps = traj.accepted_steps;
  out.rejected_steps = traj.rejected_steps;

  switch (traj.status) {
    case ode::IntegratorStatus::Event:
      out.event = {kinds[static_cast<std::size_t>(traj.event_index)], traj.last.t, to_state(traj.last.t, traj.last.y)};
      return out;
    case ode::IntegratorStatus::EndReached:
      out.event = {EventKind::RMaxReached, traj.last.t, to_state(traj.last.t, traj.last.y)};
      return out;
    case ode::IntegratorStatus::StepUnderflow:
      throw IntegrationStalled("integration stalled: step size underflow at r = " + std::to_string(traj.last.t),
                               std::move(out.profile));
    case ode::IntegratorStatus::MaxSteps:
      throw IntegrationStalled("integration stalled: step budget exhausted at r = " + std::to_string(traj.last.t),
                               std::move(out.profile));
    case ode::IntegratorStatus::NonFinite:
      throw IntegrationStalled("integration stalled: non-finite state near r = " + std::to_string(traj.last.t),
                               std::move(out.profile));
  }
  return out;
}

}  // namespace sn
