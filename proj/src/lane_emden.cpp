#include "sn/lane_emden.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "sn/dopri5.hpp"
#include "sn/errors.hpp"
#include "sn/finite_difference.hpp"

namespace sn {

LaneEmdenProfile solve_lane_emden(Dimension d, const SolverConfig& cfg) {
  cfg.validate();
  const double dd = d.value();
  const double r0 = cfg.r_start;
  const ode::Vec<2> y0{1.0 - r0 * r0 / (2.0 * dd) + std::pow(r0, 4) / (4.0 * dd * (dd + 2.0)),
                       -r0 / dd + r0 * r0 * r0 / (dd * (dd + 2.0))};

  auto f = [damp0 = dd - 1.0](double r, const ode::Vec<2>& y, ode::Vec<2>& dy) {
    dy[0] = y[1];
    dy[1] = -y[0] * y[0] - damp0 / r * y[1];
  };
  const std::array<ode::EventSpec<2>, 1> events{{{[](double, const ode::Vec<2>& y) { return y[0]; }, -1}}};

  ode::StepControl ctl;
  ctl.abs_tol = cfg.abs_tol;
  ctl.rel_tol = cfg.rel_tol;
  ctl.h_min = cfg.h_min;
  ctl.max_steps = cfg.max_steps;
  const auto grid = ode::geometric_grid(r0, cfg.r_max, cfg.samples_per_decade);
  auto traj = ode::integrate<2>(f, r0, y0, cfg.r_max, grid, events, ctl, cfg.event_tol);

  LaneEmdenProfile out;
  out.d = d;
  out.abs_tol = cfg.abs_tol;
  out.samples.reserve(traj.samples.size());
  for (const auto& s : traj.samples) out.samples.push_back({s.t, s.y[0], s.y[1]});

  switch (traj.status) {
    case ode::IntegratorStatus::Event:
      out.first_zero = traj.last.t;
      break;
    case ode::IntegratorStatus::EndReached:
      break;
    default: {
      throw IntegrationStalled("solve_lane_emden: integration stalled at r = " + std::to_string(traj.last.t),
                               as_profile(out));
    }
  }
  return out;
}

Profile as_profile(const LaneEmdenProfile& profile) {
  Profile out;
  out.reserve(profile.samples.size());
  for (const auto& s : profile.samples) out.push_back({s.r, s.u, s.du, 1.0 - s.u, -s.du});
  return out;
}

double exact_d6(double r) {
  const double b = 1.0 + r * r / 24.0;
  return 1.0 / (b * b);
}

double lyapunov_value(double r, double u, double du, Dimension d) {
  const double dd = d.value();
  const double e = 0.5 * du * du + u * u * u / 3.0;
  const double rd1 = std::pow(r, dd - 1.0);
  return e * rd1 * r + dd / 3.0 * u * du * rd1;
}

std::vector<LyapunovSample> lyapunov(const LaneEmdenProfile& profile) {
  const auto& s = profile.samples;
  const double dd = profile.d.value();
  std::vector<double> r(s.size()), L(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    r[i] = s[i].r;
    L[i] = lyapunov_value(s[i].r, s[i].u, s[i].du, profile.d);
  }
  std::vector<LyapunovSample> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    out[i].r = r[i];
    out[i].L = L[i];
    const double rd1 = std::pow(r[i], dd - 1.0);
    const double dL_du = s[i].u * s[i].u * rd1 * r[i] + dd / 3.0 * s[i].du * rd1;
    const double dL_ddu = s[i].du * rd1 * r[i] + dd / 3.0 * s[i].u * rd1;
    out[i].L_uncertainty = 10.0 * profile.abs_tol * (std::abs(dL_du) + std::abs(dL_ddu));
    if (auto h = fd::log_step(r, i)) {
      const double dL = fd::d_ds(L, i, *h) / r[i];
      const double expected = -(dd - 6.0) / 6.0 * s[i].du * s[i].du * std::pow(r[i], dd - 1.0);
      out[i].dL_residual = std::abs(dL - expected);
    }
  }
  return out;
}

namespace {

// Neville evaluation at x = 0 of the polynomial through (x[k], f[k]).
double extrapolate_to_zero(std::vector<double> x, std::vector<double> f) {
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      f[i] = (x[i + m] * f[i] - x[i] * f[i + 1]) / (x[i + m] - x[i]);
    }
  }
  return f[0];
}

}  // namespace

MilneReport milne(const LaneEmdenProfile& profile, double r_lo, double r_hi) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw DomainError("milne: need 0 < r_lo < r_hi");
  const double dd = profile.d.value();
  const auto& s = profile.samples;

  // Every sample strictly before the first zero, so the stencil is defined up to r_hi.
  std::vector<double> r, y, z, inv_y;
  for (const auto& p : s) {
    if (!(p.u > 0.0)) break;
    if (!(p.du < 0.0)) throw DomainError("milne: u' must be negative; z is undefined at r = " + std::to_string(p.r));
    r.push_back(p.r);
    y.push_back(-p.r * p.du / p.u);
    z.push_back(-p.r * p.u * p.u / p.du);
    inv_y.push_back(-p.u / (p.r * p.du));
  }

  MilneReport rep;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < r_lo || r[i] > r_hi) continue;
    MilneSample m{r[i], y[i], z[i], std::nullopt, std::nullopt};
    if (auto h = fd::log_step(r, i)) {
      const double fy = y[i] * (2.0 - dd + y[i] + z[i]);
      const double fz = z[i] * (dd - 2.0 * y[i] - z[i]);
      // y has a pole at the zero of u while 1/y stays smooth, so y' is taken as -y^2 (1/y)'.
      const double dy = -y[i] * y[i] * fd::d_ds(inv_y, i, *h);
      m.y_residual = std::abs(dy - fy) / std::max(1.0, std::abs(fy));
      m.z_residual = std::abs(fd::d_ds(z, i, *h) - fz) / std::max(1.0, std::abs(fz));
      rep.max_y_residual = std::max(rep.max_y_residual, *m.y_residual);
      rep.max_z_residual = std::max(rep.max_z_residual, *m.z_residual);
    }
    rep.samples.push_back(m);
  }
  if (rep.samples.empty()) throw DomainError("milne: no samples in the requested range");

  std::vector<double> x, fy, fz;
  for (double target : {r_lo, 2.0 * r_lo, 4.0 * r_lo, 8.0 * r_lo}) {
    auto it = std::lower_bound(r.begin(), r.end(), target);
    if (it == r.end()) break;
    const auto i = static_cast<std::size_t>(it - r.begin());
    x.push_back(r[i] * r[i]);
    fy.push_back(y[i]);
    fz.push_back(z[i]);
  }
  if (x.size() < 2) throw DomainError("milne: profile too short to extrapolate to r = 0");
  rep.y_limit = extrapolate_to_zero(x, fy);
  rep.z_limit = extrapolate_to_zero(x, fz);
  return rep;
}

double reduction_check(Dimension d, const SolverConfig& cfg, double u0) {
  Profile p;
  try {
    p = integrate(series_start(u0, d, cfg.r_start), cfg, {EventKind::UZeroDescending}).profile;
  } catch (const IntegrationStalled& e) {
    p = e.partial_profile();
  }
  double worst = 0.0;
  for (const auto& s : p) worst = std::max(worst, std::abs(s.u + s.V - 1.0));
  return worst;
}

}  // namespace sn
