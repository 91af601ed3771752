#include "sn/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sn/functionals.hpp"
#include "sn/lane_emden.hpp"
#include "sn/shooting.hpp"
#include "sn/transforms.hpp"

namespace sn {

bool VerifyReport::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

namespace {

Assertion at_most(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, "<=", measured <= bound};
}

Assertion below(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, "<", measured < bound};
}

Assertion at_least(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, ">=", measured >= bound};
}

Assertion above(std::string name, double measured, double bound) {
  return {std::move(name), measured, bound, ">", measured > bound};
}

}  // namespace

SolverConfig verify_defaults(std::string_view check, Dimension d) {
  SolverConfig cfg = SolverConfig::defaults(d);
  if (check == "lyapunov" || check == "milne") {
    cfg.r_max = 10.0;
    cfg.abs_tol = cfg.rel_tol = 1e-12;
    cfg.samples_per_decade = 400;
  } else if (check == "autonomous") {
    cfg.abs_tol = 1e-14;
    cfg.rel_tol = 1e-12;
  } else if (check == "reduction") {
    cfg.r_max = 100.0;
  }
  return cfg;
}

VerifyReport verify_d6(const SolverConfig& base) {
  VerifyReport rep{"d6", {}};
  SolverConfig cfg = base;
  cfg.d = Dimension(6.0);

  const auto gs = shoot(cfg, 1e-8);
  rep.assertions.push_back(at_most("|u0_star - 1|", std::abs(gs.u0_star - 1.0), 1e-6));
  double err = 0.0;
  for (const auto& s : gs.profile) {
    if (s.r <= 50.0) err = std::max(err, std::abs(s.u - exact_d6(s.r)));
  }
  rep.assertions.push_back(at_least("last radius of the ground state profile", gs.profile.back().r, 50.0));
  rep.assertions.push_back(at_most("sup |u - (1+r^2/24)^-2| on [0, 50], ground state", err, 1e-6));

  SolverConfig le = cfg;
  le.r_max = 50.0;
  const auto p = solve_lane_emden(Dimension(6.0), le);
  double le_err = 0.0;
  for (const auto& s : p.samples) le_err = std::max(le_err, std::abs(s.u - exact_d6(s.r)));
  rep.assertions.push_back(at_most("sup |u - (1+r^2/24)^-2| on [0, 50], Lane-Emden", le_err, 10.0 * le.abs_tol));
  return rep;
}

VerifyReport verify_hls() {
  VerifyReport rep{"hls", {}};
  const auto c = hls_constant_fraction(6);
  rep.assertions.push_back(at_most("|C_6 - 5/288| (exact fraction)", std::abs(double(c.num * 288 - c.den * 5)), 0.0));

  const auto base = hls_check();
  rep.assertions.push_back(at_most("|LHS/RHS - 1| at (1+|x|^2)^-2", std::abs(base.ratio - 1.0), 1e-3));
  for (double lam : {0.5, 2.0}) {
    HlsOptions o;
    o.dilation = lam;
    rep.assertions.push_back(at_most("|ratio(f(" + std::string(lam == 0.5 ? "0.5" : "2") + "x)) - ratio(f)|",
                                     std::abs(hls_check(o).ratio - base.ratio), 1e-6));
  }
  HlsOptions o;
  o.f = [](double r) { return std::pow(1.0 + r * r, -2.0) * (1.0 + 0.1 * std::exp(-r * r)); };
  o.df = [](double r) {
    const double a = std::pow(1.0 + r * r, -2.0);
    const double da = -4.0 * r * std::pow(1.0 + r * r, -3.0);
    const double e = std::exp(-r * r);
    return da * (1.0 + 0.1 * e) - 0.2 * r * e * a;
  };
  rep.assertions.push_back(below("ratio for (1+|x|^2)^-2 (1 + 0.1 exp(-|x|^2))", hls_check(o).ratio, 1.0));
  return rep;
}

VerifyReport verify_lyapunov(const SolverConfig& cfg) {
  VerifyReport rep{"lyapunov", {}};
  const double dd = cfg.d.value();
  const auto p = solve_lane_emden(cfg.d, cfg);
  const auto L = lyapunov(p);

  // Positive values are steps against the expected direction beyond the propagated uncertainty.
  const double sign = dd > 6.0 ? 1.0 : (dd < 6.0 ? -1.0 : 1.0);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_res = 0.0;
  double max_abs = 0.0;
  for (std::size_t i = 1; i < L.size(); ++i) {
    const double step = sign * (L[i].L - L[i - 1].L) - (L[i].L_uncertainty + L[i - 1].L_uncertainty);
    worst = std::max(worst, step);
    if (L[i].r >= 0.1 && L[i].r <= 10.0 && L[i].dL_residual) worst_res = std::max(worst_res, *L[i].dL_residual);
    max_abs = std::max(max_abs, std::abs(L[i].L));
  }
  const char* dir = dd >= 6.0 ? "L nonincreasing (worst step beyond uncertainty)" : "L nondecreasing (worst step beyond uncertainty)";
  rep.assertions.push_back(at_most(dir, worst, 0.0));
  if (dd == 6.0) rep.assertions.push_back(at_most("max |L| at d = 6", max_abs, 1e-6));
  rep.assertions.push_back(at_most("max |L' + (d-6)/6 u'^2 r^{d-1}| on [0.1, 10]", worst_res, 1e-5));
  return rep;
}

VerifyReport verify_wronskian(const SolverConfig& cfg, double u0_1, double u0_2) {
  VerifyReport rep{"wronskian", {}};
  const auto w = wronskian_monotonicity(u0_1, u0_2, cfg);
  double min_inc = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i > 0) min_inc = std::min(min_inc, w[i].w_rd1 - w[i - 1].w_rd1);
    min_gap = std::min(min_gap, w[i].u2 - w[i].u1);
  }
  rep.assertions.push_back(above("min increment of w r^{d-1}", min_inc, 0.0));
  rep.assertions.push_back(above("min (u2 - u1) while both positive", min_gap, 0.0));
  return rep;
}

VerifyReport verify_milne(const SolverConfig& cfg) {
  VerifyReport rep{"milne", {}};
  const auto p = solve_lane_emden(cfg.d, cfg);
  const auto m = milne(p);
  rep.assertions.push_back(at_most("|y(0+)|", std::abs(m.y_limit), 1e-3));
  rep.assertions.push_back(at_most("|z(0+) - d|", std::abs(m.z_limit - cfg.d.value()), 1e-3));
  rep.assertions.push_back(at_most("max residual of y' = (y/r)(2-d+y+z)", m.max_y_residual, 1e-6));
  rep.assertions.push_back(at_most("max residual of z' = (z/r)(d-2y-z)", m.max_z_residual, 1e-6));
  return rep;
}

VerifyReport verify_reduction(const SolverConfig& cfg) {
  VerifyReport rep{"reduction", {}};
  rep.assertions.push_back(at_most("max |u + V - 1| at u0 = 1", reduction_check(cfg.d, cfg), 1e-8));
  return rep;
}

VerifyReport verify_autonomous(const SolverConfig& base) {
  VerifyReport rep{"autonomous", {}};
  SolverConfig cfg = base;
  cfg.d = Dimension(6.0);
  const auto p = integrate(series_start(1.0, cfg.d, cfg.r_start), cfg, {}).profile;
  const auto ls = to_log_variables(p);
  const auto back = from_log_variables(ls);

  double rt = 0.0, e = 0.0, z = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    rt = std::max({rt, std::abs(back[i].r - p[i].r) / p[i].r, std::abs(back[i].u - p[i].u),
                   std::abs(back[i].du - p[i].du), std::abs(back[i].V - p[i].V), std::abs(back[i].dV - p[i].dV)});
    e = std::max(e, std::abs(autonomous_energy(ls[i], cfg.d)));
    z = std::max(z, std::abs(zero_energy_residual(ls[i])));
  }
  rep.assertions.push_back(at_most("log-variable round trip", rt, 1e-8));
  rep.assertions.push_back(at_most("max |E| along the d = 6 orbit", e, 1e-6));
  rep.assertions.push_back(at_most("max |phi'^2 - 4 phi^2 + (2/3) phi^3|", z, 1e-6));
  const auto res = autonomous_residuals(ls, cfg.d);
  rep.assertions.push_back(at_most("autonomous equation residual", std::max(res.max_phi, res.max_W), 1e-5));
  const double s0 = fit_soliton_s0(ls, cfg.d);
  rep.assertions.push_back(at_most("|e^{2 s0} - 24|", std::abs(std::exp(2.0 * s0) - 24.0), 1e-4));
  return rep;
}

}  // namespace sn
