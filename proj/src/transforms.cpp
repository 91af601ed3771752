#include "sn/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "sn/finite_difference.hpp"

namespace sn {

PhysicalScaling make_scaling(double gamma, double sigma, double v_infinity) {
  if (!(gamma > 0.0) || !(sigma > 0.0)) throw DomainError("make_scaling: gamma and sigma must be positive");
  PhysicalScaling sc;
  sc.gamma = gamma;
  sc.sigma = sigma;
  const double s2 = sigma * sigma;
  sc.A = std::sqrt(gamma) / s2;
  sc.B = gamma / s2;
  sc.omega = s2;
  sc.omega_decay = s2 * (1.0 - v_infinity);
  return sc;
}

PhysicalProfile to_physical(std::span<const RadialState> universal, double gamma, double sigma, double v_infinity) {
  PhysicalProfile out;
  out.scaling = make_scaling(gamma, sigma, v_infinity);
  const auto& sc = out.scaling;
  out.samples.reserve(universal.size());
  for (const auto& s : universal) {
    out.samples.push_back({s.r / sigma, s.u / sc.A, sigma * s.du / sc.A, (s.V - 1.0) / sc.B + sc.omega / sc.gamma,
                           sigma * s.dV / sc.B});
  }
  return out;
}

Profile to_universal(const PhysicalProfile& physical) {
  const auto& sc = physical.scaling;
  Profile out;
  out.reserve(physical.samples.size());
  for (const auto& p : physical.samples) {
    out.push_back({p.r * sc.sigma, p.u * sc.A, p.du * sc.A / sc.sigma, sc.B * (p.v - sc.omega / sc.gamma) + 1.0,
                   p.dv * sc.B / sc.sigma});
  }
  return out;
}

ResidualSummary physical_residuals(const PhysicalProfile& profile, Dimension d) {
  const auto& p = profile.samples;
  const auto& sc = profile.scaling;
  const double dm1 = d.value() - 1.0;
  std::vector<double> r(p.size()), du(p.size()), dv(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i] = p[i].r;
    du[i] = p[i].du;
    dv[i] = p[i].dv;
  }
  ResidualSummary out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto h = fd::log_step(r, i);
    if (!h) continue;
    const double ddu = fd::d_ds(du, i, *h) / r[i];
    const double ddv = fd::d_ds(dv, i, *h) / r[i];
    const double fu = (sc.gamma * p[i].v - sc.omega) * p[i].u;
    const double fv = p[i].u * p[i].u;
    out.max_u = std::max(out.max_u, std::abs(ddu + dm1 / r[i] * du[i] - fu) / std::max(1.0, std::abs(fu)));
    out.max_v = std::max(out.max_v, std::abs(ddv + dm1 / r[i] * dv[i] - fv) / std::max(1.0, std::abs(fv)));
    ++out.points;
  }
  return out;
}

LogState to_log_state(const RadialState& st) {
  if (!(st.r > 0.0)) throw DomainError("to_log_state: r must be positive");
  const double r2 = st.r * st.r;
  return {std::log(st.r), r2 * st.u, r2 * (st.V - 1.0), r2 * (2.0 * st.u + st.r * st.du),
          r2 * (2.0 * (st.V - 1.0) + st.r * st.dV)};
}

RadialState from_log_state(const LogState& ls) {
  const double r = std::exp(ls.s);
  const double r2 = r * r;
  const double r3 = r2 * r;
  return {r, ls.phi / r2, (ls.dphi - 2.0 * ls.phi) / r3, 1.0 + ls.W / r2, (ls.dW - 2.0 * ls.W) / r3};
}

std::vector<LogState> to_log_variables(std::span<const RadialState> profile) {
  std::vector<LogState> out;
  out.reserve(profile.size());
  for (const auto& s : profile) out.push_back(to_log_state(s));
  return out;
}

Profile from_log_variables(std::span<const LogState> states) {
  Profile out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(from_log_state(s));
  return out;
}

double autonomous_energy(const LogState& st, Dimension d) {
  const double k = d.value() - 4.0;
  return 0.5 * (st.dphi * st.dphi - 2.0 * k * st.phi * st.phi + 0.5 * st.dW * st.dW - k * st.W * st.W -
                st.W * st.phi * st.phi);
}

double zero_energy_residual(const LogState& st) {
  return st.dphi * st.dphi - 4.0 * st.phi * st.phi + 2.0 / 3.0 * st.phi * st.phi * st.phi;
}

double soliton_d6(double s, double s0) {
  const double c = std::cosh(s - s0);
  return 6.0 / (c * c);
}

AutonomousResiduals autonomous_residuals(std::span<const LogState> states, Dimension d) {
  const double dd = d.value();
  const std::size_t n = states.size();
  // log_step works on radii; exp(s) keeps the uniformity test meaningful.
  std::vector<double> r(n), phi(n), W(n), E(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::exp(states[i].s);
    phi[i] = states[i].phi;
    W[i] = states[i].W;
    E[i] = autonomous_energy(states[i], d);
  }
  AutonomousResiduals out;
  for (std::size_t i = 0; i < n; ++i) {
    auto h = fd::log_step(r, i);
    if (!h) continue;
    const double p1 = fd::d_ds(phi, i, *h);
    const double p2 = fd::d2_ds2(phi, i, *h);
    const double w1 = fd::d_ds(W, i, *h);
    const double w2 = fd::d2_ds2(W, i, *h);
    const double e1 = fd::d_ds(E, i, *h);

    const double tp[] = {p2, (dd - 6.0) * p1, -2.0 * (dd - 4.0) * phi[i], -W[i] * phi[i]};
    const double tw[] = {w2, (dd - 6.0) * w1, -2.0 * (dd - 4.0) * W[i], -phi[i] * phi[i]};
    const double te[] = {e1, (dd - 6.0) * states[i].dphi * states[i].dphi, (dd - 6.0) * 0.5 * states[i].dW * states[i].dW};
    auto rel = [](std::span<const double> t) {
      double sum = 0.0, scale = 1.0;
      for (double x : t) {
        sum += x;
        scale += std::abs(x);
      }
      return std::abs(sum) / scale;
    };
    out.max_phi = std::max(out.max_phi, rel(tp));
    out.max_W = std::max(out.max_W, rel(tw));
    out.max_energy_rate = std::max(out.max_energy_rate, rel(te));
    ++out.points;
  }
  return out;
}

double fit_soliton_s0(std::span<const LogState> states, Dimension d) {
  const double dd = d.value();
  auto ddphi = [dd](const LogState& st) {
    return -(dd - 6.0) * st.dphi + 2.0 * (dd - 4.0) * st.phi + st.W * st.phi;
  };
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    const auto& a = states[i];
    const auto& b = states[i + 1];
    if (!(a.dphi > 0.0 && b.dphi <= 0.0)) continue;
    const double h = b.s - a.s;
    const double m0 = h * ddphi(a);
    const double m1 = h * ddphi(b);
    auto p = [&](double t) {
      const double t2 = t * t;
      const double t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * a.dphi + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * b.dphi + (t3 - t2) * m1;
    };
    double lo = 0.0, hi = 1.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
      const double mid = 0.5 * (lo + hi);
      (p(mid) > 0.0 ? lo : hi) = mid;
    }
    return a.s + 0.5 * (lo + hi) * h;
  }
  throw DomainError("fit_soliton_s0: phi' never changes sign from positive to nonpositive");
}

}  // namespace sn
