#include "sn/functionals.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "sn/dopri5.hpp"
#include "sn/errors.hpp"
#include "sn/ode_core.hpp"
#include "sn/shooting.hpp"

namespace sn {

double surface_area(Dimension d) {
  const double h = 0.5 * d.value();
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace {

constexpr std::array<double, 5> kGaussX{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                        0.9061798459386640};
constexpr std::array<double, 5> kGaussW{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                        0.4786286704993665, 0.2369268850561891};

// Cubic Hermite interpolation of (u, u', V) on one profile interval, with u''
// taken from the differential equation.
class HermiteCell {
 public:
  HermiteCell(const RadialState& a, const RadialState& b, Dimension d)
      : a_(a), b_(b), h_(b.r - a.r), dda_(rhs(a, d).ddu), ddb_(rhs(b, d).ddu) {}

  [[nodiscard]] RadialState at(double r) const {
    const double t = (r - a_.r) / h_;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    auto mix = [&](double y0, double m0, double y1, double m1) { return h00 * y0 + h10 * h_ * m0 + h01 * y1 + h11 * h_ * m1; };
    return {r, mix(a_.u, a_.du, b_.u, b_.du), mix(a_.du, dda_, b_.du, ddb_), mix(a_.V, a_.dV, b_.V, b_.dV), 0.0};
  }

 private:
  RadialState a_, b_;
  double h_, dda_, ddb_;
};

template <class G>
double interior_integral(std::span<const RadialState> p, Dimension d, G g) {
  if (p.empty()) return 0.0;
  // [0, r_0]: the integrand behaves like r^{d-1} there.
  double acc = g(p.front()) * p.front().r / d.value();
  for (std::size_t i = 0; i + 1 < p.size(); ++i) {
    if (!(p[i + 1].r > p[i].r)) continue;
    const HermiteCell cell(p[i], p[i + 1], d);
    const double half = 0.5 * (p[i + 1].r - p[i].r);
    const double mid = 0.5 * (p[i + 1].r + p[i].r);
    double sum = 0.0;
    for (std::size_t k = 0; k < kGaussX.size(); ++k) sum += kGaussW[k] * g(cell.at(mid + half * kGaussX[k]));
    acc += half * sum;
  }
  return acc;
}

// Largest index whose radius does not exceed r.
std::size_t index_at_or_below(std::span<const RadialState> p, double r) {
  std::size_t j = p.size() - 1;
  while (j > 0 && p[j].r > r) --j;
  return j;
}

template <class G>
double tail_integral(std::span<const RadialState> p, Dimension d, G g) {
  const auto& last = p.back();
  const double gR = g(last);
  if (gR == 0.0) return 0.0;
  const double R = last.r;
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (d.value() < 6.0) {
    const std::size_t j = index_at_or_below(p, 0.95 * R);
    const double gj = g(p[j]);
    if (j + 1 == p.size() || gj == 0.0) return inf;
    const double rate = std::log(std::abs(gj) / std::abs(gR)) / (R - p[j].r);
    if (!(rate > 0.0)) return std::copysign(inf, gR);
    return gR / rate;
  }
  const std::size_t j = index_at_or_below(p, 0.1 * R);
  const double gj = g(p[j]);
  if (j + 1 == p.size() || gj == 0.0) return inf;
  const double slope = std::log(std::abs(gR) / std::abs(gj)) / std::log(R / p[j].r);
  if (!(slope < -1.0)) return std::copysign(inf, gR);
  return gR * R / (-slope - 1.0);
}

QuadratureResult finish(double value, double tail, double r_max, double rel_tol) {
  QuadratureResult q;
  q.r_max_used = r_max;
  q.tolerance = rel_tol;
  q.tail_estimate = std::abs(tail);
  q.value = std::isfinite(tail) ? value + tail : value;
  q.converged = std::isfinite(tail) && q.tail_estimate <= rel_tol * std::abs(q.value);
  return q;
}

}  // namespace

QuadratureResult particle_number(std::span<const RadialState> profile, Dimension d, double rel_tol) {
  if (profile.empty()) throw DomainError("particle_number: empty profile");
  const double w = surface_area(d);
  const double dm1 = d.value() - 1.0;
  auto g = [dm1](const RadialState& s) { return s.u * s.u * std::pow(s.r, dm1); };
  return finish(w * interior_integral(profile, d, g), w * tail_integral(profile, d, g), profile.back().r, rel_tol);
}

QuadratureResult energy(std::span<const RadialState> profile, Dimension d, double gamma, double rel_tol) {
  if (d.value() <= 2.0) {
    throw UnsupportedGauge("energy: no decaying gauge of the potential for d <= 2");
  }
  if (profile.empty()) throw DomainError("energy: empty profile");
  const double w = surface_area(d);
  const double dm1 = d.value() - 1.0;
  const double v_inf = estimate_v_infinity(profile, d).value;
  auto kinetic = [dm1](const RadialState& s) { return s.du * s.du * std::pow(s.r, dm1); };
  auto potential = [dm1, v_inf](const RadialState& s) { return (s.V - v_inf) * s.u * s.u * std::pow(s.r, dm1); };

  const double ck = 0.5 * w;
  const double cp = -0.25 * gamma * w;
  const double tk = tail_integral(profile, d, kinetic);
  const double tp = tail_integral(profile, d, potential);
  const double value = ck * interior_integral(profile, d, kinetic) + cp * interior_integral(profile, d, potential);
  const double tail = std::isfinite(tk) && std::isfinite(tp) ? ck * tk + cp * tp : std::numeric_limits<double>::infinity();

  QuadratureResult q = finish(value, tail, profile.back().r, rel_tol);
  if (std::isfinite(tail)) q.tail_estimate = std::abs(ck * tk) + std::abs(cp * tp);
  q.converged = std::isfinite(tail) && q.tail_estimate <= rel_tol * std::abs(q.value);
  return q;
}

namespace {

template <std::size_t N, class F>
ode::Vec<N> integrate_in_log_radius(F&& f, const ode::Vec<N>& y0, const PoissonOptions& opts, const char* what) {
  ode::StepControl ctl;
  ctl.abs_tol = opts.abs_tol;
  ctl.rel_tol = opts.rel_tol;
  ctl.h_max = 0.1;
  auto traj = ode::integrate<N>(f, opts.s_min, y0, opts.s_max, {}, std::span<const ode::EventSpec<N>>{}, ctl, 1e-12);
  if (traj.status != ode::IntegratorStatus::EndReached) {
    throw NonConvergence(std::string(what) + ": radial solve stalled at s = " + std::to_string(traj.last.t),
                         opts.s_min, traj.last.t);
  }
  return traj.last.y;
}

}  // namespace

double poisson_pairing(const RadialFunction& rho_f, const RadialFunction& rho_g, Dimension d,
                       const PoissonOptions& opts) {
  const double dd = d.value();
  if (dd <= 2.0) throw UnsupportedGauge("poisson_pairing: the potential has no decaying gauge for d <= 2");
  if (!(opts.s_max > opts.s_min)) throw DomainError("poisson_pairing: need s_min < s_max");

  // M_f = int rho_f r^{d-1}, P = int M_f r^{1-d} (so V_f = P - P(inf)),
  // Q = int P rho_g r^{d-1}, M_g = int rho_g r^{d-1}.
  auto f = [&](double s, const ode::Vec<4>& y, ode::Vec<4>& dy) {
    const double r = std::exp(s);
    const double rd = std::pow(r, dd);
    const double rg = rho_g(r) * rd;
    dy[0] = rho_f(r) * rd;
    dy[1] = y[0] * std::pow(r, 2.0 - dd);
    dy[2] = y[1] * rg;
    dy[3] = rg;
  };
  const double r0 = std::exp(opts.s_min);
  const double rho0 = rho_f(r0);
  const ode::Vec<4> y0{rho0 * std::pow(r0, dd) / dd, rho0 * r0 * r0 / (2.0 * dd), 0.0,
                       rho_g(r0) * std::pow(r0, dd) / dd};
  const auto y = integrate_in_log_radius<4>(f, y0, opts, "poisson_pairing");

  const double R = std::exp(opts.s_max);
  const double p_inf = y[1] + y[0] * std::pow(R, 2.0 - dd) / (dd - 2.0);
  return surface_area(d) * (y[2] - p_inf * y[3]);
}

double dirichlet_energy(const RadialFunction& df, Dimension d, const PoissonOptions& opts) {
  const double dd = d.value();
  auto f = [&](double s, const ode::Vec<1>& y, ode::Vec<1>& dy) {
    (void)y;
    const double r = std::exp(s);
    const double g = df(r);
    dy[0] = g * g * std::pow(r, dd);
  };
  const auto y = integrate_in_log_radius<1>(f, ode::Vec<1>{0.0}, opts, "dirichlet_energy");
  return surface_area(d) * y[0];
}

Fraction hls_constant_fraction(int d) {
  if (d <= 4) throw DomainError("hls_constant: requires an integer d > 4");
  const long dl = d;
  long num = 4 * (dl - 1);
  long den = dl * dl * (dl - 2) * (dl - 2) * (dl - 4);
  const long g = std::gcd(num, den);
  return {num / g, den / g};
}

double hls_constant(int d) {
  const auto c = hls_constant_fraction(d);
  return static_cast<double>(c.num) / static_cast<double>(c.den);
}

HlsResult hls_check(const HlsOptions& opts) {
  if (!(opts.dilation > 0.0)) throw DomainError("hls_check: dilation must be positive");
  RadialFunction f = opts.f;
  RadialFunction df = opts.df;
  if (!f || !df) {
    f = [](double r) { return std::pow(1.0 + r * r, -2.0); };
    df = [](double r) { return -4.0 * r * std::pow(1.0 + r * r, -3.0); };
  }
  const double lam = opts.dilation;
  auto rho = [&](double r) {
    const double v = f(lam * r);
    return v * v;
  };
  auto dfl = [&](double r) { return lam * df(lam * r); };

  const Dimension d6(6.0);
  HlsResult res;
  res.c6 = hls_constant(6);
  res.lhs = -4.0 * surface_area(d6) * poisson_pairing(rho, rho, d6, opts.poisson);
  res.gradient_norm_sq = dirichlet_energy(dfl, d6, opts.poisson);
  res.rhs = res.c6 * res.gradient_norm_sq * res.gradient_norm_sq;
  res.ratio = res.lhs / res.rhs;
  return res;
}

}  // namespace sn
