#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sn/cli.hpp"
#include "sn/errors.hpp"
#include "sn/functionals.hpp"
#include "sn/lane_emden.hpp"
#include "sn/shooting.hpp"
#include "sn/verify.hpp"

using namespace sn;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

struct Check {
  std::string name;
  std::string measured;
  std::string bound;
  bool ok = false;
};

struct Criterion {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  std::string error;
  [[nodiscard]] bool passed() const {
    if (!error.empty() || checks.empty()) return false;
    for (const auto& c : checks) {
      if (!c.ok) return false;
    }
    return true;
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Check le(std::string name, double v, double bound) { return {std::move(name), fmt(v), "<= " + fmt(bound), v <= bound}; }
Check lt(std::string name, double v, double bound) { return {std::move(name), fmt(v), "< " + fmt(bound), v < bound}; }
Check ge(std::string name, double v, double bound) { return {std::move(name), fmt(v), ">= " + fmt(bound), v >= bound}; }
Check is(std::string name, const std::string& got, const std::string& want) {
  return {std::move(name), got, "== " + want, got == want};
}

void add_report(Criterion& c, const VerifyReport& rep, const std::string& tag) {
  for (const auto& a : rep.assertions) {
    c.checks.push_back({tag + a.name, fmt(a.measured), a.relation + " " + fmt(a.bound), a.passed});
  }
}

SolverConfig cfg_for(double d) { return SolverConfig::defaults(Dimension(d)); }

std::string verdict_of(double u0, const SolverConfig& cfg) {
  try {
    return std::string(to_string(classify(u0, cfg).verdict));
  } catch (const UndeterminedHorizon&) {
    return "undetermined";
  }
}

// 1
void d6_exactness(Criterion& c) {
  fs::create_directories(SN_TEST_TMP);
  const std::string prefix = (fs::path(SN_TEST_TMP) / "c1").string();
  const std::vector<std::string> args{"sn", "shoot", "--d", "6", "--tol", "1e-8", "--abs-tol", "1e-10",
                                      "--rel-tol", "1e-10", "--out", prefix};
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const auto t0 = std::chrono::steady_clock::now();
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c.checks.push_back(is("shoot exit status", std::to_string(code), "0"));
  if (code != 0) return;

  std::ifstream js(prefix + ".summary.json");
  const auto j = nlohmann::json::parse(js);
  const double u0 = j["results"]["u0_star"]["value"].get<double>();
  c.checks.push_back(le("|u0_star - 1|", std::abs(u0 - 1.0), 1e-6));

  std::ifstream csv(prefix + ".profile.csv");
  std::string line;
  std::getline(csv, line);
  double sup = 0.0, r_last = 0.0;
  while (std::getline(csv, line)) {
    double r, u;
    if (std::sscanf(line.c_str(), "%lf,%lf", &r, &u) != 2) continue;
    r_last = r;
    if (r <= 50.0) sup = std::max(sup, std::abs(u - exact_d6(r)));
  }
  c.checks.push_back(ge("profile reaches r", r_last, 50.0));
  c.checks.push_back(le("sup |u - (1+r^2/24)^-2| on [0, 50]", sup, 1e-6));
  c.checks.push_back(le("runtime [s]", secs, 2.0));
}

// 2
void set_membership(Criterion& c) {
  for (int d = 1; d <= 7; ++d) {
    c.checks.push_back(is("classify(0.5, " + std::to_string(d) + ")", verdict_of(0.5, cfg_for(d)), "N"));
  }
  for (int d = 1; d <= 5; ++d) {
    c.checks.push_back(is("classify(1, " + std::to_string(d) + ")", verdict_of(1.0, cfg_for(d)), "N"));
  }
  c.checks.push_back(is("classify(1, 6)", verdict_of(1.0, cfg_for(6)), "CANDIDATE"));
  // At d = 7, u ~ 6 r^-2 drops below u_floor only near r = 2.5e4.
  SolverConfig c7 = cfg_for(7);
  c7.r_max = 1e5;
  c.checks.push_back(is("classify(1, 7) with r_max = 1e5", verdict_of(1.0, c7), "CANDIDATE"));
  const auto g = shoot(cfg_for(7), 1e-8);
  c.checks.push_back(le("shoot d = 7: |u0_star - 1|", std::abs(g.u0_star - 1.0), 1e-6));
}

// 3
void low_dimensional_ground_states(Criterion& c) {
  for (double d : {3.0, 2.0}) {
    const std::string tag = "d = " + fmt(d) + ": ";
    const auto g = shoot(cfg_for(d), 1e-8);
    c.checks.push_back(le(tag + "final bracket width", g.final_bracket_width, 1e-8));
    bool shape = true;
    for (const auto& s : g.profile) shape = shape && s.u > 0.0 && s.du < 0.0;
    c.checks.push_back(is(tag + "u > 0 and u' < 0 on the profile", shape ? "yes" : "no", "yes"));
    const std::string vinf = g.v_infinity_divergent ? "inf" : fmt(g.v_infinity);
    const bool chain = g.u0_star > 1.0 && (g.v_infinity_divergent || g.u0_star < g.v_infinity);
    c.checks.push_back({tag + "1 < u0_star < V_inf", fmt(g.u0_star) + " vs V_inf " + vinf, "in (1, V_inf)", chain});
    const double gap = std::abs(g.kappa - g.sqrt_vinf_minus_one);
    c.checks.push_back(le(tag + "|mean tail(-u'/u) - sqrt(V_inf - 1)| (kappa " + fmt(g.kappa) + ", profile to r = " +
                              fmt(g.profile.back().r) + ")",
                          gap, 1e-3));
  }
}

// 4
void reduction(Criterion& c) {
  for (double d : {6.0, 7.0, 8.0}) {
    SolverConfig cfg = cfg_for(d);
    cfg.r_max = 100.0;
    c.checks.push_back(le("d = " + fmt(d) + ": max |u + V - 1| on [0, 100]", reduction_check(cfg.d, cfg), 1e-8));
  }
}

// 5
void lyapunov_dichotomy(Criterion& c) {
  for (double d : {6.0, 7.0, 3.0, 5.0}) {
    add_report(c, verify_lyapunov(verify_defaults("lyapunov", Dimension(d))), "d = " + fmt(d) + ": ");
  }
}

// 6
void wronskian(Criterion& c) { add_report(c, verify_wronskian(verify_defaults("wronskian", Dimension(3)), 1.0, 1.2), ""); }

// 7
void milne_variables(Criterion& c) {
  for (double d : {3.0, 7.0}) add_report(c, verify_milne(verify_defaults("milne", Dimension(d))), "d = " + fmt(d) + ": ");
}

// 8
void autonomous(Criterion& c) { add_report(c, verify_autonomous(verify_defaults("autonomous", Dimension(6))), ""); }

// 9
void hls(Criterion& c) { add_report(c, verify_hls(), ""); }

// 10
void criticality(Criterion& c) {
  for (double d : {3.0, 5.0}) {
    const auto g = shoot(cfg_for(d), 1e-8);
    const auto n = particle_number(g.profile, Dimension(d));
    c.checks.push_back(lt("d = " + fmt(d) + " ground state: tail / N (N = " + fmt(n.value) + ")",
                          n.tail_estimate / n.value, 1e-6));
  }
  // The numerical d = 6 tail loses accuracy like r^4; the closed form is sampled to r = 3e4 instead.
  Profile p6;
  for (double r = 1e-3; r <= 3e4; r *= std::pow(10.0, 1.0 / 200)) {
    const double u = exact_d6(r);
    const double du = -r / 6.0 * std::pow(1.0 + r * r / 24.0, -3.0);
    p6.push_back({r, u, du, 1.0 - u, -du});
  }
  const auto n6 = particle_number(p6, Dimension(6));
  c.checks.push_back(lt("d = 6 closed form to r = " + fmt(n6.r_max_used) + ": tail / N (N = " + fmt(n6.value) + ")",
                        n6.tail_estimate / n6.value, 1e-6));
  for (double d : {7.0, 8.0}) {
    const auto cfg = cfg_for(d);
    const auto n = particle_number(as_profile(solve_lane_emden(cfg.d, cfg)), Dimension(d));
    const bool flagged = !n.converged && std::isinf(n.tail_estimate);
    c.checks.push_back(is("d = " + fmt(d) + " Lane-Emden to r = 1e3: flagged divergent", flagged ? "yes" : "no", "yes"));
  }
}

// 11
double compact_rho(double r) { return r < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0; }

double direct_pairing_d6() {
  using boost::math::quadrature::gauss_kronrod;
  auto quad = [](auto f, double a, double b) { return gauss_kronrod<double, 15>::integrate(f, a, b, 5, 1e-8); };
  const double w4 = 8.0 * pi * pi / 3.0;
  auto kernel = [&](double r, double s) {
    return w4 * quad([&](double th) {
      const double q = r * r + s * s - 2.0 * r * s * std::cos(th);
      const double sn = std::sin(th);
      return sn * sn * sn * sn / (q * q);
    }, 0.0, pi);
  };
  auto inner = [&](double r) {
    auto g = [&](double s) { return compact_rho(s) * std::pow(s, 5) * kernel(r, s); };
    return quad(g, 0.0, r) + quad(g, r, 1.0);
  };
  const double total = pi * pi * pi * quad([&](double r) { return compact_rho(r) * std::pow(r, 5) * inner(r); }, 0.0, 1.0);
  return -total / (4.0 * pi * pi * pi);
}

double startup_residual(double r0) {
  const Dimension d(3.0);
  const double h = 0.1 * r0;
  double du[5], dv[5];
  for (int k = -2; k <= 2; ++k) {
    const auto s = series_start(2.0, d, r0 + k * h);
    du[k + 2] = s.du;
    dv[k + 2] = s.dV;
  }
  const auto f = rhs(series_start(2.0, d, r0), d);
  const double ddu = (du[0] - 8 * du[1] + 8 * du[3] - du[4]) / (12 * h);
  const double ddv = (dv[0] - 8 * dv[1] + 8 * dv[3] - dv[4]) / (12 * h);
  return std::max(std::abs(ddu - f.ddu), std::abs(ddv - f.ddV));
}

double d6_error(double tol) {
  SolverConfig cfg = cfg_for(6);
  cfg.r_max = 50.0;
  cfg.abs_tol = cfg.rel_tol = tol;
  double e = 0.0;
  for (const auto& s : integrate(series_start(1.0, cfg.d, cfg.r_start), cfg, {}).profile) {
    e = std::max(e, std::abs(s.u - exact_d6(s.r)));
  }
  return e;
}

void oracles(Criterion& c) {
  const double solve = poisson_pairing(compact_rho, compact_rho, Dimension(6));
  const double direct = direct_pairing_d6();
  c.checks.push_back(le("Poisson solve vs direct double integral, relative gap (" + fmt(solve) + " vs " + fmt(direct) + ")",
                        std::abs(solve / direct - 1.0), 1e-2));

  double worst_scaled = 0.0, min_order = INFINITY, prev = 0.0;
  for (double r0 : {1e-3, 2e-3, 4e-3, 8e-3}) {
    const double res = startup_residual(r0);
    worst_scaled = std::max(worst_scaled, res / (r0 * r0 * r0));
    if (prev > 0.0) min_order = std::min(min_order, std::log2(res / prev));
    prev = res;
  }
  c.checks.push_back(le("startup residual / r0^3, u0 = 2, d = 3", worst_scaled, 1.0));
  c.checks.push_back(ge("startup residual order in r0", min_order, 3.0));

  // Error per unit step on the fourth-order estimate with fifth-order propagation: error ~ tol^1.
  std::vector<double> x, y;
  for (double tol = 1e-6; tol > 1e-11; tol /= 2.0) {
    x.push_back(std::log(tol));
    y.push_back(std::log(d6_error(tol)));
  }
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  const double slope = sxy / sxx;
  c.checks.push_back(le("|fitted d log(error) / d log(tol) - 1| over 17 tolerances", std::abs(slope - 1.0), 0.15));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> expected;
  app.add_option("--expected-failures", expected, "Criteria known to fail")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> table{
      {"d = 6 exactness", d6_exactness},
      {"set membership", set_membership},
      {"d = 3 and d = 2 ground states", low_dimensional_ground_states},
      {"reduction identity", reduction},
      {"Lyapunov sign dichotomy", lyapunov_dichotomy},
      {"Wronskian monotonicity", wronskian},
      {"Milne variables", milne_variables},
      {"autonomous system", autonomous},
      {"HLS at d = 6", hls},
      {"criticality of d = 6", criticality},
      {"oracle equivalence", oracles},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < table.size(); ++i) {
    Criterion c{static_cast<int>(i + 1), table[i].first, {}, {}};
    try {
      table[i].second(c);
    } catch (const std::exception& e) {
      c.error = e.what();
    }
    std::printf("[%s] %2d %s\n", c.passed() ? "PASS" : "FAIL", c.id, c.title.c_str());
    for (const auto& k : c.checks) {
      std::printf("         %s %s: %s %s\n", k.ok ? "ok  " : "FAIL", k.name.c_str(), k.measured.c_str(), k.bound.c_str());
    }
    if (!c.error.empty()) std::printf("         error: %s\n", c.error.c_str());
    if (!c.passed()) failed.insert(c.id);
  }

  const std::set<int> known(expected.begin(), expected.end());
  std::printf("\n%zu/%zu criteria pass", table.size() - failed.size(), table.size());
  if (!failed.empty()) {
    std::printf("; failing:");
    for (int id : failed) std::printf(" %d%s", id, known.count(id) ? " (known)" : "");
  }
  std::printf("\n");
  for (int id : known) {
    if (!failed.count(id)) std::printf("criterion %d was listed as a known failure but passed\n", id);
  }
  return failed == known ? 0 : 1;
}
