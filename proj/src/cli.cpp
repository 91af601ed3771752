#include "sn/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "sn/errors.hpp"
#include "sn/functionals.hpp"
#include "sn/lane_emden.hpp"
#include "sn/shooting.hpp"
#include "sn/transforms.hpp"
#include "sn/verify.hpp"

namespace sn::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct SolverFlags {
  double d = 0.0;
  double abs_tol = 0.0;
  double rel_tol = 0.0;
  double r_max = 0.0;
  double r_start = 0.0;
  double u_floor = 0.0;
  int samples_per_decade = 0;
  CLI::Option* o_d = nullptr;
  CLI::Option* o_abs = nullptr;
  CLI::Option* o_rel = nullptr;
  CLI::Option* o_rmax = nullptr;
  CLI::Option* o_rstart = nullptr;
  CLI::Option* o_floor = nullptr;
  CLI::Option* o_spd = nullptr;
};

void add_solver_flags(CLI::App* sub, SolverFlags& f, bool with_d) {
  if (with_d) f.o_d = sub->add_option("--d", f.d, "Dimension d > 0")->required();
  f.o_abs = sub->add_option("--abs-tol", f.abs_tol, "Absolute integration tolerance");
  f.o_rel = sub->add_option("--rel-tol", f.rel_tol, "Relative integration tolerance");
  f.o_rmax = sub->add_option("--rmax", f.r_max, "Integration horizon");
  f.o_rstart = sub->add_option("--r-start", f.r_start, "Radius where the series startup hands over");
  f.o_floor = sub->add_option("--u-floor", f.u_floor, "Decay threshold for candidates");
  f.o_spd = sub->add_option("--samples-per-decade", f.samples_per_decade, "Output grid density");
}

double env_default_tol() {
  const char* v = std::getenv("GS_DEFAULT_TOL");
  if (v == nullptr || *v == '\0') return 0.0;
  char* end = nullptr;
  const double x = std::strtod(v, &end);
  if (*end != '\0' || !(x > 0.0) || !std::isfinite(x)) {
    throw UsageError("GS_DEFAULT_TOL must be a positive number, got '" + std::string(v) + "'");
  }
  return x;
}

SolverConfig apply_flags(const SolverFlags& f, SolverConfig cfg) {
  if (const double t = env_default_tol(); t > 0.0) cfg.abs_tol = cfg.rel_tol = t;
  if (*f.o_abs) cfg.abs_tol = f.abs_tol;
  if (*f.o_rel) cfg.rel_tol = f.rel_tol;
  if (*f.o_rmax) cfg.r_max = f.r_max;
  if (*f.o_rstart) cfg.r_start = f.r_start;
  if (*f.o_floor) cfg.u_floor = f.u_floor;
  if (*f.o_spd) cfg.samples_per_decade = f.samples_per_decade;
  cfg.validate();
  return cfg;
}

json config_json(const SolverConfig& cfg) {
  return {{"abs_tol", cfg.abs_tol},     {"rel_tol", cfg.rel_tol},     {"r_start", cfg.r_start},
          {"r_max", cfg.r_max},         {"u_floor", cfg.u_floor},     {"event_tol", cfg.event_tol},
          {"samples_per_decade", cfg.samples_per_decade}};
}

json quad_json(const QuadratureResult& q) {
  return {{"value", q.value},
          {"tail_estimate", std::isfinite(q.tail_estimate) ? json(q.tail_estimate) : json("inf")},
          {"r_max_used", q.r_max_used},
          {"converged", q.converged},
          {"tolerance", q.tolerance}};
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  return os;
}

void write_profile_csv(const std::string& path, std::span<const RadialState> p) {
  auto os = open_output(path);
  os << "r,u,du,V,dV\n";
  for (const auto& s : p) os << num(s.r) << ',' << num(s.u) << ',' << num(s.du) << ',' << num(s.V) << ',' << num(s.dV) << '\n';
}

void write_json(const std::string& path, const json& j) {
  auto os = open_output(path);
  os << j.dump(2) << '\n';
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

int cmd_shoot(const SolverFlags& f, double u0_tol, const std::string& prefix, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, SolverConfig::defaults(d));
  if (!(u0_tol > 0.0)) throw UsageError("--tol must be positive");
  const auto res = shoot(cfg, u0_tol);
  const auto N = particle_number(res.profile, d);

  json e;
  if (d.value() > 2.0) {
    e = quad_json(energy(res.profile, d, 1.0));
    e["gamma"] = 1.0;
  } else {
    e = {{"value", nullptr}, {"unsupported", "no decaying gauge of the potential for d <= 2"}};
  }

  json cfg_j = config_json(cfg);
  cfg_j["u0_tol"] = u0_tol;
  json summary = {
      {"command", "shoot"},
      {"d", d.value()},
      {"config", cfg_j},
      {"results",
       {{"u0_star", {{"value", res.u0_star}, {"tolerance", u0_tol}}},
        {"final_bracket",
         {{"lo", res.final_bracket.lo}, {"hi", res.final_bracket.hi}, {"width", res.final_bracket_width},
          {"tolerance", u0_tol}}},
        {"candidate_band", {{"value", res.candidate_band}, {"tolerance", u0_tol}}},
        {"iterations", res.iterations},
        {"profile",
         {{"samples", res.profile.size()},
          {"r_last", res.profile.back().r},
          {"bracket_width", res.profile_bracket_width},
          {"tolerance", ShootOptions{}.profile_rel_spread}}},
        {"v_infinity",
         {{"value", res.v_infinity_divergent ? json("inf") : json(res.v_infinity)},
          {"at_r_last", res.v_infinity},
          {"divergent", res.v_infinity_divergent},
          {"tolerance", cfg.abs_tol}}},
        {"kappa", {{"value", res.kappa}, {"tolerance", cfg.abs_tol}}},
        {"sqrt_v_infinity_minus_one",
         {{"value", res.v_infinity_divergent ? json("inf") : json(res.sqrt_vinf_minus_one)}, {"tolerance", cfg.abs_tol}}},
        {"N", quad_json(N)},
        {"E", e}}},
      {"exit_status", kExitOk}};

  write_profile_csv(prefix + ".profile.csv", res.profile);
  write_json(prefix + ".summary.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_classify(const SolverFlags& f, double u0, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, SolverConfig::defaults(d));
  const auto c = classify(u0, cfg);
  out << to_string(c.verdict) << " r=" << num(c.witness_r) << " event=" << to_string(c.event) << '\n';
  return kExitOk;
}

int cmd_lane_emden(const SolverFlags& f, const std::string& prefix, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, SolverConfig::defaults(d));
  const auto p = solve_lane_emden(d, cfg);
  const auto prof = as_profile(p);
  json summary = {{"command", "lane-emden"},
                  {"d", d.value()},
                  {"config", config_json(cfg)},
                  {"results",
                   {{"first_zero", p.first_zero ? json(*p.first_zero) : json(nullptr)},
                    {"event_tol", cfg.event_tol},
                    {"samples", p.samples.size()},
                    {"r_last", p.samples.back().r}}},
                  {"exit_status", kExitOk}};
  write_profile_csv(prefix + ".profile.csv", prof);
  write_json(prefix + ".summary.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_milne(const SolverFlags& f, double r_lo, double r_hi, const std::string& prefix, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, verify_defaults("milne", d));
  const auto rep = milne(solve_lane_emden(d, cfg), r_lo, r_hi);
  {
    auto os = open_output(prefix + ".milne.csv");
    os << "r,y,z,y_residual,z_residual\n";
    for (const auto& s : rep.samples) {
      os << num(s.r) << ',' << num(s.y) << ',' << num(s.z) << ',' << (s.y_residual ? num(*s.y_residual) : "")
         << ',' << (s.z_residual ? num(*s.z_residual) : "") << '\n';
    }
  }
  json summary = {{"command", "milne"},
                  {"d", d.value()},
                  {"config", config_json(cfg)},
                  {"results",
                   {{"y_limit", {{"value", rep.y_limit}, {"tolerance", cfg.abs_tol}}},
                    {"z_limit", {{"value", rep.z_limit}, {"tolerance", cfg.abs_tol}}},
                    {"max_y_residual", rep.max_y_residual},
                    {"max_z_residual", rep.max_z_residual},
                    {"r_range", {r_lo, r_hi}}}},
                  {"exit_status", kExitOk}};
  write_json(prefix + ".summary.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_transform(const SolverFlags& f, double u0_tol, double gamma, double sigma, bool log_vars,
                  const std::string& prefix, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, SolverConfig::defaults(d));
  const auto gs = shoot(cfg, u0_tol);
  const auto phys = to_physical(gs.profile, gamma, sigma, gs.v_infinity);
  const auto res = physical_residuals(phys, d);
  {
    auto os = open_output(prefix + ".physical.csv");
    os << "r,u,du,v,dv\n";
    for (const auto& s : phys.samples) {
      os << num(s.r) << ',' << num(s.u) << ',' << num(s.du) << ',' << num(s.v) << ',' << num(s.dv) << '\n';
    }
  }
  if (log_vars) {
    auto os = open_output(prefix + ".log.csv");
    os << "s,phi,W,dphi,dW\n";
    for (const auto& s : to_log_variables(gs.profile)) {
      os << num(s.s) << ',' << num(s.phi) << ',' << num(s.W) << ',' << num(s.dphi) << ',' << num(s.dW) << '\n';
    }
  }
  const auto& sc = phys.scaling;
  json summary = {{"command", "transform"},
                  {"d", d.value()},
                  {"config", config_json(cfg)},
                  {"results",
                   {{"u0_star", {{"value", gs.u0_star}, {"tolerance", u0_tol}}},
                    {"scaling",
                     {{"gamma", sc.gamma},
                      {"sigma", sc.sigma},
                      {"A", sc.A},
                      {"B", sc.B},
                      {"omega", sc.omega},
                      {"omega_decaying_gauge", gs.v_infinity_divergent ? json(nullptr) : json(sc.omega_decay)}}},
                    {"v_infinity", {{"value", gs.v_infinity}, {"divergent", gs.v_infinity_divergent}}},
                    {"residual_u", {{"value", res.max_u}, {"tolerance", cfg.rel_tol}}},
                    {"residual_v", {{"value", res.max_v}, {"tolerance", cfg.rel_tol}}}}},
                  {"exit_status", kExitOk}};
  write_json(prefix + ".summary.json", summary);
  out << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& check, const SolverFlags& f, double u0_1, double u0_2, std::ostream& out) {
  const Dimension d(f.d);
  const SolverConfig cfg = apply_flags(f, verify_defaults(check, d));
  VerifyReport rep;
  if (check == "d6") rep = verify_d6(cfg);
  else if (check == "hls") rep = verify_hls();
  else if (check == "lyapunov") rep = verify_lyapunov(cfg);
  else if (check == "wronskian") rep = verify_wronskian(cfg, u0_1, u0_2);
  else if (check == "milne") rep = verify_milne(cfg);
  else if (check == "reduction") rep = verify_reduction(cfg);
  else rep = verify_autonomous(cfg);

  out << "verify " << rep.check << " (d = " << num(cfg.d.value()) << ", abs_tol = " << num(cfg.abs_tol)
      << ", rel_tol = " << num(cfg.rel_tol) << ")\n";
  for (const auto& a : rep.assertions) {
    out << "  " << (a.passed ? "PASS" : "FAIL") << "  " << a.name << ": " << num(a.measured) << ' ' << a.relation
        << ' ' << num(a.bound) << '\n';
  }
  out << "result: " << (rep.passed() ? "PASS" : "FAIL") << '\n';
  return rep.passed() ? kExitOk : kExitVerifyFailed;
}

std::vector<double> parse_range(const std::string& spec) {
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw UsageError("bad number");
    } catch (const std::exception&) {
      throw UsageError("--d-range expects lo:hi:step, got '" + spec + "'");
    }
  }
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
    throw UsageError("--d-range expects lo:hi:step with lo <= hi and step > 0");
  }
  std::vector<double> ds;
  const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long k = 0; k <= n; ++k) ds.push_back(parts[0] + static_cast<double>(k) * parts[2]);
  return ds;
}

struct SweepRow {
  double d = 0.0;
  bool ok = false;
  double u0_star = 0.0;
  double v_inf = 0.0;
  bool v_div = false;
  double kappa = 0.0;
  double N = 0.0;
  bool has_E = false;
  double E = 0.0;
  bool converged = false;
  std::string error;
};

SweepRow sweep_row(const SolverConfig& cfg, double u0_tol) {
  SweepRow row;
  row.d = cfg.d.value();
  try {
    const auto gs = shoot(cfg, u0_tol);
    row.u0_star = gs.u0_star;
    row.v_inf = gs.v_infinity;
    row.v_div = gs.v_infinity_divergent;
    row.kappa = gs.kappa;
    const auto N = particle_number(gs.profile, cfg.d);
    row.N = N.value;
    row.converged = N.converged;
    if (row.d > 2.0) {
      const auto E = energy(gs.profile, cfg.d, 1.0);
      row.has_E = true;
      row.E = E.value;
      row.converged = row.converged && E.converged;
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

int cmd_sweep(const SolverFlags& f, std::vector<double> ds, const std::string& range, double u0_tol,
              const std::string& prefix, std::ostream& out) {
  if (!range.empty() && !ds.empty()) throw UsageError("give either --d or --d-range, not both");
  if (!range.empty()) ds = parse_range(range);
  if (ds.empty()) throw UsageError("sweep needs a non-empty --d list or --d-range");
  if (!(u0_tol > 0.0)) throw UsageError("--tol must be positive");

  std::vector<SolverConfig> cfgs;
  for (double d : ds) cfgs.push_back(apply_flags(f, SolverConfig::defaults(Dimension(d))));

  std::vector<std::future<SweepRow>> jobs;
  for (const auto& cfg : cfgs) jobs.push_back(std::async(std::launch::async, sweep_row, cfg, u0_tol));

  std::ostringstream csv;
  csv << "d,u0_star,V_inf,kappa,N,E,converged,error\n";
  bool any_ok = false;
  for (auto& j : jobs) {
    const SweepRow row = j.get();
    any_ok = any_ok || row.ok;
    csv << num(row.d) << ',';
    if (row.ok) {
      csv << num(row.u0_star) << ',' << (row.v_div ? std::string("inf") : num(row.v_inf)) << ',' << num(row.kappa)
          << ',' << num(row.N) << ',' << (row.has_E ? num(row.E) : std::string()) << ','
          << (row.converged ? "true" : "false") << ',';
    } else {
      csv << ",,,,,false,";
    }
    csv << csv_field(row.error) << '\n';
  }
  if (!prefix.empty()) {
    auto os = open_output(prefix + ".sweep.csv");
    os << csv.str();
  }
  out << csv.str();
  return any_ok ? kExitOk : kExitNonConvergence;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ground states of the radial Schrodinger-Newton system"};
  app.name("sn");
  app.require_subcommand(1);

  SolverFlags shoot_f, classify_f, le_f, milne_f, tr_f, verify_f, sweep_f;
  double shoot_tol = 1e-8, tr_tol = 1e-8, sweep_tol = 1e-8;
  std::string shoot_out = "shoot", le_out = "lane_emden", milne_out = "milne", tr_out = "transform", sweep_out;
  double u0 = 0.0, r_lo = 0.1, r_hi = 10.0, gamma = 1.0, sigma = 1.0, u0_1 = 1.0, u0_2 = 1.2;
  bool log_vars = false;
  std::string check, d_range;
  std::vector<double> sweep_ds;

  auto* s_shoot = app.add_subcommand("shoot", "Bisect to the ground state and write profile and summary");
  add_solver_flags(s_shoot, shoot_f, true);
  s_shoot->add_option("--tol", shoot_tol, "Bracket width at which bisection stops");
  s_shoot->add_option("--out", shoot_out, "Output prefix");

  auto* s_classify = app.add_subcommand("classify", "Classify one initial value as N, P or CANDIDATE");
  add_solver_flags(s_classify, classify_f, true);
  s_classify->add_option("--u0", u0, "Initial value u(0)")->required();

  auto* s_le = app.add_subcommand("lane-emden", "Solve u'' + (d-1)/r u' = -u^2, u(0) = 1");
  add_solver_flags(s_le, le_f, true);
  s_le->add_option("--out", le_out, "Output prefix");

  auto* s_milne = app.add_subcommand("milne", "Milne variables of the Lane-Emden solution");
  add_solver_flags(s_milne, milne_f, true);
  s_milne->add_option("--r-lo", r_lo, "Lower end of the evaluation range");
  s_milne->add_option("--r-hi", r_hi, "Upper end of the evaluation range");
  s_milne->add_option("--out", milne_out, "Output prefix");

  auto* s_tr = app.add_subcommand("transform", "Rescale the ground state to the physical system");
  add_solver_flags(s_tr, tr_f, true);
  s_tr->add_option("--tol", tr_tol, "Bracket width at which bisection stops");
  s_tr->add_option("--gamma", gamma, "Coupling gamma > 0");
  s_tr->add_option("--sigma", sigma, "Scale sigma > 0");
  s_tr->add_flag("--log", log_vars, "Also write the log variables s, phi, W");
  s_tr->add_option("--out", tr_out, "Output prefix");

  auto* s_verify = app.add_subcommand("verify", "Run a named check suite");
  s_verify->add_option("check", check, "Suite name")
      ->required()
      ->check(CLI::IsMember({"d6", "hls", "lyapunov", "wronskian", "milne", "reduction", "autonomous"}));
  verify_f.d = 6.0;
  verify_f.o_d = s_verify->add_option("--d", verify_f.d, "Dimension (default 6, or 3 for wronskian)");
  add_solver_flags(s_verify, verify_f, false);
  s_verify->add_option("--u0-1", u0_1, "Smaller initial value (wronskian)");
  s_verify->add_option("--u0-2", u0_2, "Larger initial value (wronskian)");

  auto* s_sweep = app.add_subcommand("sweep", "Shoot for a list of dimensions");
  add_solver_flags(s_sweep, sweep_f, false);
  s_sweep->add_option("--d", sweep_ds, "Comma separated dimensions")->delimiter(',');
  s_sweep->add_option("--d-range", d_range, "lo:hi:step");
  s_sweep->add_option("--tol", sweep_tol, "Bracket width at which bisection stops");
  s_sweep->add_option("--out", sweep_out, "Also write <out>.sweep.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*s_shoot) return cmd_shoot(shoot_f, shoot_tol, shoot_out, out);
    if (*s_classify) return cmd_classify(classify_f, u0, out);
    if (*s_le) return cmd_lane_emden(le_f, le_out, out);
    if (*s_milne) return cmd_milne(milne_f, r_lo, r_hi, milne_out, out);
    if (*s_tr) return cmd_transform(tr_f, tr_tol, gamma, sigma, log_vars, tr_out, out);
    if (*s_verify) {
      if (check == "wronskian" && !*verify_f.o_d) verify_f.d = 3.0;
      return cmd_verify(check, verify_f, u0_1, u0_2, out);
    }
    return cmd_sweep(sweep_f, sweep_ds, d_range, sweep_tol, sweep_out, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnsupportedGauge& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const BracketFailure& e) {
    err << "bracket failure: " << e.what() << '\n';
    return kExitBracketFailure;
  } catch (const NonConvergence& e) {
    err << "non-convergence: " << e.what() << " (bracket [" << num(e.lo()) << ", " << num(e.hi()) << "])\n";
    return kExitNonConvergence;
  } catch (const UndeterminedHorizon& e) {
    err << "undetermined: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const IntegrationStalled& e) {
    err << "integration stalled: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
}

}  // namespace sn::cli
