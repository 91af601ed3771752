#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "sn/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run sn_run(std::vector<std::string> args) {
  args.insert(args.begin(), "sn");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = sn::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp(const std::string& name) {
  fs::create_directories(SN_TEST_TMP);
  return (fs::path(SN_TEST_TMP) / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("shoot writes profile and summary") {
  const auto prefix = tmp("shoot6");
  const auto r = sn_run({"shoot", "--d", "6", "--tol", "1e-8", "--out", prefix});
  REQUIRE(r.code == sn::cli::kExitOk);
  const auto j = json::parse(slurp(prefix + ".summary.json"));
  CHECK(std::abs(j["results"]["u0_star"]["value"].get<double>() - 1.0) <= 1e-6);
  CHECK(j["results"]["u0_star"]["tolerance"].get<double>() == 1e-8);
  for (const char* key : {"u0_star", "final_bracket", "candidate_band", "iterations", "profile", "v_infinity", "kappa",
                          "sqrt_v_infinity_minus_one", "N", "E"}) {
    CAPTURE(key);
    CHECK(j["results"].contains(key));
  }
  std::ifstream csv(prefix + ".profile.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "r,u,du,V,dV");
}

TEST_CASE("shoot at d = 3 and invalid dimensions") {
  const auto r = sn_run({"shoot", "--d", "3", "--out", tmp("shoot3")});
  CHECK(r.code == sn::cli::kExitOk);
  const auto j = json::parse(slurp(tmp("shoot3") + ".summary.json"));
  CHECK(j["results"]["u0_star"]["value"].get<double>() > 1.0);

  CHECK(sn_run({"shoot", "--d", "0", "--out", tmp("bad")}).code == sn::cli::kExitUsage);
  CHECK(sn_run({"shoot", "--d", "-2", "--out", tmp("bad")}).code == sn::cli::kExitUsage);
}

TEST_CASE("output is deterministic") {
  sn_run({"shoot", "--d", "5", "--out", tmp("det_a")});
  sn_run({"shoot", "--d", "5", "--out", tmp("det_b")});
  CHECK(slurp(tmp("det_a") + ".profile.csv") == slurp(tmp("det_b") + ".profile.csv"));
  CHECK(slurp(tmp("det_a") + ".summary.json") == slurp(tmp("det_b") + ".summary.json"));
}

TEST_CASE("classify") {
  auto r = sn_run({"classify", "--d", "3", "--u0", "0.5"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("N ", 0) == 0);
  r = sn_run({"classify", "--d", "6", "--u0", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("CANDIDATE", 0) == 0);
  r = sn_run({"classify", "--d", "3", "--u0", "50"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("P ", 0) == 0);
  r = sn_run({"classify", "--d", "7", "--u0", "1"});
  CHECK(r.code == sn::cli::kExitNonConvergence);
  r = sn_run({"classify", "--d", "7", "--u0", "1", "--rmax", "1e5"});
  CHECK(r.out.rfind("CANDIDATE", 0) == 0);
}

TEST_CASE("unknown flags and subcommands are rejected") {
  CHECK(sn_run({"classify", "--d", "3", "--u0", "0.5", "--bogus", "1"}).code == sn::cli::kExitUsage);
  CHECK(sn_run({"frobnicate"}).code == sn::cli::kExitUsage);
  CHECK(sn_run({}).code == sn::cli::kExitUsage);
  CHECK(sn_run({"verify", "nonsense"}).code == sn::cli::kExitUsage);
}

TEST_CASE("lane-emden, milne and transform") {
  auto r = sn_run({"lane-emden", "--d", "3", "--out", tmp("le3")});
  CHECK(r.code == 0);
  auto j = json::parse(slurp(tmp("le3") + ".summary.json"));
  CHECK(j["results"]["first_zero"].get<double>() == doctest::Approx(4.352874595946125).epsilon(1e-8));

  r = sn_run({"milne", "--d", "7", "--out", tmp("m7")});
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp("m7") + ".milne.csv"));

  r = sn_run({"transform", "--d", "3", "--gamma", "2", "--sigma", "0.7", "--log", "--out", tmp("t3")});
  CHECK(r.code == 0);
  CHECK(fs::exists(tmp("t3") + ".physical.csv"));
  CHECK(fs::exists(tmp("t3") + ".log.csv"));
  CHECK(sn_run({"transform", "--d", "3", "--gamma", "-1", "--out", tmp("t3")}).code == sn::cli::kExitUsage);
}

TEST_CASE("verify") {
  for (const char* c : {"d6", "hls", "autonomous", "wronskian"}) {
    CAPTURE(c);
    const auto r = sn_run({"verify", c});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS") != std::string::npos);
  }
  CHECK(sn_run({"verify", "lyapunov", "--d", "3"}).code == 0);
  CHECK(sn_run({"verify", "milne", "--d", "7"}).code == 0);
  CHECK(sn_run({"verify", "reduction", "--d", "8"}).code == 0);
  CHECK(sn_run({"verify", "wronskian", "--u0-1", "1.2", "--u0-2", "1.0"}).code == sn::cli::kExitUsage);
  CHECK(sn_run({"verify", "d6", "--abs-tol", "1e-5", "--rel-tol", "1e-5"}).code == sn::cli::kExitVerifyFailed);
}

TEST_CASE("sweep") {
  auto r = sn_run({"sweep", "--d", "1,2,3,4,5,6", "--out", tmp("sw")});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "d,u0_star,V_inf,kappa,N,E,converged,error");
  std::vector<double> d, u0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string a, b;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    d.push_back(std::stod(a));
    u0.push_back(std::stod(b));
  }
  REQUIRE(d.size() == 6);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == double(i + 1));
  for (std::size_t i = 1; i < u0.size(); ++i) CHECK(u0[i] < u0[i - 1]);
  CHECK(std::abs(u0.back() - 1.0) <= 1e-6);
  CHECK(slurp(tmp("sw") + ".sweep.csv") == r.out);

  r = sn_run({"sweep", "--d", "6,7,8"});
  CHECK(r.code == 0);
  CHECK(sn_run({"sweep"}).code == sn::cli::kExitUsage);
  CHECK(sn_run({"sweep", "--d-range", "3:5:1"}).code == 0);
}

TEST_CASE("environment default tolerance") {
  ::setenv("GS_DEFAULT_TOL", "1e-9", 1);
  sn_run({"lane-emden", "--d", "6", "--rmax", "10", "--out", tmp("env")});
  auto j = json::parse(slurp(tmp("env") + ".summary.json"));
  CHECK(j["config"]["abs_tol"].get<double>() == 1e-9);
  sn_run({"lane-emden", "--d", "6", "--rmax", "10", "--abs-tol", "1e-11", "--out", tmp("env")});
  j = json::parse(slurp(tmp("env") + ".summary.json"));
  CHECK(j["config"]["abs_tol"].get<double>() == 1e-11);
  CHECK(j["config"]["rel_tol"].get<double>() == 1e-9);
  ::setenv("GS_DEFAULT_TOL", "nope", 1);
  CHECK(sn_run({"lane-emden", "--d", "6", "--out", tmp("env")}).code == sn::cli::kExitUsage);
  ::unsetenv("GS_DEFAULT_TOL");
}
