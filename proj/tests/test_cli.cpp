#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = wolbopt::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) {
  const char* dir = std::getenv("WOLBOPT_CONFIG_DIR");
  return (fs::path(dir ? dir : "configs") / name).string();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "wolbopt_test_cli" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

double J_from(const std::string& out) {
  const auto pos = out.find("J_T = ");
  REQUIRE(pos != std::string::npos);
  return std::stod(out.substr(pos + 6));
}

void check_header(const fs::path& p) {
  CAPTURE(p.string());
  CHECK(slurp(p).rfind("# wolbopt 0.1.0 config_hash=", 0) == 0);
}

}  // namespace

TEST_CASE("validate: bundled config passes and prints thresholds") {
  const auto r = run({"validate", "--config", config("default.ini")});
  CHECK(r.code == 0);
  CHECK(r.out.find("13/36") != std::string::npos);
  CHECK(r.out.find("theta_c = 0.57") != std::string::npos);
  CHECK(r.out.find("validate: ok") != std::string::npos);
}

TEST_CASE("validate: assumption failures exit 1 and name the check") {
  const auto r = run({"validate", "--config", config("default.ini"), "--override", "model.s_h=0.2",
                      "--override", "model.s_f=0.9"});
  CHECK(r.code == 1);
  CHECK(r.err.find("cond1") != std::string::npos);
}

TEST_CASE("validate: CFL failure exits 1") {
  CHECK(run({"validate", "--config", config("default.ini"), "--nt", "10"}).code == 1);
}

TEST_CASE("malformed configs exit 2") {
  const auto dir = scratch("bad_config");
  std::string text = slurp(config("default.ini"));
  std::ofstream(dir / "noK.ini") << text.substr(0, text.find("K = ")) << text.substr(text.find("D = "));
  const auto r = run({"validate", "--config", (dir / "noK.ini").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("missing field K in [model]") != std::string::npos);
  std::ofstream(dir / "unknown.ini") << text << "\n[grid]\nspacing = 3\n";
  CHECK(run({"validate", "--config", (dir / "unknown.ini").string()}).code == 2);
  CHECK(run({"validate", "--config", (dir / "absent.ini").string()}).code == 2);
  CHECK(run({"validate", "--config", config("default.ini"), "--override", "model.zeta=1"}).code == 2);
}

TEST_CASE("argument errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"analyze", "bogus"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("simulate: reference constant release") {
  const auto dir = scratch("sim_ref");
  const auto r = run({"simulate", "--config", config("reproduction.ini"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(J_from(r.out) == doctest::Approx(3.61e-2).epsilon(0.1));
  check_header(dir / "trajectory.csv");
  check_header(dir / "release.csv");
  const auto traj = slurp(dir / "trajectory.csv");
  CHECK(traj.find("\nx,t0,t10,t20,t30,t40\n") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "simulate_summary.json"));
  CHECK(j["J_T"].get<double>() == doctest::Approx(J_from(r.out)).epsilon(1e-11));
  CHECK(j.contains("config_hash"));
}

TEST_CASE("simulate: zero release gives half the domain length") {
  const auto dir = scratch("sim_zero");
  const auto r = run({"simulate", "--config", config("default.ini"), "--out", dir.string(), "--override",
                      "simulate.release=constant:0"});
  REQUIRE(r.code == 0);
  CHECK(J_from(r.out) == doctest::Approx(15.0));
}

TEST_CASE("simulate: subsolution bump beats the constant release of the same order") {
  const auto dir = scratch("sim_bump");
  const auto bump = run({"simulate", "--config", config("default.ini"), "--out", dir.string(), "--override",
                         "simulate.release=bump:0.65,15"});
  const auto flat = run({"simulate", "--config", config("default.ini"), "--out", dir.string(), "--override",
                         "simulate.release=constant:0.0266666666667"});
  REQUIRE(bump.code == 0);
  REQUIRE(flat.code == 0);
  CHECK(J_from(bump.out) < J_from(flat.out));
}

TEST_CASE("simulate: profile CSV input") {
  const auto dir = scratch("sim_csv");
  {
    std::ofstream os(dir / "u.csv");
    os << "x,u\n";
    for (int i = 0; i <= 20; ++i) os << 1.5 * i << ",0.03\n";
  }
  const auto ok = run({"simulate", "--config", config("reproduction.ini"), "--out", dir.string(), "--override",
                       "simulate.release=csv:" + (dir / "u.csv").string()});
  REQUIRE(ok.code == 0);
  CHECK(J_from(ok.out) == doctest::Approx(3.61e-2).epsilon(0.1));
  std::ofstream(dir / "bad.csv") << "0.1\nabc\n";
  CHECK(run({"simulate", "--config", config("default.ini"), "--out", dir.string(), "--override",
             "simulate.release=csv:" + (dir / "bad.csv").string()})
            .code == 2);
  CHECK(run({"simulate", "--config", config("default.ini"), "--out", dir.string(), "--override",
             "simulate.release=csv:" + (dir / "missing.csv").string()})
            .code == 2);
}

TEST_CASE("simulate: outputs are byte-identical across runs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(run({"simulate", "--config", config("default.ini"), "--out", a.string()}).code == 0);
  REQUIRE(run({"simulate", "--config", config("default.ini"), "--out", b.string()}).code == 0);
  for (const char* f : {"trajectory.csv", "release.csv", "simulate_summary.json"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("optimize: writes results for both methods") {
  const auto dir = scratch("opt");
  const auto r = run({"optimize", "--config", config("reproduction.ini"), "--out", dir.string(), "--override",
                      "grid.layout=padded"});
  REQUIRE(r.code == 0);
  for (const char* f : {"u_star_uzawa.csv", "u_star_multistart.csv", "history_uzawa.csv", "multistart_runs.csv"})
    check_header(dir / f);
  const auto j = nlohmann::json::parse(slurp(dir / "summary_multistart.json"));
  for (const char* k : {"J", "lambda", "residual", "iterations", "init_label"}) CHECK(j.contains(k));
  CHECK(j["J"].get<double>() <= 2.7);
  const auto u = nlohmann::json::parse(slurp(dir / "summary_uzawa.json"));
  CHECK(u["J"].get<double>() <= 12.8);
  CHECK(u["converged"].get<bool>() == (u["residual"].get<double>() <= 1e-6));
}

TEST_CASE("table3 writes the six rows") {
  const auto dir = scratch("table3");
  const auto r = run({"table3", "--config", config("reproduction.ini"), "--out", dir.string()});
  REQUIRE(r.code == 0);
  std::istringstream is(slurp(dir / "table3.csv"));
  std::string line;
  std::getline(is, line);
  CHECK(line.rfind("# wolbopt", 0) == 0);
  std::getline(is, line);
  CHECK(line == "M,C,J_multistart,J_uzawa,J_T_M,J_T_C_over_L,best_init");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 6);
}

TEST_CASE("asymptotics and analyze reports") {
  const auto dir = scratch("reports");
  const auto a = run({"asymptotics", "--config", config("default.ini"), "--out", dir.string()});
  REQUIRE(a.code == 0);
  check_header(dir / "asymptotics.csv");
  const auto s = run({"analyze", "spectral", "--config", config("default.ini"), "--out", dir.string()});
  REQUIRE(s.code == 0);
  const auto spec = slurp(dir / "spectral.csv");
  CHECK(spec.find("\nn,lambda_n,delta_n\n") != std::string::npos);
  CHECK(spec.find("\nK_T,,") != std::string::npos);
  const auto all = run({"analyze", "all", "--config", config("default.ini"), "--out", dir.string()});
  REQUIRE(all.code == 0);
  for (const char* f : {"constant_ode.csv", "subsolution_sweep.csv", "subsolution_profile.csv"}) check_header(dir / f);
  CHECK(slurp(dir / "subsolution_profile.csv").find("\nx,w_alpha\n") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "nonoptimality.json"));
  CHECK(j.contains("config_hash"));
}
