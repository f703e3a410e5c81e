#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "hcert/config.hpp"
#include "hcert/mlf.hpp"
#include "hcert/report.hpp"
#include "hcert/run.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace hcert;
using namespace hcert::cli;
using nlohmann::json;

namespace {

json minimal_positive() {
  return json::parse(R"({
    "analysis": "positive", "alpha": 0.5, "dim": 1, "tau": 1,
    "A": "-1", "B": "0", "q": "1", "phi": ["1"],
    "scan": {"t_max": 20, "n_points": 201},
    "solver": {"t_end": 3, "h": 0.01}
  })");
}

std::vector<std::string> issues_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hcert_test_" + tag + "_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_json(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("golden configs load") {
  const RunConfig a = support::golden("positive_three_state.json");
  CHECK(a.analysis == Analysis::Positive);
  CHECK(a.dim == 3);
  CHECK(a.A.size() == 9);
  CHECK(a.amplitude == 1.2);
  const RunConfig b = support::golden("positive_two_state.json");
  CHECK(b.a_bounded == true);
  const RunConfig c = support::golden("lmi_scalar.json");
  CHECK(c.analysis == Analysis::Lmi);
  CHECK(c.gamma);
  CHECK(c.sigma);
  const RunConfig s = support::golden("scalar_halanay.json");
  CHECK(s.analysis == Analysis::HalanayScalar);
  CHECK(s.b.size() == 2);
  CHECK(s.q.size() == 2);
}

TEST_CASE("matrix forms") {
  json j = minimal_positive();
  j["dim"] = 2;
  j["A"] = json::array({json::array({"-1", 0.5}), json::array({0, "-2"})});
  j["B"] = json::array({0.1, 0, 0, 0.1});
  j["phi"] = json::array({"1", "s"});
  const RunConfig cfg = parse_config(j);
  CHECK(cfg.A[1](0.0) == 0.5);
  CHECK(cfg.A[3](0.0) == -2.0);
  CHECK(cfg.B[3](0.0) == 0.1);
  CHECK(cfg.phi[1](-0.5) == -0.5);
}

TEST_CASE("invalid configs list every offending field") {
  json j = minimal_positive();
  j["alpha"] = 1.5;
  CHECK(any_contains(issues_of(j), "alpha"));

  j = minimal_positive();
  j["analysis"] = "lmi";
  j["sigma"] = "0.1";
  CHECK(any_contains(issues_of(j), "gamma"));

  j = minimal_positive();
  j["alpha"] = 0.0;
  j["tau"] = -1;
  j["A"] = "t +";
  j["colour"] = "red";
  const auto issues = issues_of(j);
  CHECK(issues.size() >= 4);
  CHECK(any_contains(issues, "alpha"));
  CHECK(any_contains(issues, "tau"));
  CHECK(any_contains(issues, "A"));
  CHECK(any_contains(issues, "colour"));

  j = minimal_positive();
  j["dim"] = 2;
  CHECK(any_contains(issues_of(j), "phi"));

  j = minimal_positive();
  j["analysis"] = "lmi";
  j["gamma"] = "1";
  j["sigma"] = "0.5";
  j["amplitude"] = 2.0;
  CHECK(any_contains(issues_of(j), "amplitude"));

  j = minimal_positive();
  j["solver"]["h"] = 0.0;
  CHECK_FALSE(issues_of(j).empty());

  j = minimal_positive();
  j["analysis"] = "halanay-scalar";
  j["a"] = "1";
  j["b"] = json::array({"0.1", "0.2"});
  j["q"] = json::array({"1"});
  CHECK_FALSE(issues_of(j).empty());

  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), InputError);
}

TEST_CASE("config error message names the field") {
  json j = minimal_positive();
  j["alpha"] = 1.5;
  try {
    parse_config(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("alpha") != std::string::npos);
  }
}

TEST_CASE("config round trip") {
  for (const char* name : {"positive_three_state.json", "positive_two_state.json", "lmi_scalar.json", "scalar_halanay.json"}) {
    const RunConfig cfg = support::golden(name);
    const RunConfig again = parse_config(to_json(cfg));
    CHECK_MESSAGE(again == cfg, name);
    CHECK(to_json(again) == to_json(cfg));
  }
}

TEST_CASE("report numbers carry 17 significant digits") {
  const json j = {{"x", 0.1}, {"n", 3}, {"w", 2.0}, {"bad", INFINITY}, {"v", json::array({1.0 / 3.0})}};
  const std::string s = dump_report(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("0.33333333333333331") != std::string::npos);
  CHECK(s.find("\"w\": 2.0") != std::string::npos);
  CHECK(s.find("\"n\": 3") != std::string::npos);
  CHECK(s.find("\"bad\": null") != std::string::npos);
  const json back = json::parse(s);
  CHECK(back["x"].get<double>() == 0.1);
  CHECK(back["v"][0].get<double>() == 1.0 / 3.0);
}

TEST_CASE("relaxation run reproduces the Mittag-Leffler function") {
  TempDir tmp("sim");
  const RunConfig cfg = parse_config(minimal_positive());
  const RunResult r = verify(cfg, tmp.path);
  CHECK(r.exit_code == kExitPass);
  const json& cert = r.report["certificate"];
  CHECK(cert["case"] == "BOUNDED_GAP");
  // with no delayed term lambda* = a = 1, so the envelope is E_a(-t^a) itself
  CHECK(cert["lambda_star"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

  std::ifstream csv(tmp.path / "trajectory.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "t,x1,norm_l1,norm_l2,envelope,ratio");
  while (std::getline(csv, line)) {
    std::stringstream ls(line);
    std::string t, x;
    std::getline(ls, t, ',');
    std::getline(ls, x, ',');
    const double tv = std::stod(t);
    const double want = mlf::mittag_leffler(mlf::FractionalOrder(0.5), -std::sqrt(tv));
    CHECK(std::stod(x) == doctest::Approx(want).epsilon(3e-3));
  }
  CHECK(fs::exists(tmp.path / "trajectory.gp"));
  CHECK(fs::exists(tmp.path / "report.json"));
}

TEST_CASE("run_command exit codes") {
  TempDir tmp("exit");
  std::ostringstream out, err;

  const fs::path good = write_json(tmp.path, "good.json", minimal_positive());
  CHECK(run_command("certify", good, tmp.path, out, err) == kExitPass);
  CHECK(run_command("simulate", good, tmp.path, out, err) == kExitPass);
  CHECK(run_command("verify", good, tmp.path, out, err) == kExitPass);

  json unstable = minimal_positive();
  unstable["A"] = "0.1";
  const fs::path bad = write_json(tmp.path, "unstable.json", unstable);
  CHECK(run_command("certify", bad, tmp.path, out, err) == kExitViolation);
  CHECK(run_command("verify", bad, tmp.path, out, err) == kExitViolation);

  // the envelope is the exact solution here, so with zero slack the
  // discretization error alone pushes the ratio above 1
  json tight = minimal_positive();
  tight["solver"]["tolerance"] = 0.0;
  tight["solver"]["h"] = 0.1;
  const fs::path viol = write_json(tmp.path, "tight.json", tight);
  CHECK(run_command("verify", viol, tmp.path, out, err) == kExitViolation);

  json negative_tol = minimal_positive();
  negative_tol["solver"]["tolerance"] = -0.5;
  const fs::path neg = write_json(tmp.path, "neg.json", negative_tol);
  CHECK(run_command("verify", neg, tmp.path, out, err) == kExitInputError);

  json lmi = minimal_positive();
  lmi["analysis"] = "lmi";
  lmi["gamma"] = "1";
  lmi["sigma"] = "1.5";  // sigma/gamma >= 1
  const fs::path infeasible = write_json(tmp.path, "lmi.json", lmi);
  std::ostringstream lmi_err;
  CHECK(run_command("certify", infeasible, tmp.path, out, lmi_err) == kExitViolation);
  CHECK(lmi_err.str().find("sigma/gamma") != std::string::npos);

  json invalid = minimal_positive();
  invalid["alpha"] = 1.5;
  const fs::path inv = write_json(tmp.path, "invalid.json", invalid);
  std::ostringstream inv_err;
  CHECK(run_command("certify", inv, tmp.path, out, inv_err) == kExitInputError);
  CHECK(inv_err.str().find("alpha") != std::string::npos);

  CHECK(run_command("certify", tmp.path / "missing.json", tmp.path, out, err) == kExitInputError);
  CHECK(run_command("frobnicate", good, tmp.path, out, err) == kExitInputError);

  const fs::path scalar = support::config_path("scalar_halanay.json");
  CHECK(run_command("certify", scalar, tmp.path, out, err) == kExitPass);
  CHECK(run_command("simulate", scalar, tmp.path, out, err) == kExitInputError);

  json blowup = minimal_positive();
  blowup["alpha"] = 1.0;
  blowup["A"] = "60";
  blowup["solver"]["t_end"] = 20;
  const fs::path bl = write_json(tmp.path, "blowup.json", blowup);
  CHECK(run_command("simulate", bl, tmp.path, out, err) == kExitViolation);
}

TEST_CASE("report layout") {
  TempDir tmp("report");
  const RunConfig cfg = support::golden("positive_two_state.json");
  const RunResult r = verify(cfg, tmp.path);
  REQUIRE(r.exit_code == kExitPass);
  const std::string text = slurp(tmp.path / cfg.output.report_path);
  const json j = json::parse(text);
  CHECK(j["tool"]["name"] == "halanay-certify");
  CHECK(j["command"] == "verify");
  CHECK(j["analysis"] == "positive");
  CHECK(j["exit_code"] == 0);
  CHECK(j["verdict"]["kind"] == "positivity");
  CHECK(j["certificate"]["case"] == "BOUNDED_GAP");
  CHECK(j["envelope_check"]["pass"] == true);
  CHECK(j["simulation"]["steps"] == 2000);
  CHECK(j["envelope_check"]["norm"] == "l1");
  // every non-integer real is written with 17 significant digits
  const std::regex real(R"((-?\d+\.\d+(?:[eE][-+]?\d+)?))");
  int long_reals = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), real); it != std::sregex_iterator(); ++it) {
    const std::string m = (*it)[1].str();
    const double v = std::stod(m);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (std::string(buf).find('.') != std::string::npos) {
      CHECK(m == std::string(buf));
      ++long_reals;
    }
  }
  CHECK(long_reals > 5);
}

TEST_CASE("gnuplot script") {
  TempDir tmp("plot");
  const RunConfig cfg = support::golden("positive_three_state.json");
  RunConfig shorter = cfg;
  shorter.solver.t_end = 2.0;
  const RunResult r = simulate(shorter, tmp.path);
  CHECK(r.exit_code == kExitPass);
  const std::string gp = slurp(tmp.path / "positive_three_state.gp");
  CHECK(gp.find("set datafile separator ','") != std::string::npos);
  CHECK(gp.find("'positive_three_state.csv'") != std::string::npos);
  CHECK(gp.find("title 'x3'") != std::string::npos);
  CHECK(gp.find("using 1:7 ") != std::string::npos);  // envelope column for d = 3
  CHECK(gp.find("title 'envelope'") != std::string::npos);

  // CSV without envelope values: state curves only
  const fs::path plain = tmp.path / "plain.csv";
  std::ofstream(plain) << "t,x1,norm_l1,norm_l2,envelope,ratio\n0,1,1,1,nan,nan\n0.1,0.9,0.9,0.9,nan,nan\n";
  emit_plot_script(plain, tmp.path / "plain.gp");
  const std::string pgp = slurp(tmp.path / "plain.gp");
  CHECK(pgp.find("title 'x1'") != std::string::npos);
  CHECK(pgp.find("envelope") == std::string::npos);

  const fs::path empty = tmp.path / "empty.csv";
  std::ofstream(empty) << "t,x1,norm_l1,norm_l2,envelope,ratio\n";
  CHECK_THROWS_AS(emit_plot_script(empty, tmp.path / "empty.gp"), InputError);
  const fs::path junk = tmp.path / "junk.csv";
  std::ofstream(junk) << "a,b\n1,2\n";
  CHECK_THROWS_AS(emit_plot_script(junk, tmp.path / "junk.gp"), InputError);
  CHECK_THROWS_AS(emit_plot_script(tmp.path / "nope.csv", tmp.path / "nope.gp"), InputError);
}

TEST_CASE("mlf subcommand") {
  std::ostringstream out, err;
  CHECK(run_mlf(0.65, 1.0, -0.0784, out, err) == kExitPass);
  CHECK(out.str().rfind("0.9179", 0) == 0);
  CHECK(std::stod(out.str()) == mlf::mittag_leffler(0.65, 1.0, -0.0784));
  std::ostringstream out2, err2;
  CHECK(run_mlf(1.5, 1.0, 0.5, out2, err2) == kExitInputError);
  CHECK_FALSE(err2.str().empty());
}
