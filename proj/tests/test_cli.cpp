// Copyright 2026 The tvobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tvobs/csv.hpp"
#include "tvobs/errors.hpp"
#include "tvobs/scenario.hpp"
#include "tvobs/svg.hpp"

namespace fs = std::filesystem;

using tvobs::ConfigError;
using tvobs::ScenarioConfig;
using tvobs::ScenarioResult;
using tvobs::Trajectory;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> parse_issues(const std::string& text) {
  try {
    tvobs::parse_config(text);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& issues,
                  const std::string& needle) {
  return std::any_of(issues.begin(), issues.end(), [&](const std::string& s) {
    return s.find(needle) != std::string::npos;
  });
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "tvobs_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

struct CmdResult {
  int status = -1;
  std::string output;
};

CmdResult run_cmd(const std::string& args) {
  static int counter = 0;
  const fs::path log = fs::temp_directory_path() / "tvobs_cli_tests" /
                       ("cmd" + std::to_string(counter++) + ".log");
  fs::create_directories(log.parent_path());
  const std::string cmd =
      std::string(TVOBS_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  CmdResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.output = slurp(log.string());
  return r;
}

const char kMinimalScenario[] =
    "[system]\n"
    "n = 1\n"
    "A0 = -1\n"
    "B = 1\n"
    "C = 1\n"
    "[gains]\n"
    "G = 0\n"
    "N = 1\n"
    "L = 0\n"
    "M = -1\n";

// Scalar plant with the varying entry on its only diagonal position; the
// gains cancel the output coupling exactly, so x_hat starts on the plant.
std::string scalar_theta_scenario(double horizon, double t1) {
  std::ostringstream ss;
  ss << "[system]\n"
        "n = 1\n"
        "A0 = -1\n"
        "B = 1\n"
        "C = 1\n"
        "theta1.row = 1\n"
        "theta1.col = 1\n"
        "theta1.omega = 2\n"
        "theta1.l = 0.8, 0.3\n"
        "[gains]\n"
        "G = 1\n"
        "N = 0\n"
        "L = 1\n"
        "M = 0\n"
        "[input]\n"
        "u = 2\n"
        "[sim]\n"
        "dt = 0.001\n"
     << "horizon = " << horizon << "\n"
     << "x0 = 2\n"
        "[estimator]\n"
        "lambda = 2\n"
        "gamma1 = 100\n"
     << "T1 = " << t1 << "\n";
  return ss.str();
}

}  // namespace

TEST_CASE("embedded scenarios match the shipped files") {
  const std::string dir = TVOBS_SCENARIO_DIR;
  CHECK(slurp(dir + "/reference.scenario") == tvobs::kReferenceScenario);
  CHECK(slurp(dir + "/triple.scenario") == tvobs::kTripleScenario);
}

TEST_CASE("reference scenario parses to the documented configuration") {
  const ScenarioConfig cfg = tvobs::parse_config(tvobs::kReferenceScenario);
  CHECK(cfg.n == 2);
  CHECK(cfg.A0.at(0, 1).str() ==
        "0.1 - 0.1*sin(t) + 0.1*sin(5*t) + 1.5*cos(5*t)");
  CHECK(cfg.A0.at(1, 1).str() == "-1 + 0.5*cos(2*t)");
  CHECK(cfg.C(0) == 1.0);
  CHECK(cfg.C(1) == 1.0);
  REQUIRE(cfg.thetas.size() == 1);
  CHECK(cfg.thetas[0] == tvobs::ThetaSpec{1, 1, 3.0, 3.0, 0.5});
  CHECK(cfg.G(0) == 1.0);
  CHECK(cfg.G(1) == 0.0);
  CHECK(cfg.N(0) == -4.0);
  CHECK(cfg.u.str() == "sin(t) - 2");
  CHECK(cfg.t0 == 0.0);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.horizon == 60.0);
  CHECK(cfg.x0(0) == 2.0);
  CHECK(cfg.x0(1) == -1.0);
  CHECK(cfg.noise == 0.0);
  CHECK(cfg.lambda == 2.0);
  CHECK(cfg.gamma1 == 100.0);
  CHECK(cfg.lambda1 == 10.0);
  CHECK(cfg.lambda2 == 1.0);
  CHECK(cfg.gamma2 == 1e-8);
  CHECK(cfg.eps_div == 1e-6);
  CHECK(cfg.T1 == 40.0);
  CHECK(cfg.mode == "replay");
  CHECK(cfg.decimate == 10);
}

TEST_CASE("omitted keys take their defaults") {
  const ScenarioConfig cfg = tvobs::parse_config(kMinimalScenario);
  CHECK(cfg.n == 1);
  CHECK(cfg.thetas.empty());
  CHECK(cfg.u.str() == "sin(t)");
  CHECK(cfg.t0 == 0.0);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.horizon == 60.0);
  CHECK(cfg.x0(0) == 1.0);
  CHECK(cfg.z0(0) == 0.0);
  CHECK(cfg.noise == 0.0);
  CHECK(cfg.lambda == 10.0);
  CHECK(cfg.gamma1 == 50.0);
  CHECK(cfg.lambda1 == 10.0);
  CHECK(cfg.lambda2 == 1.0);
  CHECK(cfg.gamma2 == 10.0);
  CHECK(cfg.eps_div == 1e-6);
  CHECK(cfg.T1 == 40.0);
  CHECK(cfg.mode == "replay");
  CHECK(cfg.decimate == 1);
}

TEST_CASE("an empty configuration reports every missing key at once") {
  try {
    tvobs::parse_config("");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& issues = e.issues();
    CHECK(issues.size() >= 8);
    for (const char* key :
         {"system.n", "system.A0", "system.B", "system.C", "gains.G",
          "gains.N", "gains.L", "gains.M"}) {
      CAPTURE(key);
      CHECK(any_contains(issues, std::string(key) + ": missing required key"));
    }
    CHECK(std::string(e.what()).find("configuration invalid") !=
          std::string::npos);
  }
}

TEST_CASE("diagnostics carry the key and the line") {
  std::string text(kMinimalScenario);
  text += "[sim]\ndt = abc\n";  // kMinimalScenario spans lines 1..10
  CHECK(any_contains(parse_issues(text),
                     "sim.dt (line 12): expected a number, got \"abc\""));

  std::string shape(kMinimalScenario);
  shape.replace(shape.find("M = -1"), 6, "M = -1, 0");
  CHECK(any_contains(parse_issues(shape), "gains.M (line 10): expected 1x1, got 1x2"));

  std::string dup(kMinimalScenario);
  dup.insert(dup.find("A0 = -1"), "n = 2\n");  // second n inside [system]
  CHECK(any_contains(parse_issues(dup), "system.n (line 3): duplicate key"));

  std::string unknown(kMinimalScenario);
  unknown += "flux = 3\n";  // appended lines continue the [gains] section
  CHECK(any_contains(parse_issues(unknown), "gains.flux (line 11): unknown key"));

  CHECK(any_contains(parse_issues(std::string("[bogus]\nx = 1\n") + kMinimalScenario),
                     "line 1: unknown section [bogus]"));

  CHECK(any_contains(parse_issues(std::string("n = 1\n") + kMinimalScenario),
                     "line 1: key outside any section"));

  std::string ragged(kMinimalScenario);
  ragged.replace(ragged.find("A0 = -1"), 7, "A0 = -1, 0 ; 1");
  CHECK(any_contains(parse_issues(ragged), "rows have different lengths"));

  std::string varying(kMinimalScenario);
  varying.replace(varying.find("C = 1\n"), 6, "C = t\n");
  CHECK(any_contains(parse_issues(varying), "entries must be constant"));

  std::string badexpr(kMinimalScenario);
  badexpr.replace(badexpr.find("A0 = -1"), 7, "A0 = sin(");
  CHECK(any_contains(parse_issues(badexpr), "entry (1,1)"));
}

TEST_CASE("varying entry validation") {
  // Theta keys belong to [system]; splice them in before the gains.
  auto with_theta = [](const std::string& lines) {
    std::string text(kMinimalScenario);
    text.insert(text.find("[gains]"), lines);
    return text;
  };

  const std::string above = with_theta(
      "theta1.row = 1\n"
      "theta1.col = 2\n"
      "theta1.omega = 2\n"
      "theta1.l = 1, 0\n");
  CHECK(any_contains(parse_issues(above), "must satisfy 1 <= col <= row"));

  const std::string negative = with_theta(
      "theta1.row = 1\n"
      "theta1.col = 1\n"
      "theta1.omega = -2\n"
      "theta1.l = 1, 0\n");
  CHECK(any_contains(parse_issues(negative), "theta1.omega"));
  CHECK(any_contains(parse_issues(negative), "must be positive"));

  const char* dup =
      "[system]\n"
      "n = 2\n"
      "A0 = 0, 0 ; 0, -1\n"
      "B = 1 ; 1\n"
      "C = 1, 0\n"
      "theta1.row = 1\ntheta1.col = 1\ntheta1.omega = 2\ntheta1.l = 1, 0\n"
      "theta2.row = 1\ntheta2.col = 1\ntheta2.omega = 3\ntheta2.l = 1, 0\n"
      "[gains]\n"
      "G = 0 ; 0\n"
      "N = 1 ; 1\n"
      "L = 0 ; 0\n"
      "M = 0, 0 ; 0, -1\n";
  CHECK(any_contains(parse_issues(dup), "duplicate varying entry for row 1"));
}

TEST_CASE("replay window must fit the horizon") {
  ScenarioConfig cfg = tvobs::parse_config(kMinimalScenario);
  cfg.T1 = 70.0;  // horizon is 60
  CHECK_THROWS_AS(tvobs::validate_config(cfg), ConfigError);
  try {
    tvobs::validate_config(cfg);
  } catch (const ConfigError& e) {
    CHECK(any_contains(e.issues(), "estimator.T1"));
    CHECK(any_contains(e.issues(), "(0, horizon] for replay mode"));
  }
  cfg.mode = "cascade";  // the window is a replay concept only
  CHECK_NOTHROW(tvobs::validate_config(cfg));

  cfg = tvobs::parse_config(kMinimalScenario);
  cfg.decimate = 0;
  CHECK_THROWS_AS(tvobs::validate_config(cfg), ConfigError);

  cfg = tvobs::parse_config(kMinimalScenario);
  cfg.mode = "sideways";
  CHECK_THROWS_AS(tvobs::validate_config(cfg), ConfigError);
}

TEST_CASE("configurations round-trip through the canonical printer") {
  for (const char* text : {tvobs::kReferenceScenario, tvobs::kTripleScenario,
                           kMinimalScenario}) {
    const ScenarioConfig cfg = tvobs::parse_config(text);
    const std::string printed = tvobs::print_config(cfg);
    const ScenarioConfig again = tvobs::parse_config(printed);
    CHECK(again == cfg);
    // The printer is itself a fixpoint.
    CHECK(tvobs::print_config(again) == printed);
  }
}

TEST_CASE("csv export writes a header plus decimated rows") {
  const fs::path dir = fresh_dir("csv");
  Trajectory traj;
  traj.t0 = 0.25;
  traj.dt = 0.5;
  traj.add("a", {1.0, 2.0, 3.0});
  traj.add("b", {-1.0, 1.0 / 3.0, 4.0});
  const std::string path = (dir / "small.csv").string();
  tvobs::export_csv(traj, path);
  const std::string text = slurp(path);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "t,a,b");
  std::getline(lines, line);
  CHECK(line == "0.25,1,-1");
  std::getline(lines, line);
  CHECK(line == "0.75,2,0.333333333");
  CHECK(std::count(text.begin(), text.end(), '\n') == 4);

  Trajectory long_traj;
  long_traj.dt = 1e-3;
  std::vector<double> ramp(1001);
  for (std::size_t k = 0; k < ramp.size(); ++k) ramp[k] = static_cast<double>(k);
  long_traj.add("v", std::move(ramp));
  const std::string decimated = (dir / "dec.csv").string();
  tvobs::export_csv(long_traj, decimated, 10);
  const std::string dec_text = slurp(decimated);
  CHECK(std::count(dec_text.begin(), dec_text.end(), '\n') == 102);

  CHECK(tvobs::format_sig9(0.0) == "0");
  CHECK(tvobs::format_sig9(-2.5) == "-2.5");
  CHECK(tvobs::format_sig9(std::sqrt(2.0)) == "1.41421356");
}

TEST_CASE("csv round-trips numerically") {
  const fs::path dir = fresh_dir("csv_rt");
  Trajectory traj;
  traj.t0 = 1.5;
  traj.dt = 0.125;
  traj.add("alpha", {0.0, 1e-8, -3.75, 2.0e17});
  traj.add("beta", {M_PI, -M_PI, 0.5, 1.0 / 7.0});
  const std::string path = (dir / "rt.csv").string();
  tvobs::export_csv(traj, path);
  const Trajectory back = tvobs::read_csv(path);
  CHECK(back.t0 == 1.5);
  CHECK(back.dt == 0.125);
  REQUIRE(back.samples() == 4);
  REQUIRE(back.names() == std::vector<std::string>{"alpha", "beta"});
  for (const std::string& name : back.names()) {
    for (std::size_t k = 0; k < 4; ++k) {
      const double want = traj.col(name)[k];
      CHECK(std::abs(back.col(name)[k] - want) <= 1e-8 * (1.0 + std::abs(want)));
    }
  }

  CHECK_THROWS_AS(tvobs::export_csv(traj, "/nonexistent-dir/x.csv"),
                  std::runtime_error);
}

TEST_CASE("line plots are deterministic files") {
  const fs::path dir = fresh_dir("svg");
  const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
  std::vector<tvobs::PlotSeries> series(2);
  series[0].label = "one";
  series[0].y = {1.0, -1.0, 2.0, 0.5};
  series[1].label = "two";
  series[1].y = {0.0, 0.0, 0.0, 0.0};  // flat series must not break scaling
  series[1].dashed = true;
  const std::string a = (dir / "a.svg").string();
  const std::string b = (dir / "b.svg").string();
  tvobs::write_line_plot(a, "demo", "t", "value", x, series);
  tvobs::write_line_plot(b, "demo", "t", "value", x, series);
  const std::string bytes = slurp(a);
  CHECK(bytes == slurp(b));
  CHECK(bytes.rfind("<svg", 0) == 0);
  CHECK(bytes.find("polyline") != std::string::npos);
  CHECK(bytes.find("demo") != std::string::npos);
  CHECK_THROWS_AS(tvobs::write_line_plot("/nonexistent-dir/p.svg", "x", "x",
                                         "x", x, series),
                  std::runtime_error);
}

TEST_CASE("reference run matches the pinned summary") {
  const ScenarioConfig cfg = tvobs::parse_config(tvobs::kReferenceScenario);
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  const tvobs::RunReport& rep = res.report;

  CHECK(rep.has_data);
  CHECK(rep.samples == 60001);
  CHECK(rep.mode == "replay");
  CHECK(rep.structure_ok);
  CHECK(rep.r1 == 0.0);
  CHECK(rep.r2 == 0.0);
  CHECK(rep.r3 < 1e-12);
  CHECK(rep.xerr_initial == doctest::Approx(std::sqrt(2.0)));
  CHECK(rep.xerr_final < 1e-12);
  CHECK(rep.xerr_tail_max < 1e-12);

  REQUIRE(rep.rows.size() == 1);
  const tvobs::RowIdent& row = rep.rows[0];
  CHECK(row.row == 1);
  CHECK(row.col == 1);
  CHECK(row.omega_true == 3.0);
  CHECK(std::abs(row.omega_hat - 3.0) < 1e-4);
  CHECK(std::abs(row.k_hat + 9.0) < 1e-3);
  CHECK(row.settle > 0.0);
  CHECK(row.settle < 40.0);
  CHECK(std::abs(row.l1_hat - 3.0) < 5e-3);
  CHECK(std::abs(row.l2_hat - 0.5) < 5e-3);
  CHECK(row.theta_rms_tail < 1e-3);
  CHECK(row.delta_min == 0.0);
  CHECK(row.delta_median > 1000.0);
  CHECK_FALSE(row.poor_excitation);
  CHECK(row.gated == 0);
  CHECK(std::abs(row.min_pivot - 1.0) < 1e-6);

  const std::string report = tvobs::format_report(rep);
  for (const char* needle :
       {"run report", "status: ok", "mode: replay", "samples: 60001",
        "conditions (grid [0, 10] step 0.01)", "structure: ok",
        "varying entry (row 1, column 1)", "true: omega 3, amplitudes (3, 0.5)",
        "gated samples: 0"}) {
    CAPTURE(needle);
    CHECK(report.find(needle) != std::string::npos);
  }

  const Trajectory view = tvobs::export_view(res.traj, cfg);
  CHECK(view.names() ==
        std::vector<std::string>{"x1", "x2", "xhat1", "xhat2", "xerr_norm",
                                 "y", "u", "theta_true1", "omega_hat", "k_hat",
                                 "l1_hat", "l2_hat", "theta_hat1", "delta"});

  const fs::path dir = fresh_dir("reference_csv");
  const std::string path = (dir / "trajectory.csv").string();
  tvobs::export_csv(view, path, cfg.decimate);
  const std::string text = slurp(path);
  const std::string header = text.substr(0, text.find('\n'));
  CHECK(header ==
        "t,x1,x2,xhat1,xhat2,xerr_norm,y,u,theta_true1,omega_hat,k_hat,"
        "l1_hat,l2_hat,theta_hat1,delta");
  const auto first_row_start = text.find('\n') + 1;
  const std::string row0 =
      text.substr(first_row_start, text.find('\n', first_row_start) - first_row_start);
  CHECK(row0 == "0,2,-1,1,0,1.41421356,1,-2,0.5,0,0,0,0,0,0");
  CHECK(std::count(text.begin(), text.end(), '\n') == 6002);
}

TEST_CASE("exported series reproduce the report") {
  const ScenarioConfig cfg = tvobs::parse_config(tvobs::kReferenceScenario);
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  const fs::path dir = fresh_dir("recompute");
  const std::string path = (dir / "full.csv").string();
  tvobs::export_csv(tvobs::export_view(res.traj, cfg), path, 1);
  const Trajectory back = tvobs::read_csv(path);
  REQUIRE(back.samples() == res.report.samples);

  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-7 * (1.0 + std::abs(b));
  };
  const tvobs::RowIdent& row = res.report.rows[0];
  CHECK(close(back.col("omega_hat").back(), row.omega_hat));
  CHECK(close(back.col("k_hat").back(), row.k_hat));
  CHECK(close(back.col("l1_hat").back(), row.l1_hat));
  CHECK(close(back.col("l2_hat").back(), row.l2_hat));
  CHECK(close(back.col("xerr_norm").front(), res.report.xerr_initial));
  CHECK(close(back.col("xerr_norm").back(), res.report.xerr_final));

  const std::size_t count = back.samples();
  const std::size_t tail = count * 4 / 5;
  double tail_max = 0.0, rms = 0.0;
  for (std::size_t k = tail; k < count; ++k) {
    tail_max = std::max(tail_max, back.col("xerr_norm")[k]);
    const double d = back.col("theta_true1")[k] - back.col("theta_hat1")[k];
    rms += d * d;
  }
  rms = std::sqrt(rms / static_cast<double>(count - tail));
  CHECK(close(tail_max, res.report.xerr_tail_max));
  CHECK(close(rms, row.theta_rms_tail));

  std::vector<double> deltas = back.col("delta");
  std::sort(deltas.begin(), deltas.end());
  CHECK(close(deltas.front(), row.delta_min));
  CHECK(close(deltas.back(), row.delta_max));
  CHECK(close(deltas[deltas.size() / 2], row.delta_median));

  // Settle: latest time after which the band |w - w_final| <= 0.05 holds.
  const auto& w = back.col("omega_hat");
  const double w_final = w.back();
  std::size_t k_v = count;
  for (std::size_t k = count; k-- > 0;) {
    if (std::abs(w[k] - w_final) > 0.05) {
      k_v = k;
      break;
    }
  }
  const double settle =
      k_v == count ? -1.0 : static_cast<double>(k_v + 1) * back.dt;
  CHECK(std::abs(settle - row.settle) < 1e-9);
}

TEST_CASE("cascade mode feeds the live frequency forward") {
  ScenarioConfig cfg = tvobs::parse_config(tvobs::kReferenceScenario);
  cfg.mode = "cascade";
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  const tvobs::RowIdent& row = res.report.rows[0];
  CHECK(res.report.mode == "cascade");
  CHECK(std::abs(row.omega_hat - 3.0) < 0.01);
  CHECK(std::abs(row.l1_hat - 3.0) < 0.05);
  CHECK(std::abs(row.l2_hat - 0.5) < 0.05);
}

TEST_CASE("below-diagonal entries run the swapped route") {
  const ScenarioConfig cfg = tvobs::parse_config(tvobs::kTripleScenario);
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  const tvobs::RunReport& rep = res.report;
  CHECK(rep.r1 == 0.0);
  CHECK(rep.r2 == 0.0);
  CHECK(rep.r3 == 0.0);
  CHECK(rep.xerr_final < 1e-12);
  REQUIRE(rep.rows.size() == 1);
  const tvobs::RowIdent& row = rep.rows[0];
  CHECK(row.row == 2);
  CHECK(row.col == 1);
  CHECK(std::abs(row.omega_hat - 2.0) < 0.05);
  CHECK(std::abs(row.l1_hat - 1.0) < 0.1);
  CHECK(std::abs(row.l2_hat + 0.5) < 0.1);
  // x_hat_1 starts at zero, inside the divide guard, so early samples gate.
  CHECK(row.min_pivot == 0.0);
  CHECK(row.gated > 0);
  CHECK(row.gated < 2000);
  CHECK(row.settle > 0.0);
}

TEST_CASE("scalar systems run the degenerate route end to end") {
  const ScenarioConfig cfg = tvobs::parse_config(scalar_theta_scenario(30.0, 25.0));
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  const tvobs::RunReport& rep = res.report;
  CHECK(rep.r1 == 0.0);
  CHECK(rep.r2 == 0.0);
  CHECK(rep.r3 == 0.0);
  // x_hat(0) = G*y(0) = x(0): the error is identically zero.
  CHECK(rep.xerr_initial == 0.0);
  CHECK(rep.xerr_tail_max < 1e-12);
  REQUIRE(rep.rows.size() == 1);
  const tvobs::RowIdent& row = rep.rows[0];
  CHECK(std::abs(row.omega_hat - 2.0) < 0.05);
  CHECK(row.gated == 0);
  CHECK(row.theta_rms_tail < 0.05);
}

TEST_CASE("zero horizon yields a declared, empty dataset") {
  ScenarioConfig cfg = tvobs::parse_config(tvobs::kReferenceScenario);
  cfg.horizon = 0.0;
  const ScenarioResult res = tvobs::execute_scenario(cfg);
  CHECK_FALSE(res.report.has_data);
  CHECK(res.traj.samples() == 0);
  CHECK(res.traj.has("omega_hat"));
  CHECK(res.traj.has("theta_hat1"));
  CHECK(tvobs::format_report(res.report).find("no trajectory data") !=
        std::string::npos);

  const fs::path dir = fresh_dir("zero_horizon");
  tvobs::run_scenario(cfg, dir.string());
  const std::string csv = slurp((dir / "trajectory.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1);
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "states.svg"));
}

TEST_CASE("batch runs every scenario in a directory") {
  const fs::path src = fresh_dir("batch_src");
  const fs::path out = fresh_dir("batch_out");
  std::ofstream(src / "a.scenario") << scalar_theta_scenario(2.0, 1.5);
  std::ofstream(src / "b.scenario") << scalar_theta_scenario(1.0, 0.5);
  std::ofstream(src / "notes.txt") << "ignored\n";
  const int count = tvobs::run_batch(src.string(), out.string());
  CHECK(count == 2);
  CHECK(fs::exists(out / "a" / "trajectory.csv"));
  CHECK(fs::exists(out / "a" / "report.txt"));
  CHECK(fs::exists(out / "b" / "trajectory.csv"));
}

TEST_CASE("the binary wires the subcommands") {
  const std::string dir = TVOBS_SCENARIO_DIR;
  const std::string reference = dir + "/reference.scenario";
  const fs::path work = fresh_dir("bin");

  CHECK(run_cmd("--help").status == 0);

  CmdResult ok = run_cmd("verify " + reference);
  CHECK(ok.status == 0);
  CHECK(ok.output.find("verification passed") != std::string::npos);
  CHECK(ok.output.find("r3 = ") != std::string::npos);

  // Breaking the input-channel gain breaks the first condition.
  std::string broken = slurp(reference);
  broken.replace(broken.find("N = -4 ; 4"), 10, "N = -4 ; 3");
  const fs::path broken_path = work / "broken.scenario";
  std::ofstream(broken_path) << broken;
  CmdResult bad = run_cmd("verify " + broken_path.string());
  CHECK(bad.status == 4);
  CHECK(bad.output.find("verification failed") != std::string::npos);
  CHECK(run_cmd("verify " + broken_path.string() + " --tol 2").status == 0);

  CHECK(run_cmd("verify " + work.string() + "/absent.scenario").status == 1);

  const fs::path invalid = work / "invalid.scenario";
  std::ofstream(invalid) << "[sim]\ndt = -1\n";
  CmdResult conf = run_cmd("verify " + invalid.string());
  CHECK(conf.status == 2);
  CHECK(conf.output.find("configuration error") != std::string::npos);

  const fs::path quick = work / "quick.scenario";
  std::ofstream(quick) << scalar_theta_scenario(2.0, 1.5);
  const fs::path run_out = work / "run_out";
  CmdResult run = run_cmd("run " + quick.string() + " --out " + run_out.string());
  CHECK(run.status == 0);
  CHECK(run.output.find("run report") != std::string::npos);
  CHECK(run.output.find("outputs written to") != std::string::npos);
  for (const char* name :
       {"trajectory.csv", "report.txt", "states.svg", "state_error.svg",
        "omega_error.svg", "amplitude_error.svg", "theta.svg",
        "theta_error.svg"}) {
    CAPTURE(name);
    CHECK(fs::exists(run_out / name));
  }

  // Overrides are re-validated: shrinking the horizon under T1 must fail.
  CHECK(run_cmd("run " + reference + " --horizon 2").status == 2);
  CHECK(run_cmd("run " + quick.string() + " --decimate 0").status == 2);
  CHECK(run_cmd("run " + quick.string() + " --mode sideways").status == 2);

  // A plant growing past the floating-point range stops with a timestamp.
  const fs::path exploding = work / "exploding.scenario";
  std::ofstream(exploding) << "[system]\n"
                              "n = 1\n"
                              "A0 = 1000\n"
                              "B = 1\n"
                              "C = 1\n"
                              "[gains]\n"
                              "G = 0\n"
                              "N = 1\n"
                              "L = 0\n"
                              "M = 1000\n"
                              "[sim]\n"
                              "horizon = 2\n"
                              "[estimator]\n"
                              "T1 = 1\n";
  CmdResult div = run_cmd("run " + exploding.string() + " --out " +
                          (work / "div_out").string());
  CHECK(div.status == 3);
  CHECK(div.output.find("error") != std::string::npos);

  const fs::path repro = work / "repro";
  CmdResult rp = run_cmd("reproduce-paper --out " + repro.string());
  CHECK(rp.status == 0);
  CHECK(fs::exists(repro / "trajectory.csv"));

  const fs::path batch_out = work / "batch";
  CmdResult batch = run_cmd("batch " + dir + " --out " + batch_out.string());
  CHECK(batch.status == 0);
  CHECK(batch.output.find("ran 2 scenarios") != std::string::npos);
  CHECK(fs::exists(batch_out / "reference" / "trajectory.csv"));
  CHECK(fs::exists(batch_out / "triple" / "trajectory.csv"));
}
