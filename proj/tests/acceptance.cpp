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

// End-to-end acceptance gate. Each criterion prints one PASS/FAIL line;
// the exit status is the number of failures. Tolerances are fixed here
// and are not read from anywhere else.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tvobs/filters.hpp"
#include "tvobs/ident.hpp"
#include "tvobs/observer.hpp"
#include "tvobs/scenario.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

// Closed-form response of gain*p^k/(p+lambda)^m to a unit step.
double step_response(int k, double lam, int m, double g, double t) {
  const double e = std::exp(-lam * t);
  if (m == 1) {
    if (k == 0) return g / lam * (1.0 - e);
    return g * e;  // k == 1
  }
  // m == 3
  switch (k) {
    case 0:
      return g / (lam * lam * lam) *
             (1.0 - e * (1.0 + lam * t + 0.5 * lam * lam * t * t));
    case 1:
      return g * 0.5 * t * t * e;
    case 2:
      return g * (t - 0.5 * lam * t * t) * e;
    default:
      return g * (1.0 - 2.0 * lam * t + 0.5 * lam * lam * t * t) * e;
  }
}

double sup_step_error(int k, double lam, int m, double g, double dt,
                      double t_end) {
  tvobs::SisoFilter f = tvobs::make_lambda_filter(k, lam, m, g);
  const auto count = static_cast<std::size_t>(std::llround(t_end / dt));
  double sup = 0.0;
  for (std::size_t i = 0; i <= count; ++i) {
    const double y = f.step(1.0, dt);
    sup = std::max(sup,
                   std::abs(y - step_response(k, lam, m, g,
                                              static_cast<double>(i) * dt)));
  }
  return sup;
}

// Steady-state amplitude of the response to sin(omega*t), by least squares
// against sin/cos over [t_lo, t_hi]. Reads through step_aligned, the
// emission the identification pipelines use; for k = m the plain read
// carries a half-sample direct-term bias.
double fitted_amplitude(int k, double lam, int m, double g, double omega,
                        double dt, double t_lo, double t_hi) {
  tvobs::SisoFilter f = tvobs::make_lambda_filter(k, lam, m, g);
  const auto count = static_cast<std::size_t>(std::llround(t_hi / dt));
  double ss = 0.0, sc = 0.0, cc = 0.0, sy = 0.0, cy = 0.0;
  for (std::size_t i = 0; i <= count; ++i) {
    const double t = static_cast<double>(i) * dt;
    const double y = f.step_aligned(std::sin(omega * t), dt);
    if (t < t_lo) continue;
    const double s = std::sin(omega * t), c = std::cos(omega * t);
    ss += s * s;
    sc += s * c;
    cc += c * c;
    sy += s * y;
    cy += c * y;
  }
  const double det = ss * cc - sc * sc;
  const double a = (cc * sy - sc * cy) / det;
  const double b = (ss * cy - sc * sy) / det;
  return std::hypot(a, b);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) return "<unreadable:" + path.string() + ">";
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_binary(const std::string& args) {
  const std::string cmd =
      std::string(TVOBS_BIN) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

// --- criteria -------------------------------------------------------------

Outcome criterion_conditions() {
  const tvobs::ScenarioConfig cfg =
      tvobs::parse_config(tvobs::kReferenceScenario);
  const tvobs::LtvSystem sys = tvobs::make_system(cfg);
  const tvobs::ObserverGains gains = tvobs::make_gains(cfg);
  const auto start = std::chrono::steady_clock::now();
  const tvobs::ConditionReport rep =
      tvobs::verify_conditions(sys, gains, 0.0, 10.0, 0.01);
  const double wall = seconds_since(start);
  const bool pass =
      rep.r1 < 1e-12 && rep.r2 < 1e-12 && rep.r3 < 1e-12 && wall < 1.0;
  return {pass, fmt("r1 %.2e, r2 %.2e, r3 %.2e, %.2f s", rep.r1, rep.r2,
                    rep.r3, wall)};
}

Outcome criterion_error_decay(const tvobs::ScenarioResult& res, double wall) {
  const auto& xerr = res.traj.col("xerr_norm");
  const double ratio = xerr[20000] / xerr[0];
  double tail = 0.0;
  for (std::size_t k = 40000; k < xerr.size(); ++k)
    tail = std::max(tail, xerr[k]);
  const bool pass = ratio <= 0.01 && tail < 1e-2 && wall < 10.0;
  return {pass, fmt("decay ratio %.2e at t=20, max error %.2e on [40, 60], "
                    "%.2f s",
                    ratio, tail, wall)};
}

Outcome criterion_frequency(const tvobs::ScenarioResult& res) {
  const auto& w = res.traj.col("omega_hat");
  double worst = 0.0;
  for (std::size_t k = 30000; k <= 40000; ++k)
    worst = std::max(worst, std::abs(w[k] - 3.0));
  const double k_hat = res.report.rows[0].k_hat;
  const bool pass = worst < 0.05 && k_hat >= -9.3 && k_hat <= -8.7;
  return {pass, fmt("max |omega_hat - 3| %.2e on [30, 40], k_hat %.4f", worst,
                    k_hat)};
}

Outcome criterion_amplitudes(const tvobs::ScenarioResult& res) {
  const auto& l1 = res.traj.col("l1_hat");
  const auto& l2 = res.traj.col("l2_hat");
  double worst = 0.0;
  for (std::size_t k = 45000; k < l1.size(); ++k) {
    worst = std::max(worst, std::abs(l1[k] - 3.0));
    worst = std::max(worst, std::abs(l2[k] - 0.5));
  }
  return {worst < 0.05, fmt("max amplitude error %.2e on [45, 60]", worst)};
}

Outcome criterion_theta(const tvobs::ScenarioResult& res) {
  const double rms = res.report.rows[0].theta_rms_tail;
  return {rms < 0.15, fmt("theta rms over tail 20%% = %.2e", rms)};
}

// The oracle cases run the family at its operating gain g = lambda. The
// first-order sinusoid uses k = 0; for k = m = 1 the held-input
// reconstruction floor lam^2*dt^2/12 sits above 1e-6, which is why that
// slot is covered by the ramp check in the filters test suite instead.
Outcome criterion_filters() {
  const double dt = 1e-3, lam = 10.0, g = 10.0;
  double worst1 = 0.0, worst3 = 0.0;
  for (int k = 0; k <= 1; ++k)
    worst1 = std::max(worst1, sup_step_error(k, lam, 1, g, dt, 2.0));
  for (int k = 0; k <= 3; ++k)
    worst3 = std::max(worst3, sup_step_error(k, lam, 3, g, dt, 2.0));

  const double den1 = std::sqrt(4.0 + lam * lam);  // |j*2 + lam|
  worst1 = std::max(
      worst1, std::abs(fitted_amplitude(0, lam, 1, g, 2.0, dt, 3.0, 9.0) -
                       g / den1));
  for (int k = 0; k <= 3; ++k) {
    const double expect = g * std::pow(2.0, k) / std::pow(den1, 3);
    const double fit = fitted_amplitude(k, lam, 3, g, 2.0, dt, 3.0, 9.0);
    worst3 = std::max(worst3, std::abs(fit - expect));
  }
  const bool pass = worst1 < 1e-6 && worst3 < 1e-4;
  return {pass, fmt("first order off by %.2e (tol 1e-6), third order by %.2e "
                    "(tol 1e-4)",
                    worst1, worst3)};
}

Outcome criterion_swapping() {
  const double dt = 1e-3, lam = 10.0;
  const std::size_t count = 10001;
  std::vector<double> x_i(count), x_s(count), dx_s(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    x_i[k] = std::sin(t);
    x_s[k] = 2.0 + std::cos(t);
    dx_s[k] = -std::sin(t);
  }
  const std::vector<double> rhs =
      tvobs::swapping_regressor(x_i, x_s, dx_s, lam, dt);
  tvobs::SisoFilter direct = tvobs::make_lambda_filter(0, lam, 1, lam);
  double sup = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double lhs = direct.step(std::cos(t) / x_s[k], dt);
    if (t >= 3.0 / lam) sup = std::max(sup, std::abs(lhs - rhs[k]));
  }
  return {sup < 1e-3, fmt("sup |direct - swapped| %.2e after t = 0.3", sup)};
}

Outcome criterion_mixing() {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Matrix2d m;
    m << dist(rng), dist(rng), dist(rng), dist(rng);
    const Eigen::Matrix2d lhs = tvobs::adjugate2(m) * m;
    const Eigen::Matrix2d want = m.determinant() * Eigen::Matrix2d::Identity();
    const double scale = 1.0 + std::abs(m.determinant());
    worst = std::max(worst, (lhs - want).cwiseAbs().maxCoeff() / scale);
  }
  const bool adj_ok = worst < 1e-12;

  // Frozen regressor: the discrete update must follow the continuous
  // gradient flow k' = -g*phi*(phi*k - y) exactly.
  const double y = 0.6, phi = 0.8, gamma = 10.0, dt = 1e-3;
  const double k_star = y / phi;
  const double k0 = -50.0;
  double k_hat = k0;
  double flow_err = 0.0;
  for (int i = 1; i <= 5000; ++i) {
    k_hat = tvobs::gradient_step(k_hat, y, phi, gamma, dt);
    const double t = static_cast<double>(i) * dt;
    const double closed =
        k_star + (k0 - k_star) * std::exp(-gamma * phi * phi * t);
    flow_err = std::max(flow_err, std::abs(k_hat - closed));
  }
  const bool pass = adj_ok && flow_err < 1e-6;
  return {pass, fmt("adjugate residual %.2e, frozen-regressor flow off by "
                    "%.2e",
                    worst, flow_err)};
}

Outcome criterion_triple() {
  const tvobs::ScenarioConfig cfg = tvobs::parse_config(tvobs::kTripleScenario);
  const auto start = std::chrono::steady_clock::now();
  const tvobs::ScenarioResult res = tvobs::execute_scenario(cfg);
  const double wall = seconds_since(start);
  const tvobs::RowIdent& row = res.report.rows[0];
  const bool pass = std::abs(row.omega_hat - 2.0) < 0.05 &&
                    std::abs(row.l1_hat - 1.0) < 0.1 &&
                    std::abs(row.l2_hat + 0.5) < 0.1 && wall < 30.0;
  return {pass, fmt("omega_hat %.4f, amplitudes (%.4f, %.4f), %.2f s",
                    row.omega_hat, row.l1_hat, row.l2_hat, wall)};
}

Outcome criterion_deterministic() {
  const fs::path base = fs::temp_directory_path() / "tvobs_acceptance";
  const fs::path a = base / "repro_a";
  const fs::path b = base / "repro_b";
  fs::remove_all(a);
  fs::remove_all(b);
  fs::create_directories(base);
  const int rc_a = run_binary("reproduce-paper --out " + a.string());
  const int rc_b = run_binary("reproduce-paper --out " + b.string());
  if (rc_a != 0 || rc_b != 0)
    return {false, fmt("exit codes %d and %d", rc_a, rc_b)};
  const char* files[] = {"trajectory.csv",     "report.txt",
                         "states.svg",         "state_error.svg",
                         "omega_error.svg",    "amplitude_error.svg",
                         "theta.svg",          "theta_error.svg"};
  int identical = 0;
  std::string first_diff;
  for (const char* name : files) {
    if (slurp(a / name) == slurp(b / name)) {
      ++identical;
    } else if (first_diff.empty()) {
      first_diff = name;
    }
  }
  if (identical == 8) return {true, "8 of 8 output files byte-identical"};
  return {false, fmt("%d of 8 files identical, first difference in %s",
                     identical, first_diff.c_str())};
}

}  // namespace

int main() {
  int failures = 0;
  int index = 0;
  const auto record = [&](const Outcome& out) {
    ++index;
    std::printf("criterion %d: %s (%s)\n", index, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  };

  record(criterion_conditions());

  const tvobs::ScenarioConfig cfg =
      tvobs::parse_config(tvobs::kReferenceScenario);
  const auto start = std::chrono::steady_clock::now();
  const tvobs::ScenarioResult reference = tvobs::execute_scenario(cfg);
  const double wall = seconds_since(start);
  record(criterion_error_decay(reference, wall));
  record(criterion_frequency(reference));
  record(criterion_amplitudes(reference));
  record(criterion_theta(reference));

  record(criterion_filters());
  record(criterion_swapping());
  record(criterion_mixing());
  record(criterion_triple());
  record(criterion_deterministic());

  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures;
}
