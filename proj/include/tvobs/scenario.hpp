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

#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tvobs/model.hpp"
#include "tvobs/observer.hpp"
#include "tvobs/trajectory.hpp"

namespace tvobs {

// One sinusoidal entry of the varying part of the state matrix. Indices are
// 1-based as written in scenario files; col <= row.
struct ThetaSpec {
  int row = 0, col = 0;
  double omega = 0.0;
  double l1 = 0.0, l2 = 0.0;
};

bool operator==(const ThetaSpec& a, const ThetaSpec& b);

struct ScenarioConfig {
  // [system]
  int n = 0;
  TimeMatrix A0;           // n x n
  TimeMatrix B;            // n x 1
  Eigen::RowVectorXd C;    // 1 x n
  std::vector<ThetaSpec> thetas;  // sorted by row

  // [gains]
  Eigen::VectorXd G, N, L;  // n x 1
  TimeMatrix M;             // n x n

  // [input]
  Expr u;

  // [sim]
  double t0 = 0.0;
  double dt = 1e-3;
  double horizon = 60.0;
  Eigen::VectorXd x0, z0;
  double noise = 0.0;

  // [estimator]
  double lambda = 10.0;
  double gamma1 = 50.0;
  double lambda1 = 10.0;
  double lambda2 = 1.0;
  double gamma2 = 10.0;
  double eps_div = 1e-6;
  double T1 = 40.0;
  std::string mode = "replay";  // replay | cascade

  // [output]
  int decimate = 1;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

// Parses the sectioned key = value format. Collects every problem before
// throwing one ConfigError; issues name the key and line, e.g.
// "gains.M (line 14): expected 2x2, got 1x2".
ScenarioConfig parse_config(const std::string& text);

// Semantic checks only (shapes, ranges, theta structure). parse_config runs
// the same checks with line information attached.
void validate_config(const ScenarioConfig& cfg);

// Canonical text form; parse_config(print_config(cfg)) == cfg.
std::string print_config(const ScenarioConfig& cfg);

// Reads and parses a scenario file. Throws std::runtime_error when the file
// cannot be read.
ScenarioConfig load_config(const std::string& path);

LtvSystem make_system(const ScenarioConfig& cfg);
ObserverGains make_gains(const ScenarioConfig& cfg);

// Identification summary for one varying entry.
struct RowIdent {
  int row = 0, col = 0;  // 1-based
  double omega_true = 0.0, l1_true = 0.0, l2_true = 0.0;
  double omega_hat = 0.0, k_hat = 0.0;
  double settle = -1.0;  // first time the band |w - w_final| <= 0.05 holds to
                         // the end, seconds from t0; -1 when it never holds
  double l1_hat = 0.0, l2_hat = 0.0;
  double theta_rms_tail = 0.0;  // over the last 20% of samples
  double delta_min = 0.0, delta_median = 0.0, delta_max = 0.0;
  bool poor_excitation = false;
  std::size_t gated = 0;
  double min_pivot = 0.0;  // min |xhat_col| over the run
};

struct RunReport {
  bool has_data = false;
  std::size_t samples = 0;
  double t0 = 0.0, dt = 0.0, horizon = 0.0, T1 = 0.0;
  std::string mode;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double cond_t0 = 0.0, cond_t1 = 0.0, cond_step = 0.0;
  bool structure_ok = true;
  double xerr_initial = 0.0, xerr_final = 0.0, xerr_tail_max = 0.0;
  std::vector<RowIdent> rows;
};

std::string format_report(const RunReport& rep);

struct ScenarioResult {
  Trajectory traj;
  RunReport report;
  ConditionReport conditions;
  AssumptionReport assumptions;
};

// Verifies the gain conditions, co-simulates plant and observer, runs the
// identification cascade for every varying entry and assembles the report.
// A zero horizon yields an empty trajectory with all columns declared.
ScenarioResult execute_scenario(const ScenarioConfig& cfg);

// The trajectory restricted and ordered to the exported column contract:
// x*, xhat*, xerr_norm, y, u, theta_true*, then per varying entry omega_hat,
// k_hat, l1_hat, l2_hat, theta_hat*, and delta last.
Trajectory export_view(const Trajectory& traj, const ScenarioConfig& cfg);

// Six SVG charts: states, state error, frequency error, amplitude error,
// parameter overlay, parameter error. Deterministic bytes for equal input.
void emit_plots(const Trajectory& traj, const RunReport& rep,
                const std::string& dir);

// execute_scenario plus trajectory.csv, report.txt and the charts under
// out_dir (created when missing).
ScenarioResult run_scenario(const ScenarioConfig& cfg,
                            const std::string& out_dir);

// Runs every *.scenario file under scenario_dir (sorted by name) into
// out_dir/<stem>/. Returns the number of scenarios run.
int run_batch(const std::string& scenario_dir, const std::string& out_dir);

// Built-in scenarios; identical to the files shipped under scenarios/.
extern const char kReferenceScenario[];
extern const char kTripleScenario[];

}  // namespace tvobs
