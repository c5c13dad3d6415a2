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
#include <optional>
#include <string>
#include <vector>

#include "tvobs/expr.hpp"
#include "tvobs/time_matrix.hpp"
#include "tvobs/trajectory.hpp"

namespace tvobs {

// Single-frequency sinusoidal parameter theta(t) = l1*sin(wt) + l2*cos(wt).
struct ThetaGenerator {
  double omega = 0.0;
  double l1 = 0.0, l2 = 0.0;
};

double theta_value(const ThetaGenerator& g, double t);

// Plant x' = (A0(t) + D(theta(t)))*x + B(t)*u, y = C*x. D has at most one
// nonzero entry per row, at column col[i] <= i (0-based, -1 = inactive).
struct LtvSystem {
  int n = 0;
  TimeMatrix A0;                // n x n
  TimeMatrix B;                 // n x 1
  Eigen::RowVectorXd C;         // 1 x n
  std::vector<int> theta_col;   // size n
  std::vector<std::optional<ThetaGenerator>> theta;  // engaged where col >= 0

  std::vector<int> active_rows() const;
};

// Throws StructError when dimensions or the D-structure are inconsistent.
void validate_system(const LtvSystem& sys);

Eigen::MatrixXd d_matrix(const LtvSystem& sys, double t);
// D with the given row's parameter set to 1 and all others to 0.
Eigen::MatrixXd d_unit(const LtvSystem& sys, int row);
// A0(t) + D(theta(t)).
Eigen::MatrixXd a_matrix(const LtvSystem& sys, double t);

// RK4 trajectory of the plant; columns x1..xn, y, u, theta_true<r>.
Trajectory simulate(const LtvSystem& sys, const Expr& u, double t0,
                    double horizon, double dt, const Eigen::VectorXd& x0);

struct AssumptionReport {
  bool structure_ok = true;
  std::vector<std::string> structure_issues;
  double eps = 0.0;
  std::vector<double> min_x_sq;          // per state
  std::vector<double> first_violation;   // time of first x_i^2 <= eps, -1 if none

  bool pass() const;
};

// Advisory check of the structural and excitation assumptions on a
// recorded trajectory.
AssumptionReport check_assumptions(const LtvSystem& sys, const Trajectory& traj,
                                   double eps);

}  // namespace tvobs
