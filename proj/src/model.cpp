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

#include "tvobs/model.hpp"

#include <cmath>
#include <limits>

#include "tvobs/errors.hpp"
#include "tvobs/rk4.hpp"

namespace tvobs {

double theta_value(const ThetaGenerator& g, double t) {
  return g.l1 * std::sin(g.omega * t) + g.l2 * std::cos(g.omega * t);
}

std::vector<int> LtvSystem::active_rows() const {
  std::vector<int> rows;
  for (int i = 0; i < n; ++i) {
    if (theta_col[i] >= 0) rows.push_back(i);
  }
  return rows;
}

void validate_system(const LtvSystem& sys) {
  if (sys.n < 1) throw StructError("system order must be >= 1");
  if (sys.A0.rows() != sys.n || sys.A0.cols() != sys.n) {
    throw StructError("A0 must be n x n");
  }
  if (sys.B.rows() != sys.n || sys.B.cols() != 1) {
    throw StructError("B must be n x 1");
  }
  if (sys.C.cols() != sys.n) throw StructError("C must be 1 x n");
  if (static_cast<int>(sys.theta_col.size()) != sys.n ||
      static_cast<int>(sys.theta.size()) != sys.n) {
    throw StructError("theta structure must cover every row");
  }
  for (int i = 0; i < sys.n; ++i) {
    const int c = sys.theta_col[i];
    if (c < -1 || c >= sys.n) throw StructError("theta column out of range");
    if (c > i) {
      throw StructError("theta in row " + std::to_string(i + 1) +
                        " references column " + std::to_string(c + 1) +
                        " above the diagonal");
    }
    if ((c >= 0) != sys.theta[i].has_value()) {
      throw StructError("theta generator missing for row " + std::to_string(i + 1));
    }
    if (c >= 0 && sys.theta[i]->omega <= 0) {
      throw StructError("theta frequency must be positive in row " +
                        std::to_string(i + 1));
    }
  }
}

Eigen::MatrixXd d_matrix(const LtvSystem& sys, double t) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(sys.n, sys.n);
  for (int i = 0; i < sys.n; ++i) {
    if (sys.theta_col[i] >= 0) {
      d(i, sys.theta_col[i]) = theta_value(*sys.theta[i], t);
    }
  }
  return d;
}

Eigen::MatrixXd d_unit(const LtvSystem& sys, int row) {
  if (row < 0 || row >= sys.n || sys.theta_col[row] < 0) {
    throw StructError("row " + std::to_string(row + 1) + " carries no theta");
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(sys.n, sys.n);
  d(row, sys.theta_col[row]) = 1.0;
  return d;
}

Eigen::MatrixXd a_matrix(const LtvSystem& sys, double t) {
  return eval_time_matrix(sys.A0, t, "A0") + d_matrix(sys, t);
}

Trajectory simulate(const LtvSystem& sys, const Expr& u, double t0,
                    double horizon, double dt, const Eigen::VectorXd& x0) {
  validate_system(sys);
  if (dt <= 0) throw StructError("dt must be positive");
  if (horizon < 0) throw StructError("horizon must be nonnegative");
  if (x0.size() != sys.n) throw StructError("x0 must have n entries");

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t count = steps + 1;

  Trajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.set_samples(count);
  // Declare every column before taking references; adding a column can
  // reallocate the store.
  for (int i = 0; i < sys.n; ++i) traj.add("x" + std::to_string(i + 1));
  traj.add("y");
  traj.add("u");
  const std::vector<int> active = sys.active_rows();
  for (int r : active) traj.add("theta_true" + std::to_string(r + 1));

  std::vector<std::vector<double>*> xcols(sys.n);
  for (int i = 0; i < sys.n; ++i) {
    xcols[i] = &traj.col("x" + std::to_string(i + 1));
  }
  auto& ycol = traj.col("y");
  auto& ucol = traj.col("u");
  std::vector<std::vector<double>*> thcols;
  for (int r : active) {
    thcols.push_back(&traj.col("theta_true" + std::to_string(r + 1)));
  }

  auto field = [&](double t, const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::MatrixXd a = a_matrix(sys, t);
    const Eigen::MatrixXd b = eval_time_matrix(sys.B, t, "B");
    return a * x + b.col(0) * u.eval(t);
  };

  Eigen::VectorXd x = x0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = traj.time_at(k);
    for (int i = 0; i < sys.n; ++i) (*xcols[i])[k] = x(i);
    ycol[k] = sys.C.dot(x);
    ucol[k] = u.eval(t);
    for (std::size_t j = 0; j < active.size(); ++j) {
      (*thcols[j])[k] = theta_value(*sys.theta[active[j]], t);
    }
    if (k + 1 < count) {
      x = rk4_step(field, t, x, dt);
      if (!x.allFinite()) throw DivergenceError(traj.time_at(k + 1));
    }
  }
  return traj;
}

bool AssumptionReport::pass() const {
  if (!structure_ok) return false;
  for (double t : first_violation) {
    if (t >= 0) return false;
  }
  return true;
}

AssumptionReport check_assumptions(const LtvSystem& sys, const Trajectory& traj,
                                   double eps) {
  AssumptionReport rep;
  rep.eps = eps;
  try {
    validate_system(sys);
  } catch (const StructError& e) {
    rep.structure_ok = false;
    rep.structure_issues.push_back(e.what());
  }

  rep.min_x_sq.assign(static_cast<std::size_t>(sys.n), 0.0);
  rep.first_violation.assign(static_cast<std::size_t>(sys.n), -1.0);
  for (int i = 0; i < sys.n; ++i) {
    const std::string name = "x" + std::to_string(i + 1);
    if (!traj.has(name)) continue;
    const auto& xs = traj.col(name);
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const double sq = xs[k] * xs[k];
      if (sq < lo) lo = sq;
      if (sq <= eps && rep.first_violation[i] < 0) {
        rep.first_violation[i] = traj.time_at(k);
      }
    }
    rep.min_x_sq[i] = xs.empty() ? 0.0 : lo;
  }
  return rep;
}

}  // namespace tvobs
