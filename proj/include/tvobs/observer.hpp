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

#include "tvobs/model.hpp"

namespace tvobs {

// Gains of the derivative-free observer
//   z' = M(t)z + M(t)Gy + Nu + Ly - LCx_hat,   x_hat = z + Gy.
// The error dynamics matrix M_c(t) = M(t) - L*C is derived, never stored.
struct ObserverGains {
  Eigen::VectorXd G, N, L;  // n x 1 each
  TimeMatrix M;             // n x n
};

Eigen::MatrixXd mc_at(const ObserverGains& gains, const Eigen::RowVectorXd& C,
                      double t);

// Sup-norm residuals of the three gain conditions over a uniform grid:
//   r1: B - N - G*C*B
//   r2: D - G*C*D on a unit instantiation of each active row
//   r3: A0 - G*C*A0 - M
struct ConditionReport {
  double r1 = 0.0, r2 = 0.0, r3 = 0.0;
  double grid_t0 = 0.0, grid_t1 = 0.0, grid_step = 0.0;

  double max_residual() const { return std::max(r1, std::max(r2, r3)); }
};

ConditionReport verify_conditions(const LtvSystem& sys,
                                  const ObserverGains& gains, double t0,
                                  double t1, double step);

// Empirical decay of the autonomous error dynamics e' = M_c(t)e.
struct DecayReport {
  double t0 = 0.0, dt = 0.0;
  std::vector<double> norms;
  double fitted_rate = 0.0;  // least-squares slope of log norm, tail half
  bool decays = false;

  double ratio() const { return norms.back() / norms.front(); }
};

DecayReport check_error_stability(const ObserverGains& gains,
                                  const Eigen::RowVectorXd& C,
                                  const Eigen::VectorXd& e0, double t0,
                                  double t1, double dt);

// Observer state between samples; x_hat = z + G*y holds exactly.
struct ObserverState {
  Eigen::VectorXd z;
  Eigen::VectorXd xhat;
  double yhat = 0.0;
};

ObserverState make_observer_state(const ObserverGains& gains,
                                  const Eigen::RowVectorXd& C,
                                  const Eigen::VectorXd& z0, double y0);

// One RK4 step with y, u held constant across the step.
ObserverState observer_step(const ObserverState& state,
                            const ObserverGains& gains,
                            const Eigen::RowVectorXd& C, double y, double u,
                            double t, double dt);

// Co-simulates plant and observer on one clock (one fused integration,
// stage-consistent y). Optional zero-order-hold output noise, drawn once
// per step from a seeded generator. Columns: x*, xhat*, xerr_norm, y,
// yhat, u, theta_true*.
Trajectory run_observer(const LtvSystem& sys, const ObserverGains& gains,
                        const Expr& u, double t0, double horizon, double dt,
                        const Eigen::VectorXd& x0, const Eigen::VectorXd& z0,
                        double noise_amplitude = 0.0, unsigned seed = 1);

}  // namespace tvobs
