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
#include <cstdint>
#include <vector>

#include "tvobs/filters.hpp"
#include "tvobs/model.hpp"

namespace tvobs {

// Log-squared transform of the estimate driving the frequency regression:
// V = xhat^2, xi = ln V, alpha = h/xhat. Samples with V <= eps_div are
// gated: xi and alpha hold their last emitted values (zero before the
// first ungated sample) and downstream adaptation freezes there.
struct XiSignal {
  std::vector<double> V, xi, alpha;
  std::vector<std::uint8_t> gated;

  std::size_t gated_count() const;
};

XiSignal build_xi(const std::vector<double>& xhat, const std::vector<double>& h,
                  double eps_div);

// Closed-form advance of the scalar gradient flow k' = -g*phi*(phi*k - y)
// with y, phi held over the step. Unconditionally stable in g*phi^2*dt.
double gradient_step(double k_hat, double y, double phi, double gamma,
                     double dt);

// Per-sample trace of the frequency regression. Emitted values are the
// states at each sample time, before that sample's update.
struct OmegaTrace {
  std::vector<double> k_hat, omega_hat, y, phi;
  std::size_t gated = 0;

  double final_k() const { return k_hat.back(); }
  double final_omega() const { return omega_hat.back(); }
};

// Frequency identification: Y = 0.5*(l*p^3/(p+l)^3)[xi] - (l*p^2/(p+l)^3)[alpha],
// Phi = 0.5*(l*p/(p+l)^3)[xi] - (l/(p+l)^3)[alpha], gradient flow on
// Y = Phi*k with k = -omega^2, omega_hat = sqrt(|k_hat|).
OmegaTrace omega_pipeline(const XiSignal& xi, double lambda, double gamma1,
                          double dt, double t0 = 0.0);

// Frequency identification for a parameter multiplying an earlier state
// (column s < row i). The regression pair is
//   Y = (l^2*p^2/(p+l)^2)[sr] - (l^3*p^2/(p+l)^3)[h_i/x_s]
//   Phi = (l^2/(p+l)^2)[sr] - (l^3/(p+l)^3)[h_i/x_s]
// where sr is the swapping_regressor stream. Samples with |x_s| <= eps_div
// are gated: the filter banks advance on held inputs and adaptation
// freezes.
OmegaTrace theta_i_pipeline(const std::vector<double>& xhat_i,
                            const std::vector<double>& xhat_s,
                            const std::vector<double>& dxhat_s,
                            const std::vector<double>& h_i, double lambda_i,
                            double gamma, double dt, double eps_div,
                            double t0 = 0.0);

Eigen::Matrix2d adjugate2(const Eigen::Matrix2d& m);

// Per-sample trace of the amplitude stage. l1/l2/delta are pre-update
// states at each sample.
struct DremTrace {
  std::vector<double> l1, l2, delta;
  bool poor_excitation = false;

  double final_l1() const { return l1.back(); }
  double final_l2() const { return l2.back(); }
};

// Amplitude identification by regressor extension and mixing:
//   q = (l1*p/(p+l1))[target] - (l1/(p+l1))[h]
//   phi = (l1/(p+l1))[mult*sin(w t); mult*cos(w t)]
//   Yv' = -l2*Yv + l2*phi*q,  Om' = -l2*Om + l2*phi*phi^T
//   Z = adj(Om)*Yv, Delta = det(Om),  lhat' = -g2*Delta*(Delta*lhat - Z)
// omega supplies w per sample (constant for a frozen estimate).
DremTrace drem_pipeline(const std::vector<double>& target,
                        const std::vector<double>& h,
                        const std::vector<double>& mult,
                        const std::vector<double>& omega, double lambda1,
                        double lambda2, double gamma2, double dt,
                        double t0 = 0.0);

// Frozen-frequency form; the multiplier is the target signal itself.
DremTrace drem_pipeline(const std::vector<double>& xhat,
                        const std::vector<double>& h, double omega_hat,
                        double lambda1, double lambda2, double gamma2,
                        double dt, double t0 = 0.0);

struct ThetaEstimate {
  double omega = 0.0;
  double l1 = 0.0, l2 = 0.0;
  std::vector<double> theta;
};

// theta_hat(t) = l1*sin(omega*t) + l2*cos(omega*t) on a uniform grid.
ThetaEstimate theta_reconstruct(double omega, double l1, double l2, double t0,
                                double dt, std::size_t count);

// Known-dynamics aggregate for one row: h_i = sum_j A0(i,j)*x_j + B(i)*u,
// read from the trajectory's state columns ("xhat*" or "x*").
std::vector<double> known_dynamics_series(const LtvSystem& sys,
                                          const Trajectory& traj, int row,
                                          bool use_estimates = true);

}  // namespace tvobs
