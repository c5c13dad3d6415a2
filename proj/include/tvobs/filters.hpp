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
#include <vector>

namespace tvobs {

// SISO rational operator gain*p^k/(p+lambda)^m in controllable canonical
// form, integrated with a fixed step and zero-order-hold input. For that
// input class the update uses the degree-4 Taylor polynomial of the matrix
// exponential, which is exactly one classical RK4 step.
class SisoFilter {
 public:
  SisoFilter(int order, Eigen::VectorXd num_ascending,
             Eigen::VectorXd den_ascending_monic);

  int order() const { return order_; }
  const Eigen::VectorXd& numerator() const { return num_; }
  const Eigen::VectorXd& denominator() const { return den_; }
  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& c() const { return c_; }
  double d() const { return d_; }
  const Eigen::VectorXd& state() const { return state_; }

  // Output at the current time from the pre-step state, then advance.
  double step(double input, double dt);

  // Same advance, but the direct-feedthrough term reads the average of the
  // current and previous inputs. Removes the half-sample bias of a direct
  // term driven by held samples; identical to step() when d == 0.
  double step_aligned(double input, double dt);

  void reset();

 private:
  void ensure_discretization(double dt);
  void advance(double input);

  int order_;
  Eigen::VectorXd num_, den_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_, c_;
  double d_ = 0.0;
  Eigen::VectorXd state_;
  double prev_input_ = 0.0;
  double cached_dt_ = -1.0;
  Eigen::MatrixXd e_;
  Eigen::VectorXd v_;
};

// Realization of gain*p^k/(p+lambda)^m. Supported denominators: m in
// {1, 2, 3}. Throws StructError for k > m (improper) or lambda <= 0.
SisoFilter make_lambda_filter(int k, double lambda, int m, double gain);

double filter_step(SisoFilter& f, double input, double dt);

// Filtered derivative quotient: the stable-filter identity
//   lam/(p+lam)[x_i'/x_s] = (1/x_s)*(lam*p/(p+lam))[x_i]
//                         + lam/(p+lam)[(x_s'/x_s^2)*(p/(p+lam))[x_i]]
// evaluated left to right on the sample grid, so x_i is never
// differentiated. Throws SingularityError when |x_s| <= eps_div.
std::vector<double> swapping_regressor(const std::vector<double>& x_i,
                                       const std::vector<double>& x_s,
                                       const std::vector<double>& dx_s,
                                       double lambda_i, double dt,
                                       double eps_div = 1e-6, double t0 = 0.0);

// Shared filter bank for one swapping_regressor stream.
class SwappingBank {
 public:
  explicit SwappingBank(double lambda_i);

  // One sample of the identity's right-hand side.
  double step(double x_i, double x_s, double dx_s, double dt);
  // Advances the bank on held inputs without touching the divisions.
  void step_held(double dt);

 private:
  SisoFilter unit_lag_, deriv_, lag_;
  double held_x_i_ = 0.0;
  double held_product_ = 0.0;
};

}  // namespace tvobs
