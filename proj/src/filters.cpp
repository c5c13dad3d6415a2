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

#include "tvobs/filters.hpp"

#include <cmath>

#include "tvobs/errors.hpp"

namespace tvobs {

SisoFilter::SisoFilter(int order, Eigen::VectorXd num_ascending,
                       Eigen::VectorXd den_ascending_monic)
    : order_(order), num_(std::move(num_ascending)), den_(std::move(den_ascending_monic)) {
  if (order_ < 1) throw StructError("filter order must be >= 1");
  if (den_.size() != order_ + 1 || den_(order_) != 1.0) {
    throw StructError("denominator must be monic of the filter order");
  }
  if (num_.size() > order_ + 1) throw StructError("improper filter");
  const Eigen::Index given = num_.size();
  num_.conservativeResize(order_ + 1);
  for (Eigen::Index j = given; j <= order_; ++j) num_(j) = 0.0;

  a_ = Eigen::MatrixXd::Zero(order_, order_);
  for (int i = 0; i + 1 < order_; ++i) a_(i, i + 1) = 1.0;
  for (int j = 0; j < order_; ++j) a_(order_ - 1, j) = -den_(j);
  b_ = Eigen::VectorXd::Zero(order_);
  b_(order_ - 1) = 1.0;
  d_ = num_(order_);
  c_ = Eigen::VectorXd::Zero(order_);
  for (int j = 0; j < order_; ++j) c_(j) = num_(j) - d_ * den_(j);
  state_ = Eigen::VectorXd::Zero(order_);
}

void SisoFilter::ensure_discretization(double dt) {
  if (dt == cached_dt_) return;
  if (dt <= 0) throw StructError("dt must be positive");
  const Eigen::MatrixXd ha = dt * a_;
  const Eigen::MatrixXd ha2 = ha * ha;
  const Eigen::MatrixXd ha3 = ha2 * ha;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(order_, order_);
  e_ = id + ha + ha2 / 2.0 + ha3 / 6.0 + ha3 * ha / 24.0;
  v_ = dt * (id + ha / 2.0 + ha2 / 6.0 + ha3 / 24.0) * b_;
  cached_dt_ = dt;
}

void SisoFilter::advance(double input) {
  state_ = e_ * state_ + v_ * input;
  if (!state_.allFinite()) {
    throw DivergenceError("filter state became non-finite");
  }
}

double SisoFilter::step(double input, double dt) {
  ensure_discretization(dt);
  const double out = c_.dot(state_) + d_ * input;
  advance(input);
  prev_input_ = input;
  return out;
}

double SisoFilter::step_aligned(double input, double dt) {
  ensure_discretization(dt);
  const double out = c_.dot(state_) + d_ * 0.5 * (prev_input_ + input);
  advance(input);
  prev_input_ = input;
  return out;
}

void SisoFilter::reset() {
  state_.setZero();
  prev_input_ = 0.0;
}

SisoFilter make_lambda_filter(int k, double lambda, int m, double gain) {
  if (m < 1 || m > 3) throw StructError("denominator power must be 1, 2 or 3");
  if (k < 0 || k > m) throw StructError("improper filter: numerator power exceeds denominator power");
  if (lambda <= 0) throw StructError("lambda must be positive for a stable pole");

  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  Eigen::VectorXd den(m + 1);
  for (int j = 0; j <= m; ++j) {
    den(j) = binom[m][j] * std::pow(lambda, m - j);
  }
  Eigen::VectorXd num = Eigen::VectorXd::Zero(m + 1);
  num(k) = gain;
  return SisoFilter(m, num, den);
}

double filter_step(SisoFilter& f, double input, double dt) {
  return f.step(input, dt);
}

SwappingBank::SwappingBank(double lambda_i)
    : unit_lag_(make_lambda_filter(1, lambda_i, 1, 1.0)),
      deriv_(make_lambda_filter(1, lambda_i, 1, lambda_i)),
      lag_(make_lambda_filter(0, lambda_i, 1, lambda_i)) {}

double SwappingBank::step(double x_i, double x_s, double dx_s, double dt) {
  const double w = unit_lag_.step_aligned(x_i, dt);
  const double a = deriv_.step_aligned(x_i, dt);
  const double product = dx_s / (x_s * x_s) * w;
  const double fb = lag_.step_aligned(product, dt);
  held_x_i_ = x_i;
  held_product_ = product;
  return a / x_s + fb;
}

void SwappingBank::step_held(double dt) {
  unit_lag_.step_aligned(held_x_i_, dt);
  deriv_.step_aligned(held_x_i_, dt);
  lag_.step_aligned(held_product_, dt);
}

std::vector<double> swapping_regressor(const std::vector<double>& x_i,
                                       const std::vector<double>& x_s,
                                       const std::vector<double>& dx_s,
                                       double lambda_i, double dt,
                                       double eps_div, double t0) {
  if (x_i.size() != x_s.size() || x_i.size() != dx_s.size()) {
    throw StructError("series lengths must match");
  }
  SwappingBank bank(lambda_i);
  std::vector<double> out(x_i.size());
  for (std::size_t k = 0; k < x_i.size(); ++k) {
    if (std::fabs(x_s[k]) <= eps_div) {
      throw SingularityError(t0 + static_cast<double>(k) * dt);
    }
    out[k] = bank.step(x_i[k], x_s[k], dx_s[k], dt);
  }
  return out;
}

}  // namespace tvobs
