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

namespace tvobs {

// One classical fixed-step Runge-Kutta step of x' = f(t, x).
template <class F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + dt / 2, (x + (dt / 2) * k1).eval());
  const Eigen::VectorXd k3 = f(t + dt / 2, (x + (dt / 2) * k2).eval());
  const Eigen::VectorXd k4 = f(t + dt, (x + dt * k3).eval());
  return x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

}  // namespace tvobs
