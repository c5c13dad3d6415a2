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

#include "tvobs/observer.hpp"

#include <cmath>
#include <random>

#include "tvobs/errors.hpp"
#include "tvobs/rk4.hpp"

namespace tvobs {

namespace {

void validate_gains(const LtvSystem& sys, const ObserverGains& gains) {
  if (gains.G.size() != sys.n || gains.N.size() != sys.n ||
      gains.L.size() != sys.n) {
    throw StructError("observer gain vectors must be n x 1");
  }
  if (gains.M.rows() != sys.n || gains.M.cols() != sys.n) {
    throw StructError("M must be n x n");
  }
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

Eigen::MatrixXd mc_at(const ObserverGains& gains, const Eigen::RowVectorXd& C,
                      double t) {
  return eval_time_matrix(gains.M, t, "M") - gains.L * C;
}

ConditionReport verify_conditions(const LtvSystem& sys,
                                  const ObserverGains& gains, double t0,
                                  double t1, double step) {
  validate_system(sys);
  validate_gains(sys, gains);
  if (step <= 0 || t1 < t0) throw StructError("bad verification grid");

  ConditionReport rep;
  rep.grid_t0 = t0;
  rep.grid_t1 = t1;
  rep.grid_step = step;

  const Eigen::MatrixXd gc = gains.G * sys.C;  // n x n
  const auto points = static_cast<std::size_t>(std::llround((t1 - t0) / step));
  for (std::size_t k = 0; k <= points; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    const Eigen::MatrixXd b = eval_time_matrix(sys.B, t, "B");
    const Eigen::MatrixXd a0 = eval_time_matrix(sys.A0, t, "A0");
    const Eigen::MatrixXd m = eval_time_matrix(gains.M, t, "M");
    rep.r1 = std::max(rep.r1, max_abs(b.col(0) - gains.N - gc * b.col(0)));
    rep.r3 = std::max(rep.r3, max_abs(a0 - gc * a0 - m));
    for (int row : sys.active_rows()) {
      const Eigen::MatrixXd du = d_unit(sys, row);
      rep.r2 = std::max(rep.r2, max_abs(du - gc * du));
    }
  }
  return rep;
}

DecayReport check_error_stability(const ObserverGains& gains,
                                  const Eigen::RowVectorXd& C,
                                  const Eigen::VectorXd& e0, double t0,
                                  double t1, double dt) {
  if (e0.norm() == 0.0) throw StructError("initial error must be nonzero");
  if (dt <= 0 || t1 <= t0) throw StructError("bad decay horizon");

  DecayReport rep;
  rep.t0 = t0;
  rep.dt = dt;

  auto field = [&](double t, const Eigen::VectorXd& e) -> Eigen::VectorXd {
    return mc_at(gains, C, t) * e;
  };

  const auto steps = static_cast<std::size_t>(std::llround((t1 - t0) / dt));
  Eigen::VectorXd e = e0;
  rep.norms.reserve(steps + 1);
  rep.norms.push_back(e.norm());
  for (std::size_t k = 0; k < steps; ++k) {
    e = rk4_step(field, t0 + static_cast<double>(k) * dt, e, dt);
    if (!e.allFinite()) break;  // instability is a flag, not an exception
    rep.norms.push_back(e.norm());
  }

  // Least-squares slope of log norm over the tail half of the recorded span.
  const std::size_t n = rep.norms.size();
  const std::size_t begin = n / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = begin; k < n; ++k) {
    if (rep.norms[k] <= 0.0) continue;
    const double x = t0 + static_cast<double>(k) * dt;
    const double y = std::log(rep.norms[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    rep.fitted_rate = denom == 0 ? 0.0 : (static_cast<double>(m) * sxy - sx * sy) / denom;
  }
  rep.decays = (rep.norms.size() == steps + 1) && rep.fitted_rate < 0.0 &&
               rep.norms.back() < rep.norms.front();
  return rep;
}

ObserverState make_observer_state(const ObserverGains& gains,
                                  const Eigen::RowVectorXd& C,
                                  const Eigen::VectorXd& z0, double y0) {
  ObserverState st;
  st.z = z0;
  st.xhat = z0 + gains.G * y0;
  st.yhat = C.dot(st.xhat);
  return st;
}

ObserverState observer_step(const ObserverState& state,
                            const ObserverGains& gains,
                            const Eigen::RowVectorXd& C, double y, double u,
                            double t, double dt) {
  auto field = [&](double tt, const Eigen::VectorXd& z) -> Eigen::VectorXd {
    const Eigen::MatrixXd m = eval_time_matrix(gains.M, tt, "M");
    const Eigen::VectorXd xhat = z + gains.G * y;
    return m * z + m * gains.G * y + gains.N * u + gains.L * y -
           gains.L * C.dot(xhat);
  };
  ObserverState next;
  next.z = rk4_step(field, t, state.z, dt);
  if (!next.z.allFinite()) throw DivergenceError(t + dt);
  next.xhat = next.z + gains.G * y;
  next.yhat = C.dot(next.xhat);
  return next;
}

Trajectory run_observer(const LtvSystem& sys, const ObserverGains& gains,
                        const Expr& u, double t0, double horizon, double dt,
                        const Eigen::VectorXd& x0, const Eigen::VectorXd& z0,
                        double noise_amplitude, unsigned seed) {
  validate_system(sys);
  validate_gains(sys, gains);
  if (dt <= 0) throw StructError("dt must be positive");
  if (horizon < 0) throw StructError("horizon must be nonnegative");
  if (x0.size() != sys.n || z0.size() != sys.n) {
    throw StructError("x0 and z0 must have n entries");
  }

  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  const std::size_t count = steps + 1;
  const int n = sys.n;

  Trajectory traj;
  traj.t0 = t0;
  traj.dt = dt;
  traj.set_samples(count);
  // Declare every column before taking references; adding a column can
  // reallocate the store.
  for (int i = 0; i < n; ++i) traj.add("x" + std::to_string(i + 1));
  for (int i = 0; i < n; ++i) traj.add("xhat" + std::to_string(i + 1));
  traj.add("xerr_norm");
  traj.add("y");
  traj.add("yhat");
  traj.add("u");
  const std::vector<int> active = sys.active_rows();
  for (int r : active) traj.add("theta_true" + std::to_string(r + 1));

  std::vector<std::vector<double>*> xcols(n), hcols(n);
  for (int i = 0; i < n; ++i) {
    xcols[i] = &traj.col("x" + std::to_string(i + 1));
    hcols[i] = &traj.col("xhat" + std::to_string(i + 1));
  }
  auto& errcol = traj.col("xerr_norm");
  auto& ycol = traj.col("y");
  auto& yhcol = traj.col("yhat");
  auto& ucol = traj.col("u");
  std::vector<std::vector<double>*> thcols;
  for (int r : active) {
    thcols.push_back(&traj.col("theta_true" + std::to_string(r + 1)));
  }

  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Stacked state [x; z]; y is recomputed from the stage value of x so the
  // emitted error equals the autonomous error integration to round-off.
  double w = 0.0;  // current measurement disturbance, held per step
  auto field = [&](double t, const Eigen::VectorXd& s) -> Eigen::VectorXd {
    const auto x = s.head(n);
    const auto z = s.tail(n);
    const double uv = u.eval(t);
    const double y = sys.C.dot(x) + w;
    const Eigen::VectorXd xhat = z + gains.G * y;
    const Eigen::MatrixXd a = a_matrix(sys, t);
    const Eigen::MatrixXd b = eval_time_matrix(sys.B, t, "B");
    const Eigen::MatrixXd m = eval_time_matrix(gains.M, t, "M");
    Eigen::VectorXd ds(2 * n);
    ds.head(n) = a * x + b.col(0) * uv;
    ds.tail(n) = m * z + m * gains.G * y + gains.N * uv + gains.L * y -
                 gains.L * sys.C.dot(xhat);
    return ds;
  };

  Eigen::VectorXd s(2 * n);
  s.head(n) = x0;
  s.tail(n) = z0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = traj.time_at(k);
    w = noise_amplitude == 0.0 ? 0.0 : noise_amplitude * gauss(rng);
    const auto x = s.head(n);
    const auto z = s.tail(n);
    const double y = sys.C.dot(x) + w;
    const Eigen::VectorXd xhat = z + gains.G * y;
    for (int i = 0; i < n; ++i) (*xcols[i])[k] = x(i);
    for (int i = 0; i < n; ++i) (*hcols[i])[k] = xhat(i);
    errcol[k] = (x - xhat).norm();
    ycol[k] = y;
    yhcol[k] = sys.C.dot(xhat);
    ucol[k] = u.eval(t);
    for (std::size_t j = 0; j < active.size(); ++j) {
      (*thcols[j])[k] = theta_value(*sys.theta[active[j]], t);
    }
    if (k + 1 < count) {
      s = rk4_step(field, t, s, dt);
      if (!s.allFinite()) throw DivergenceError(traj.time_at(k + 1));
    }
  }
  return traj;
}

}  // namespace tvobs
