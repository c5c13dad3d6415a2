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

#include "tvobs/ident.hpp"

#include <cmath>

#include "tvobs/errors.hpp"

namespace tvobs {

std::size_t XiSignal::gated_count() const {
  std::size_t n = 0;
  for (auto g : gated) n += g;
  return n;
}

XiSignal build_xi(const std::vector<double>& xhat, const std::vector<double>& h,
                  double eps_div) {
  if (xhat.size() != h.size()) throw StructError("series lengths must match");
  XiSignal out;
  const std::size_t n = xhat.size();
  out.V.resize(n);
  out.xi.resize(n);
  out.alpha.resize(n);
  out.gated.resize(n);
  double xi_held = 0.0, alpha_held = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = xhat[k] * xhat[k];
    out.V[k] = v;
    if (v <= eps_div) {
      out.gated[k] = 1;
    } else {
      out.gated[k] = 0;
      xi_held = std::log(v);
      alpha_held = h[k] / xhat[k];
    }
    out.xi[k] = xi_held;
    out.alpha[k] = alpha_held;
  }
  return out;
}

double gradient_step(double k_hat, double y, double phi, double gamma,
                     double dt) {
  if (phi == 0.0) return k_hat;
  const double target = y / phi;
  return target + (k_hat - target) * std::exp(-gamma * phi * phi * dt);
}

OmegaTrace omega_pipeline(const XiSignal& xi, double lambda, double gamma1,
                          double dt, double t0) {
  SisoFilter f3 = make_lambda_filter(3, lambda, 3, lambda);
  SisoFilter f2 = make_lambda_filter(2, lambda, 3, lambda);
  SisoFilter f1 = make_lambda_filter(1, lambda, 3, lambda);
  SisoFilter f0 = make_lambda_filter(0, lambda, 3, lambda);

  const std::size_t n = xi.xi.size();
  OmegaTrace tr;
  tr.k_hat.resize(n);
  tr.omega_hat.resize(n);
  tr.y.resize(n);
  tr.phi.resize(n);

  double k_hat = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double y = 0.5 * f3.step_aligned(xi.xi[k], dt) -
                     f2.step_aligned(xi.alpha[k], dt);
    const double phi = 0.5 * f1.step_aligned(xi.xi[k], dt) -
                       f0.step_aligned(xi.alpha[k], dt);
    tr.y[k] = y;
    tr.phi[k] = phi;
    tr.k_hat[k] = k_hat;
    tr.omega_hat[k] = std::sqrt(std::fabs(k_hat));
    if (xi.gated[k]) {
      ++tr.gated;
    } else {
      k_hat = gradient_step(k_hat, y, phi, gamma1, dt);
      if (!std::isfinite(k_hat)) {
        throw DivergenceError(t0 + static_cast<double>(k) * dt);
      }
    }
  }
  return tr;
}

OmegaTrace theta_i_pipeline(const std::vector<double>& xhat_i,
                            const std::vector<double>& xhat_s,
                            const std::vector<double>& dxhat_s,
                            const std::vector<double>& h_i, double lambda_i,
                            double gamma, double dt, double eps_div,
                            double t0) {
  const std::size_t n = xhat_i.size();
  if (xhat_s.size() != n || dxhat_s.size() != n || h_i.size() != n) {
    throw StructError("series lengths must match");
  }

  SwappingBank bank(lambda_i);
  const double g2 = lambda_i * lambda_i;
  const double g3 = g2 * lambda_i;
  SisoFilter fy_sr = make_lambda_filter(2, lambda_i, 2, g2);
  SisoFilter fy_h = make_lambda_filter(2, lambda_i, 3, g3);
  SisoFilter fp_sr = make_lambda_filter(0, lambda_i, 2, g2);
  SisoFilter fp_h = make_lambda_filter(0, lambda_i, 3, g3);

  OmegaTrace tr;
  tr.k_hat.resize(n);
  tr.omega_hat.resize(n);
  tr.y.resize(n);
  tr.phi.resize(n);

  double k_hat = 0.0;
  double sr = 0.0, hq = 0.0;  // held while gated
  for (std::size_t k = 0; k < n; ++k) {
    const bool gated = std::fabs(xhat_s[k]) <= eps_div;
    if (gated) {
      bank.step_held(dt);
      ++tr.gated;
    } else {
      sr = bank.step(xhat_i[k], xhat_s[k], dxhat_s[k], dt);
      hq = h_i[k] / xhat_s[k];
    }
    const double y = fy_sr.step_aligned(sr, dt) - fy_h.step_aligned(hq, dt);
    const double phi = fp_sr.step_aligned(sr, dt) - fp_h.step_aligned(hq, dt);
    tr.y[k] = y;
    tr.phi[k] = phi;
    tr.k_hat[k] = k_hat;
    tr.omega_hat[k] = std::sqrt(std::fabs(k_hat));
    if (!gated) {
      k_hat = gradient_step(k_hat, y, phi, gamma, dt);
      if (!std::isfinite(k_hat)) {
        throw DivergenceError(t0 + static_cast<double>(k) * dt);
      }
    }
  }
  return tr;
}

Eigen::Matrix2d adjugate2(const Eigen::Matrix2d& m) {
  Eigen::Matrix2d adj;
  adj << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return adj;
}

DremTrace drem_pipeline(const std::vector<double>& target,
                        const std::vector<double>& h,
                        const std::vector<double>& mult,
                        const std::vector<double>& omega, double lambda1,
                        double lambda2, double gamma2, double dt, double t0) {
  const std::size_t n = target.size();
  if (h.size() != n || mult.size() != n || omega.size() != n) {
    throw StructError("series lengths must match");
  }

  SisoFilter fq_num = make_lambda_filter(1, lambda1, 1, lambda1);
  SisoFilter fq_den = make_lambda_filter(0, lambda1, 1, lambda1);
  SisoFilter fp1 = make_lambda_filter(0, lambda1, 1, lambda1);
  SisoFilter fp2 = make_lambda_filter(0, lambda1, 1, lambda1);

  DremTrace tr;
  tr.l1.resize(n);
  tr.l2.resize(n);
  tr.delta.resize(n);

  Eigen::Vector2d yv = Eigen::Vector2d::Zero();
  Eigen::Matrix2d om = Eigen::Matrix2d::Zero();
  Eigen::Vector2d l_hat = Eigen::Vector2d::Zero();
  const double e2 = std::exp(-lambda2 * dt);
  double delta_peak = 0.0;

  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    const double q = fq_num.step_aligned(target[k], dt) -
                     fq_den.step_aligned(h[k], dt);
    Eigen::Vector2d phi;
    phi << fp1.step_aligned(mult[k] * std::sin(omega[k] * t), dt),
        fp2.step_aligned(mult[k] * std::cos(omega[k] * t), dt);

    // Mixing reads the pre-update averaged states.
    const double delta = om.determinant();
    const Eigen::Vector2d z = adjugate2(om) * yv;
    tr.l1[k] = l_hat(0);
    tr.l2[k] = l_hat(1);
    tr.delta[k] = delta;
    delta_peak = std::max(delta_peak, std::fabs(delta));

    const Eigen::Vector2d pq = phi * q;
    const Eigen::Matrix2d pp = phi * phi.transpose();
    yv = pq + (yv - pq) * e2;
    om = pp + (om - pp) * e2;
    if (delta != 0.0) {
      const Eigen::Vector2d lt = z / delta;
      l_hat = lt + (l_hat - lt) * std::exp(-gamma2 * delta * delta * dt);
    }
    if (!l_hat.allFinite() || !yv.allFinite() || !om.allFinite()) {
      throw DivergenceError(t);
    }
  }
  tr.poor_excitation = delta_peak < 1e-12;
  return tr;
}

DremTrace drem_pipeline(const std::vector<double>& xhat,
                        const std::vector<double>& h, double omega_hat,
                        double lambda1, double lambda2, double gamma2,
                        double dt, double t0) {
  const std::vector<double> omega(xhat.size(), omega_hat);
  return drem_pipeline(xhat, h, xhat, omega, lambda1, lambda2, gamma2, dt, t0);
}

ThetaEstimate theta_reconstruct(double omega, double l1, double l2, double t0,
                                double dt, std::size_t count) {
  ThetaEstimate est;
  est.omega = omega;
  est.l1 = l1;
  est.l2 = l2;
  est.theta.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    est.theta[k] = l1 * std::sin(omega * t) + l2 * std::cos(omega * t);
  }
  return est;
}

std::vector<double> known_dynamics_series(const LtvSystem& sys,
                                          const Trajectory& traj, int row,
                                          bool use_estimates) {
  if (row < 0 || row >= sys.n) throw StructError("row out of range");
  const std::string prefix = use_estimates ? "xhat" : "x";
  std::vector<const std::vector<double>*> states(sys.n);
  for (int j = 0; j < sys.n; ++j) {
    states[j] = &traj.col(prefix + std::to_string(j + 1));
  }
  const auto& us = traj.col("u");

  std::vector<double> h(traj.samples());
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double t = traj.time_at(k);
    double acc = sys.B.at(row, 0).eval(t) * us[k];
    for (int j = 0; j < sys.n; ++j) {
      acc += sys.A0.at(row, j).eval(t) * (*states[j])[k];
    }
    h[k] = acc;
  }
  return h;
}

}  // namespace tvobs
