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

#include "tvobs/time_matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "tvobs/errors.hpp"

namespace tvobs {

TimeMatrix::TimeMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<std::size_t>(rows * cols)) {
  if (rows < 0 || cols < 0) throw StructError("negative matrix dimension");
}

TimeMatrix TimeMatrix::constant(const Eigen::MatrixXd& m) {
  TimeMatrix out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int r = 0; r < out.rows_; ++r) {
    for (int c = 0; c < out.cols_; ++c) {
      out.at(r, c) = Expr::constant(m(r, c));
    }
  }
  return out;
}

const Expr& TimeMatrix::at(int r, int c) const {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw StructError("matrix index out of range");
  }
  return entries_[static_cast<std::size_t>(r) * cols_ + c];
}

Expr& TimeMatrix::at(int r, int c) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
    throw StructError("matrix index out of range");
  }
  return entries_[static_cast<std::size_t>(r) * cols_ + c];
}

bool TimeMatrix::depends_on_time() const {
  for (const auto& e : entries_) {
    if (e.depends_on_time()) return true;
  }
  return false;
}

Eigen::MatrixXd eval_time_matrix(const TimeMatrix& m, double t,
                                 const std::string& name) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      const double v = m.at(r, c).eval(t);
      if (!std::isfinite(v)) {
        throw EvalError(name + " entry (" + std::to_string(r + 1) + "," +
                        std::to_string(c + 1) + ") is non-finite at t=" +
                        std::to_string(t));
      }
      out(r, c) = v;
    }
  }
  return out;
}

}  // namespace tvobs
