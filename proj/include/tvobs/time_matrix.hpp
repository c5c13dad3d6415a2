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
#include <string>
#include <vector>

#include "tvobs/expr.hpp"

namespace tvobs {

// Matrix whose entries are scalar expressions in t. Row-major storage.
class TimeMatrix {
 public:
  TimeMatrix() = default;
  TimeMatrix(int rows, int cols);

  static TimeMatrix constant(const Eigen::MatrixXd& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  const Expr& at(int r, int c) const;
  Expr& at(int r, int c);

  bool depends_on_time() const;

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<Expr> entries_;
};

// Dense value at time t. Throws EvalError naming the first non-finite
// entry; name labels the matrix in the message.
Eigen::MatrixXd eval_time_matrix(const TimeMatrix& m, double t,
                                 const std::string& name = "matrix");

}  // namespace tvobs
