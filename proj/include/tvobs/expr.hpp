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

#include <memory>
#include <string>

namespace tvobs {

struct ExprNode;

// Scalar expression in the time variable t. Grammar: constants, t,
// sin(...), cos(...), +, -, * and parentheses. Immutable after parse.
class Expr {
 public:
  Expr();  // constant 0

  static Expr constant(double v);
  static Expr time();
  static Expr sin(Expr a);
  static Expr cos(Expr a);
  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr neg(Expr a);

  // Throws EvalError with position info on malformed input.
  static Expr parse(const std::string& text);

  double eval(double t) const;
  bool depends_on_time() const;

  // Canonical text form; parse(str()) rebuilds the same tree.
  std::string str() const;

 private:
  explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const ExprNode> node_;
};

// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace tvobs
