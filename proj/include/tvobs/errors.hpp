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

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvobs {

// Collected configuration problems; never reports just the first one.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "configuration invalid:";
    for (const auto& s : issues) {
      out += "\n  " + s;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

// Structural misuse of an API: bad dimensions, improper filter orders.
class StructError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expression or matrix entry evaluated to a non-finite value.
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A simulated or filtered state left the finite range.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(double t)
      : std::runtime_error("state became non-finite at t=" + std::to_string(t)),
        t_(t) {}
  explicit DivergenceError(const std::string& what)
      : std::runtime_error(what), t_(std::nan("")) {}

  double when() const { return t_; }

 private:
  double t_;
};

// A guarded division hit a near-zero denominator.
class SingularityError : public std::runtime_error {
 public:
  explicit SingularityError(double t)
      : std::runtime_error("division guard tripped at t=" + std::to_string(t)),
        t_(t) {}

  double when() const { return t_; }

 private:
  double t_;
};

}  // namespace tvobs
