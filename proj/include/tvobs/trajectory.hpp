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

#include <cstddef>
#include <string>
#include <vector>

namespace tvobs {

// Named scalar series on a shared uniform clock. Timestamps are
// t0 + k*dt exactly; all columns share one length.
class Trajectory {
 public:
  double t0 = 0.0;
  double dt = 0.0;

  std::size_t samples() const { return samples_; }
  double time_at(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }

  const std::vector<std::string>& names() const { return names_; }
  bool has(const std::string& name) const;

  // Appends a zero-filled column; first column fixes the length.
  std::vector<double>& add(const std::string& name);
  std::vector<double>& add(const std::string& name, std::vector<double> data);

  std::vector<double>& col(const std::string& name);
  const std::vector<double>& col(const std::string& name) const;
  const std::vector<double>& col(std::size_t i) const { return columns_[i]; }

  void set_samples(std::size_t n);

 private:
  std::size_t index_of(const std::string& name) const;

  std::size_t samples_ = 0;
  bool sized_ = false;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

}  // namespace tvobs
