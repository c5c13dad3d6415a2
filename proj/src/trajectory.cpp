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

#include "tvobs/trajectory.hpp"

#include "tvobs/errors.hpp"

namespace tvobs {

bool Trajectory::has(const std::string& name) const {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

std::vector<double>& Trajectory::add(const std::string& name) {
  return add(name, std::vector<double>(samples_, 0.0));
}

std::vector<double>& Trajectory::add(const std::string& name,
                                     std::vector<double> data) {
  if (has(name)) throw StructError("duplicate column \"" + name + "\"");
  if (!sized_) {
    samples_ = data.size();
    sized_ = true;
  } else if (data.size() != samples_) {
    throw StructError("column \"" + name + "\" length mismatch");
  }
  names_.push_back(name);
  columns_.push_back(std::move(data));
  return columns_.back();
}

std::vector<double>& Trajectory::col(const std::string& name) {
  return columns_[index_of(name)];
}

const std::vector<double>& Trajectory::col(const std::string& name) const {
  return columns_[index_of(name)];
}

void Trajectory::set_samples(std::size_t n) {
  if (sized_ && !columns_.empty()) throw StructError("trajectory already sized");
  samples_ = n;
  sized_ = true;
}

std::size_t Trajectory::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw StructError("no column \"" + name + "\"");
}

}  // namespace tvobs
