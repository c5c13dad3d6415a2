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

#include "tvobs/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvobs/errors.hpp"

namespace tvobs {

std::string format_sig9(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void export_csv(const Trajectory& traj, const std::string& path, int decimate) {
  if (decimate < 1) throw StructError("decimation factor must be >= 1");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write \"" + path + "\"");

  out << 't';
  for (const auto& name : traj.names()) out << ',' << name;
  out << '\n';

  const std::size_t ncols = traj.names().size();
  for (std::size_t k = 0; k < traj.samples(); k += static_cast<std::size_t>(decimate)) {
    out << format_sig9(traj.time_at(k));
    for (std::size_t c = 0; c < ncols; ++c) {
      out << ',' << format_sig9(traj.col(c)[k]);
    }
    out << '\n';
  }
  if (!out.good()) throw std::runtime_error("write failed for \"" + path + "\"");
}

Trajectory read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read \"" + path + "\"");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file \"" + path + "\"");

  std::vector<std::string> names;
  {
    std::stringstream header(line);
    std::string field;
    while (std::getline(header, field, ',')) names.push_back(field);
  }
  if (names.empty() || names[0] != "t") {
    throw std::runtime_error("missing time column in \"" + path + "\"");
  }

  std::vector<std::vector<double>> cols(names.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string field;
    std::size_t i = 0;
    while (std::getline(row, field, ',')) {
      if (i >= cols.size()) throw std::runtime_error("ragged row in \"" + path + "\"");
      cols[i++].push_back(std::strtod(field.c_str(), nullptr));
    }
    if (i != cols.size()) throw std::runtime_error("ragged row in \"" + path + "\"");
  }

  Trajectory traj;
  const auto& ts = cols[0];
  traj.t0 = ts.empty() ? 0.0 : ts[0];
  traj.dt = ts.size() < 2 ? 0.0 : ts[1] - ts[0];
  for (std::size_t c = 1; c < names.size(); ++c) {
    traj.add(names[c], std::move(cols[c]));
  }
  return traj;
}

}  // namespace tvobs
