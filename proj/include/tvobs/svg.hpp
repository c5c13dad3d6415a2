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

#include <string>
#include <vector>

namespace tvobs {

struct PlotSeries {
  std::string label;
  std::vector<double> y;
  bool dashed = false;
};

// Writes one self-contained SVG line chart. Output is deterministic for
// identical input. Long series are thinned to at most 1500 points. A
// degenerate value range around v widens to [v-1, v+1]. Throws
// std::runtime_error when the path is unwritable.
void write_line_plot(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<double>& x,
                     const std::vector<PlotSeries>& series);

}  // namespace tvobs
