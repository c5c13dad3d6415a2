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

#include "tvobs/trajectory.hpp"

namespace tvobs {

// Value formatting used in CSV and report files: 9 significant digits.
std::string format_sig9(double v);

// Writes one header row (t plus the trajectory's columns in declared
// order) and every sample whose index is a multiple of decimate.
// Throws std::runtime_error when the path is unwritable.
void export_csv(const Trajectory& traj, const std::string& path,
                int decimate = 1);

// Reads a file written by export_csv; t0 and dt are recovered from the
// first two rows (both zero when fewer rows exist).
Trajectory read_csv(const std::string& path);

}  // namespace tvobs
