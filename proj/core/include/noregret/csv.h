// Copyright 2026 The noregret-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOREGRET_CSV_H_
#define NOREGRET_CSV_H_

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "noregret/dynamics.h"

namespace noregret {

// 17 significant digits ("%.17g"), enough to round-trip any double.
std::string FormatReal(double x);

inline constexpr char kTrajectoryHeader[] =
    "t,p_t,q_t,p_hat,q_hat,p_bar,q_bar,payoff1,payoff2";

// One row per checkpoint. LF line endings.
void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory);

// Trajectory rows prefixed by a replica index column.
void WriteEnsembleCsv(std::ostream& out,
                      const std::vector<Trajectory>& trajectories);

// Full-resolution tail: t,p,q,i,j,payoff1,payoff2.
void WriteTailCsv(std::ostream& out, const Trajectory& trajectory);

// Generic numeric table.
void WriteTableCsv(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

// Opens `path` for writing, runs `write`, and reports failures with the path.
void WriteFile(const std::string& path,
               const std::function<void(std::ostream&)>& write);

}  // namespace noregret

#endif  // NOREGRET_CSV_H_
