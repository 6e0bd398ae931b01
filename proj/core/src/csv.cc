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

#include "noregret/csv.h"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace noregret {
namespace {

void WriteRecord(std::ostream& out, const CheckpointRecord& r) {
  out << r.t << ',' << FormatReal(r.p_t) << ',' << FormatReal(r.q_t) << ','
      << FormatReal(r.p_hat) << ',' << FormatReal(r.q_hat) << ','
      << FormatReal(r.p_bar) << ',' << FormatReal(r.q_bar) << ','
      << FormatReal(r.payoff1) << ',' << FormatReal(r.payoff2) << '\n';
}

}  // namespace

std::string FormatReal(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void WriteTrajectoryCsv(std::ostream& out, const Trajectory& trajectory) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : trajectory.checkpoints) WriteRecord(out, r);
}

void WriteEnsembleCsv(std::ostream& out,
                      const std::vector<Trajectory>& trajectories) {
  out << "replica," << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    for (const auto& r : trajectories[k].checkpoints) {
      out << k << ',';
      WriteRecord(out, r);
    }
  }
}

void WriteTailCsv(std::ostream& out, const Trajectory& trajectory) {
  out << "t,p,q,i,j,payoff1,payoff2\n";
  for (const auto& s : trajectory.tail) {
    out << s.t << ',' << FormatReal(s.p) << ',' << FormatReal(s.q) << ','
        << int{s.i} << ',' << int{s.j} << ',' << FormatReal(s.payoff1) << ','
        << FormatReal(s.payoff2) << '\n';
  }
}

void WriteTableCsv(std::ostream& out, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    out << (k ? "," : "") << header[k];
  }
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::invalid_argument("CSV row width does not match header");
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      out << (k ? "," : "") << FormatReal(row[k]);
    }
    out << '\n';
  }
}

void WriteFile(const std::string& path,
               const std::function<void(std::ostream&)>& write) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(out);
  out.flush();
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace noregret
