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

#ifndef NOREGRET_ACCEPTANCE_H_
#define NOREGRET_ACCEPTANCE_H_

#include <functional>
#include <string>
#include <vector>

namespace noregret {

enum class Tier { kFast, kFull };

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 14;

// Criterion ids run by a tier. The fast tier skips the 10^6-step ensembles;
// the full tier runs everything. Each criterion always runs at its stated
// scale.
std::vector<int> CriteriaForTier(Tier tier);

std::string CriterionName(int id);

// Runs one criterion (1..14). Never throws; exceptions become failures.
CriterionResult RunCriterion(int id, int workers);

// Runs the tier's criteria in id order, calling `on_result` after each.
std::vector<CriterionResult> RunAcceptance(
    Tier tier, int workers,
    const std::function<void(const CriterionResult&)>& on_result = {});

// "[PASS] 7 telepathic-contrast (12.3 s): detail"
std::string FormatResultLine(const CriterionResult& result);

}  // namespace noregret

#endif  // NOREGRET_ACCEPTANCE_H_
