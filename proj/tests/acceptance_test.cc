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

// Runs every acceptance criterion and prints one PASS/FAIL line per
// criterion. Exit status is non-zero when any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "noregret/acceptance.h"
#include "noregret/ensemble.h"

int main(int argc, char** argv) {
  int workers = noregret::DefaultWorkers();
  if (argc > 1) workers = std::atoi(argv[1]);
  int failed = 0;
  const auto results = noregret::RunAcceptance(
      noregret::Tier::kFull, workers, [&](const noregret::CriterionResult& r) {
        std::printf("%s\n", noregret::FormatResultLine(r).c_str());
        std::fflush(stdout);
        failed += r.passed ? 0 : 1;
      });
  std::printf("%d/%zu acceptance criteria passed\n",
              static_cast<int>(results.size()) - failed, results.size());
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
