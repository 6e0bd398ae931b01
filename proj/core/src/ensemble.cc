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

#include "noregret/ensemble.h"

#include <stdexcept>

namespace noregret {

void ValidateRunConfig(const RunConfig& config) {
  if (config.spec2.has_value() == config.script.has_value()) {
    throw std::invalid_argument(
        "a run needs exactly one of strategy2 and script");
  }
  if (config.script && config.mode == FeedbackMode::kTelepathic) {
    throw std::invalid_argument("scripted opponents need realization mode");
  }
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
}

Trajectory Run(const RunConfig& config, std::uint64_t seed) {
  ValidateRunConfig(config);
  if (config.script) {
    return RunVsScript(config.game, config.spec1, *config.script, config.steps,
                       seed, config.options);
  }
  if (config.mode == FeedbackMode::kTelepathic) {
    return RunTelepathic(config.game, config.spec1, *config.spec2,
                         config.steps, config.options);
  }
  return RunRealization(config.game, config.spec1, *config.spec2,
                        config.steps, seed, config.options);
}

int DefaultWorkers() {
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

std::vector<Trajectory> MonteCarlo(const RunConfig& config,
                                   std::int64_t n_runs,
                                   std::uint64_t master_seed, int workers) {
  return MonteCarloMap(config, n_runs, master_seed, workers,
                       [](Trajectory t) { return t; });
}

}  // namespace noregret
