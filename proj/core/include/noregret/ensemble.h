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

#ifndef NOREGRET_ENSEMBLE_H_
#define NOREGRET_ENSEMBLE_H_

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "noregret/dynamics.h"

namespace noregret {

// Everything one replica needs apart from its seed. Exactly one of spec2 and
// script is set.
struct RunConfig {
  Game2x2 game = MakeMatchingPennies();
  StrategySpec spec1;
  std::optional<StrategySpec> spec2;
  std::optional<OpponentScript> script;
  FeedbackMode mode = FeedbackMode::kRealization;
  std::int64_t steps = 1;
  RunOptions options;
};

// Throws std::invalid_argument if the config is inconsistent.
void ValidateRunConfig(const RunConfig& config);

Trajectory Run(const RunConfig& config, std::uint64_t seed);

// Hardware concurrency, at least 1.
int DefaultWorkers();

// Calls fn(i) for i in [0, count) on up to `workers` threads and returns the
// results in index order. The first exception thrown by any call is rethrown
// after all threads have joined.
template <typename Fn>
auto ParallelMap(std::int64_t count, int workers, Fn fn)
    -> std::vector<decltype(fn(std::int64_t{0}))> {
  using Result = decltype(fn(std::int64_t{0}));
  std::vector<std::optional<Result>> slots(static_cast<std::size_t>(count));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[static_cast<std::size_t>(i)].emplace(fn(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  const int n_threads = static_cast<int>(
      std::clamp<std::int64_t>(count, 1, std::max(workers, 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int k = 0; k < n_threads; ++k) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<Result> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// n_runs replicas; replica i uses seed MixSeed(master_seed, i). Output is in
// replica order whatever the worker count.
std::vector<Trajectory> MonteCarlo(const RunConfig& config,
                                   std::int64_t n_runs,
                                   std::uint64_t master_seed, int workers);

// Same, keeping only what `reduce` extracts from each replica.
template <typename Reduce>
auto MonteCarloMap(const RunConfig& config, std::int64_t n_runs,
                   std::uint64_t master_seed, int workers, Reduce reduce) {
  ValidateRunConfig(config);
  if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
  return ParallelMap(n_runs, workers, [&](std::int64_t i) {
    return reduce(Run(config, MixSeed(master_seed, static_cast<std::uint64_t>(i))));
  });
}

}  // namespace noregret

#endif  // NOREGRET_ENSEMBLE_H_
