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

#ifndef NOREGRET_DYNAMICS_H_
#define NOREGRET_DYNAMICS_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "noregret/games.h"
#include "noregret/strategies.h"

namespace noregret {

enum class FeedbackMode { kRealization, kTelepathic };

std::string_view ToString(FeedbackMode mode);
FeedbackMode ParseFeedbackMode(std::string_view text);

// SplitMix64 finaliser. A bijection on 64-bit words.
std::uint64_t SplitMix64(std::uint64_t x);
// Seed of replica `index` under `master`: SplitMix64(master ^ SplitMix64(index)).
// Injective in `index` for a fixed master seed.
std::uint64_t MixSeed(std::uint64_t master, std::uint64_t index);

// Kahan-compensated accumulator.
class CompensatedSum {
 public:
  void Add(double x) {
    const double y = x - compensation_;
    const double next = sum_ + y;
    compensation_ = (next - sum_) - y;
    sum_ = next;
  }
  double value() const { return sum_ - compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// State of play after step t. In telepathic mode the "hat" fields equal the
// "bar" fields and payoffs are expected payoffs.
struct CheckpointRecord {
  std::int64_t t = 0;
  double p_t = 0.5;
  double q_t = 0.5;
  double p_hat = 0.0;
  double q_hat = 0.0;
  double p_bar = 0.0;
  double q_bar = 0.0;
  double payoff1 = 0.0;  // cumulative
  double payoff2 = 0.0;  // cumulative
  double z_t = 0.0;      // player two's action-1 count (t * q_bar when telepathic)
  double sum_var_q = 0.0;  // sum_s Q_s (1 - Q_s)
};

// One step at full resolution. Payoffs are cumulative through this step.
struct StepRecord {
  std::int64_t t = 0;
  double p = 0.5;
  double q = 0.5;
  std::int8_t i = 0;
  std::int8_t j = 0;
  double payoff1 = 0.0;
  double payoff2 = 0.0;
};

// Checkpoints at floor(base * ratio^k), deduplicated, plus `extra` points and
// the final step.
struct CheckpointSchedule {
  double base = 10.0;
  double ratio = 1.25;
  std::vector<std::int64_t> extra;

  std::vector<std::int64_t> Points(std::int64_t steps) const;

  bool operator==(const CheckpointSchedule&) const = default;
};

// Pre-scripted (or purely reactive) play for player two.
//
// Descriptor grammar: "iid:q=<p>", "prop1:q=<p>,t=<total>,s=<tail>,tail=<0|1>",
// "opposite-previous".
struct OpponentScript {
  enum class Kind { kIidBernoulli, kPiecewiseProp1, kOppositeOfPrevious };

  Kind kind = Kind::kIidBernoulli;
  double q = 0.5;
  std::int64_t t_total = 0;
  std::int64_t s_tail = 0;
  int tail_value = 1;

  static OpponentScript IidBernoulli(double q);
  // Bernoulli(q) for steps 1..t_total - s_tail, then the constant tail_value.
  static OpponentScript PiecewiseProp1(double q, std::int64_t t_total,
                                       std::int64_t s_tail, int tail_value);
  // Plays 1 - I_{t-1}; 0 at step 1.
  static OpponentScript OppositeOfPrevious();

  // Player two's mixture at step t given player one's previous realisation.
  double Mixture(std::int64_t t, int previous_own_action) const;

  static OpponentScript Parse(std::string_view descriptor);
  std::string ToString() const;

  bool operator==(const OpponentScript&) const = default;
};

struct RunOptions {
  CheckpointSchedule schedule;
  // Number of trailing steps kept at full resolution.
  std::int64_t tail_window = 10000;
  // Centre q of the online counter of steps with Q_s in [q/2, (q+1)/2].
  // Filled from the equilibrium of competitive games when unset.
  std::optional<double> neighborhood_center;
  // Step-1 mixtures overriding the learners' own first move. The symmetric
  // default start is a fixed point of telepathic play on symmetric games.
  std::optional<double> initial_p;
  std::optional<double> initial_q;

  bool operator==(const RunOptions&) const = default;
};

struct Trajectory {
  Game2x2 game = MakeMatchingPennies();
  StrategySpec spec1;
  std::optional<StrategySpec> spec2;
  std::optional<OpponentScript> script;
  FeedbackMode mode = FeedbackMode::kRealization;
  std::uint64_t seed = 0;
  std::int64_t steps = 0;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<StepRecord> tail;
  // Mixtures the players would use at step steps + 1.
  double next_p = 0.5;
  double next_q = 0.5;
  std::optional<double> neighborhood_center;
  std::int64_t neighborhood_count = 0;

  // Record at exactly t, or nullptr.
  const CheckpointRecord* At(std::int64_t t) const;
  const CheckpointRecord& Final() const { return checkpoints.back(); }
};

// Both players learn from realised bits drawn from independent per-player
// substreams of `seed`. Requires steps >= 1.
Trajectory RunRealization(const Game2x2& game, const StrategySpec& spec1,
                          const StrategySpec& spec2, std::int64_t steps,
                          std::uint64_t seed, const RunOptions& options = {});

// Both players learn from the running average of the opponent's mixtures.
// Deterministic.
Trajectory RunTelepathic(const Game2x2& game, const StrategySpec& spec1,
                         const StrategySpec& spec2, std::int64_t steps,
                         const RunOptions& options = {});

// Player one learns from realisations; player two follows `script`.
Trajectory RunVsScript(const Game2x2& game, const StrategySpec& spec1,
                       const OpponentScript& script, std::int64_t steps,
                       std::uint64_t seed, const RunOptions& options = {});

}  // namespace noregret

#endif  // NOREGRET_DYNAMICS_H_
