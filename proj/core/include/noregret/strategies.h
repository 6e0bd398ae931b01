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

#ifndef NOREGRET_STRATEGIES_H_
#define NOREGRET_STRATEGIES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "noregret/games.h"

namespace noregret {

// Step size schedule. kFixedPower uses eta_t = t^(-exponent); the adaptive
// kind only promises the pointwise floor eta_t >= floor_constant / sqrt(t).
struct LearningRateSchedule {
  enum class Kind { kFixedPower, kAdaptiveWithFloor };

  Kind kind = Kind::kFixedPower;
  double exponent = 0.5;
  double floor_constant = 1.0;

  // eta_t for kFixedPower, the floor C / sqrt(t) for kAdaptiveWithFloor.
  double Rate(std::int64_t t) const;

  bool operator==(const LearningRateSchedule&) const = default;
};

// Recency weights r_1..r_ell, r_1 applying to the newest observation. An empty
// weight list is the exact mean-based rule; {1} is optimism.
struct RecencySpec {
  std::vector<int> weights;

  int ell() const { return static_cast<int>(weights.size()); }

  bool operator==(const RecencySpec&) const = default;
};

enum class StrategyFamily { kHedge, kLogBarrier, kFixedMixture, kAdaptiveHedge };

// Declarative description of a learner. The seat it plays in is supplied when
// a StrategyState is built.
//
// Descriptor grammar, `family[:key=value[,key=value]...]`:
//   hedge | logbarrier                   keys r (in [0.5, 1)), ell, w
//   optimistic-hedge | optimistic-logbarrier
//                                        as above with ell defaulting to 1
//   adahedge                             key C (> 0)
//   fixed                                key q (in [0, 1])
// `w` lists the ell recency weights newest-first separated by '/', each an
// integer in {1..ell}; it defaults to all ones. Example:
// "hedge:r=0.5,ell=2,w=2/1".
struct StrategySpec {
  StrategyFamily family = StrategyFamily::kHedge;
  LearningRateSchedule schedule;
  RecencySpec recency;
  double fixed_q = 0.5;

  static StrategySpec Hedge(double exponent, RecencySpec recency = {});
  static StrategySpec LogBarrier(double exponent, RecencySpec recency = {});
  static StrategySpec AdaptiveHedge(double floor_constant);
  static StrategySpec Fixed(double q);

  // Throws std::invalid_argument naming the offending key and the grammar.
  static StrategySpec Parse(std::string_view descriptor);
  // Canonical descriptor; Parse(ToString()) == *this.
  std::string ToString() const;

  bool operator==(const StrategySpec&) const = default;
};

// Achieved regret bound c * t^r. r = 0.5 is the optimal rate.
struct RegretRate {
  double r = 0.5;
  double c = 1.0;
};

// What a learner knows at step t: the opponent's observations so far (bits in
// realization mode, mixtures in telepathic mode), the most recent ones for
// recency bias, and its own normalised cumulative loss for adaptive rates.
class HistorySummary {
 public:
  explicit HistorySummary(int recency_capacity = 0);

  // Index of the step about to be played; 1 before any observation.
  std::int64_t t() const { return observations_ + 1; }
  // Sum of opponent observations (the count Z_{t-1} in realization mode).
  double z() const { return sum_ - compensation_; }
  // z / (t - 1), or `prior` at t = 1.
  double EmpiricalAverage(double prior = 0.5) const;

  int recent_count() const { return recent_count_; }
  // j = 1 is the newest observation; requires 1 <= j <= recent_count().
  double Recent(int j) const;

  double own_loss() const { return own_loss_; }

  void Record(double opponent_value, double own_loss_increment = 0.0);

 private:
  std::int64_t observations_ = 0;
  double sum_ = 0.0;
  double compensation_ = 0.0;
  std::vector<double> ring_;
  int head_ = 0;
  int recent_count_ = 0;
  double own_loss_ = 0.0;
};

// Probability of action 1 under Hedge at step t when the opponent's (possibly
// biased) average is `statistic`: weights proportional to
// exp(eta (t - 1) X(i, statistic)). The statistic is clamped to [0, 1] before
// payoff evaluation. Output is kept inside [2^-53, 1 - 2^-53].
double HedgeMap(const Game2x2& game, Player role, std::int64_t t,
                double statistic, double eta);
double HedgeMap(const Game2x2& game, Player role, std::int64_t t,
                double statistic, const LearningRateSchedule& schedule);

// Root in (0, 1) of d p^2 + (2 - d) p - 1 = 0.
double LogBarrierProbability(double d);

// Log-barrier regularised leader: maximiser of
// p S_1 + (1 - p) S_0 + (log p + log(1 - p)) / eta with S_i = (t - 1) X(i, x).
double LogBarrierMap(const Game2x2& game, Player role, std::int64_t t,
                     double statistic, double eta);
double LogBarrierMap(const Game2x2& game, Player role, std::int64_t t,
                     double statistic, const LearningRateSchedule& schedule);

// (z + sum_j r_j * recent_j) / (t - 1); weights whose observation has not
// happened yet are dropped. Returns 0.5 at t = 1.
double ApplyRecencyBias(const HistorySummary& summary,
                        const RecencySpec& recency);

// Doubling-trick state for adaptive Hedge: the current loss budget doubles
// whenever the learner's own realised loss exceeds it.
struct AdaptiveHedgeState {
  double floor_constant = 1.0;
  double loss_budget = 1.0;
};

struct AdaptiveHedgeOutput {
  double probability = 0.5;
  double proposed_eta = 0.0;
  double effective_eta = 0.0;
  AdaptiveHedgeState next;
};

// eta = max(sqrt(ln 2 / budget), C / sqrt(t)) applied to Hedge on the
// unbiased empirical average.
AdaptiveHedgeOutput AdaptiveHedgeStep(const AdaptiveHedgeState& state,
                                      const Game2x2& game, Player role,
                                      const HistorySummary& summary);

// Hedge for player one of matching pennies at rate exactly C / sqrt(t) on the
// unbiased empirical average. Requires t >= 2.
double CounterfactualHedgeIterate(const HistorySummary& summary, double c);

inline double FixedMixtureMap(double q) { return q; }

enum class Monotonicity { kNonDecreasing, kNonIncreasing, kNonMonotone };

std::string_view ToString(Monotonicity m);

// Classifies the step-t map on a uniform grid of statistics over [0, 1].
// Constant maps report kNonDecreasing.
Monotonicity MonotonicityCheck(const StrategySpec& spec, const Game2x2& game,
                               Player role, std::int64_t t, int grid_size);

// Evaluates the step-t map of a history-free rule at `statistic`. Adaptive
// Hedge is evaluated at its floor rate.
double EvaluateMap(const StrategySpec& spec, const Game2x2& game, Player role,
                   std::int64_t t, double statistic);

// Per-run mutable learner. Confined to one thread.
class StrategyState {
 public:
  StrategyState(StrategySpec spec, const Game2x2& game, Player role);

  // Mixed action for step summary().t(). Step 1 plays 0.5 except FixedMixture.
  double MixedAction();

  // Records the opponent's observation for the current step and the learner's
  // own play (a realised bit or its mixture), then advances to the next step.
  void Observe(double opponent_value, double own_value);

  const HistorySummary& summary() const { return summary_; }
  const StrategySpec& spec() const { return spec_; }
  // Rate used by the last MixedAction call (0 for FixedMixture).
  double last_eta() const { return last_eta_; }

 private:
  StrategySpec spec_;
  Game2x2 game_;
  Player role_;
  HistorySummary summary_;
  AdaptiveHedgeState adaptive_;
  double loss_min_ = 0.0;
  double loss_range_ = 0.0;
  double last_eta_ = 0.0;
};

}  // namespace noregret

#endif  // NOREGRET_STRATEGIES_H_
