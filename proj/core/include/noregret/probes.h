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

#ifndef NOREGRET_PROBES_H_
#define NOREGRET_PROBES_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "noregret/dynamics.h"
#include "noregret/ensemble.h"
#include "noregret/pmf.h"

namespace noregret {

// Hindsight regret on realised play: max_i sum_s X(i, J_s) - sum_s X(I_s, J_s).
struct RegretReport {
  std::int64_t t = 0;
  double regret = 0.0;
  double normalized = 0.0;  // regret / sqrt(t)
  // Worst regret_u / sqrt(u) over every prefix u <= t.
  double max_normalized = 0.0;
  std::int64_t argmax_t = 0;
};

nlohmann::json ToJson(const RegretReport& report);

// Needs the full play sequence, i.e. a run whose tail window covers every
// step; anything less is rejected.
RegretReport RealizedRegret(const Trajectory& trajectory, Player player);

struct SensitivityReport {
  std::int64_t t = 0;
  std::int64_t s = 0;
  int tail_value = 1;
  double mean_response = 0.0;
  double ci_halfwidth = 0.0;  // 1.96 sample sd / sqrt(n)
  std::int64_t n_samples = 0;
};

nlohmann::json ToJson(const SensitivityReport& report);

// Player one faces Bernoulli(q*) for t - s steps and then s copies of
// tail_value; the response is the mixture it would play next. Requires
// 0 <= s < t and n_samples >= 1.
SensitivityReport SensitivityProbe(const StrategySpec& spec1,
                                   const Game2x2& game, std::int64_t t,
                                   std::int64_t s, std::int64_t n_samples,
                                   std::uint64_t master_seed,
                                   int tail_value = 1, int workers = 1);

struct SensitivityScan {
  std::vector<SensitivityReport> grid;
  std::size_t best = 0;  // index of the largest mean_response

  const SensitivityReport& Best() const { return grid[best]; }
};

nlohmann::json ToJson(const SensitivityScan& scan);

// s in {1, ratio, ratio^2, ...} below floor(alpha_coeff sqrt(t)), plus that
// upper end. All grid points share the master seed.
SensitivityScan ScanSensitivity(const StrategySpec& spec1, const Game2x2& game,
                                std::int64_t t, double alpha_coeff,
                                std::int64_t n_samples,
                                std::uint64_t master_seed,
                                double grid_ratio = 2.0, int workers = 1);

struct OscillationReport {
  std::vector<std::int64_t> checkpoints;
  std::vector<double> fraction_deviating;
  double center = 0.5;
  double delta = 0.1;
  std::int64_t n_runs = 0;
};

nlohmann::json ToJson(const OscillationReport& report);

// p_values[r][k] is replica r's P_t at checkpoints[k].
OscillationReport ReduceOscillation(
    const std::vector<std::vector<double>>& p_values,
    const std::vector<std::int64_t>& checkpoints, double p_star, double delta);

// Fraction of replicas with |P_t - p*| >= delta at each checkpoint. Requires
// 0 < delta < min(p*, 1 - p*).
OscillationReport OscillationEstimate(const RunConfig& config, double p_star,
                                      double delta,
                                      const std::vector<std::int64_t>& checkpoints,
                                      std::int64_t n_runs,
                                      std::uint64_t master_seed,
                                      int workers = 1);

struct DeviationPoint {
  std::int64_t t = 0;
  double value = 0.0;
};

// t^rate_exponent * |q_bar_t - q*| at every checkpoint.
std::vector<DeviationPoint> TimeAverageDeviation(const Trajectory& trajectory,
                                                 double q_star,
                                                 double rate_exponent = 0.5);

enum class Normalization { kBySigmaHat, kBySqrtT };

std::string_view ToString(Normalization n);

struct MartingaleCheckReport {
  std::int64_t t = 0;
  double ks_statistic = 0.0;
  std::int64_t n_runs = 0;
  Normalization normalization = Normalization::kBySigmaHat;
  // Set when some normaliser is zero; ks_statistic is then meaningless.
  bool degenerate = false;
  double sample_mean = 0.0;
  double sample_variance = 0.0;
};

nlohmann::json ToJson(const MartingaleCheckReport& report);

// Kolmogorov-Smirnov distance between the sample and N(0, 1).
double KsDistanceToNormal(std::vector<double> sample);

// kBySigmaHat: (Z_t - sum Q_s) / sqrt(sum Q_s (1 - Q_s)) per replica.
// kBySqrtT: sqrt(t) (Q_hat_t - Q_bar_t) standardised by its cross-replica
// sample standard deviation. Requires at least 50 records.
MartingaleCheckReport ReduceMartingale(
    const std::vector<CheckpointRecord>& records, Normalization normalization);

MartingaleCheckReport MartingaleCheck(const RunConfig& config, std::int64_t t,
                                      std::int64_t n_runs,
                                      std::uint64_t master_seed,
                                      Normalization normalization,
                                      int workers = 1);

struct StationarityReport {
  std::int64_t t = 0;
  std::int64_t n_runs = 0;
  double r_star = 0.0;
  double q_star = 0.0;
  double mean_payoff_rate = 0.0;  // mean of cumulative payoff / t
  double payoff_se = 0.0;
  double mean_z_rate = 0.0;       // mean of Z_t / t
  double z_se = 0.0;

  // Both means within k standard errors of their targets.
  bool Within(double k) const;
};

nlohmann::json ToJson(const StationarityReport& report);

// Player one against Bernoulli(q_star); q_star must make player one
// indifferent, which fixes R*.
StationarityReport StationarityCheck(const Game2x2& game,
                                     const StrategySpec& spec1, double q_star,
                                     std::int64_t t, std::int64_t n_runs,
                                     std::uint64_t master_seed,
                                     int workers = 1);

// Share of all steps with Q_s in [q*/2, (q* + 1)/2], from the online counter.
double NeighborhoodFraction(const Trajectory& trajectory, double q_star);

struct ShakyHandsComparison {
  RatioWindowReport window;
  // 95% interval of the ratio at argmin_z from binomial sampling error.
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct ShakyHandsReport {
  std::int64_t t = 0;
  double gamma = 1.0;
  std::int64_t n_runs = 0;
  Pmf empirical;                 // histogram of Z_t over replicas
  std::vector<double> mean_q;    // E[Q_s] estimates, s = 1..t
  ShakyHandsComparison vs_poisson_binomial;
  ShakyHandsComparison vs_binomial;
};

nlohmann::json ToJson(const ShakyHandsReport& report);

// Smallest replica count for which every z in the window has an expected
// Binomial(t, q*) count of at least 20.
std::int64_t ShakyHandsRequiredRuns(std::int64_t t, double q_star,
                                    double gamma);

// Histogram of Z_t against Poisson-binomial(E[Q_s]) and Binomial(t, q*) on
// [t q* - gamma sqrt(t), t q* + gamma sqrt(t)]. Throws std::invalid_argument
// naming the required n_runs when the window is undersampled.
ShakyHandsReport ShakyHandsEstimate(const RunConfig& config, double q_star,
                                    double gamma, std::int64_t n_runs,
                                    std::uint64_t master_seed,
                                    int workers = 1);

}  // namespace noregret

#endif  // NOREGRET_PROBES_H_
