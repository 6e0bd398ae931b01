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

#include "noregret/probes.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace noregret {
namespace {

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation
};

// Two-pass mean and sample sd in index order.
MeanSd Describe(const std::vector<double>& xs) {
  MeanSd out;
  if (xs.empty()) return out;
  CompensatedSum sum;
  for (double x : xs) sum.Add(x);
  out.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  CompensatedSum sq;
  for (double x : xs) sq.Add((x - out.mean) * (x - out.mean));
  out.sd = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
  return out;
}

RunOptions LeanOptions() {
  RunOptions opts;
  opts.tail_window = 0;
  return opts;
}

double FinalResponse(const Trajectory& traj) { return traj.next_p; }

}  // namespace

nlohmann::json ToJson(const RegretReport& r) {
  return {{"t", r.t},
          {"regret", r.regret},
          {"normalized", r.normalized},
          {"max_normalized", r.max_normalized},
          {"argmax_t", r.argmax_t}};
}

RegretReport RealizedRegret(const Trajectory& traj, Player player) {
  if (traj.mode != FeedbackMode::kRealization) {
    throw std::invalid_argument("regret audits need realised play");
  }
  if (static_cast<std::int64_t>(traj.tail.size()) != traj.steps ||
      traj.tail.empty() || traj.tail.front().t != 1) {
    throw std::invalid_argument(
        "regret audit needs every step at full resolution; rerun with "
        "tail_window >= steps (" +
        std::to_string(traj.steps) + ")");
  }
  const Game2x2& game = traj.game;
  double alt[2] = {0.0, 0.0};
  double realized = 0.0;
  RegretReport out;
  out.max_normalized = -std::numeric_limits<double>::infinity();
  for (const StepRecord& rec : traj.tail) {
    if (player == Player::kOne) {
      for (int a = 0; a < 2; ++a) alt[a] += game.Payoff(player, a, rec.j);
      realized += game.Payoff(player, rec.i, rec.j);
    } else {
      for (int a = 0; a < 2; ++a) alt[a] += game.Payoff(player, rec.i, a);
      realized += game.Payoff(player, rec.i, rec.j);
    }
    const double regret = std::max(alt[0], alt[1]) - realized;
    const double normalized = regret / std::sqrt(static_cast<double>(rec.t));
    if (normalized > out.max_normalized) {
      out.max_normalized = normalized;
      out.argmax_t = rec.t;
    }
    out.t = rec.t;
    out.regret = regret;
    out.normalized = normalized;
  }
  return out;
}

nlohmann::json ToJson(const SensitivityReport& r) {
  return {{"t", r.t},
          {"s", r.s},
          {"tail_value", r.tail_value},
          {"mean_response", r.mean_response},
          {"ci_halfwidth", r.ci_halfwidth},
          {"n_samples", r.n_samples}};
}

SensitivityReport SensitivityProbe(const StrategySpec& spec1,
                                   const Game2x2& game, std::int64_t t,
                                   std::int64_t s, std::int64_t n_samples,
                                   std::uint64_t master_seed, int tail_value,
                                   int workers) {
  if (t < 1 || s < 0 || s >= t) {
    throw std::invalid_argument("sensitivity probe needs 0 <= s < t");
  }
  if (n_samples < 1) {
    throw std::invalid_argument("sensitivity probe needs n_samples >= 1");
  }
  RunConfig config;
  config.game = game;
  config.spec1 = spec1;
  config.script = OpponentScript::PiecewiseProp1(NashEquilibrium(game).q_star,
                                                 t, s, tail_value);
  config.steps = t;
  config.options = LeanOptions();
  const std::vector<double> responses = MonteCarloMap(
      config, n_samples, master_seed, workers, FinalResponse);
  const MeanSd d = Describe(responses);
  SensitivityReport out;
  out.t = t;
  out.s = s;
  out.tail_value = tail_value;
  out.mean_response = d.mean;
  out.ci_halfwidth = 1.96 * d.sd / std::sqrt(static_cast<double>(n_samples));
  out.n_samples = n_samples;
  return out;
}

nlohmann::json ToJson(const SensitivityScan& scan) {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& r : scan.grid) grid.push_back(ToJson(r));
  return {{"grid", grid}, {"best", ToJson(scan.Best())}};
}

SensitivityScan ScanSensitivity(const StrategySpec& spec1, const Game2x2& game,
                                std::int64_t t, double alpha_coeff,
                                std::int64_t n_samples,
                                std::uint64_t master_seed, double grid_ratio,
                                int workers) {
  const auto s_max = static_cast<std::int64_t>(
      std::floor(alpha_coeff * std::sqrt(static_cast<double>(t))));
  if (s_max < 1) {
    throw std::invalid_argument("scan needs alpha_coeff * sqrt(t) >= 1");
  }
  if (!(grid_ratio > 1.0)) {
    throw std::invalid_argument("scan grid ratio must exceed 1");
  }
  std::vector<std::int64_t> grid;
  for (double x = 1.0; x < static_cast<double>(s_max); x *= grid_ratio) {
    const auto s = static_cast<std::int64_t>(std::floor(x));
    if (grid.empty() || grid.back() != s) grid.push_back(s);
  }
  if (grid.empty() || grid.back() != s_max) grid.push_back(s_max);
  SensitivityScan scan;
  for (std::int64_t s : grid) {
    if (s >= t) break;
    scan.grid.push_back(SensitivityProbe(spec1, game, t, s, n_samples,
                                         master_seed, 1, workers));
    if (scan.grid.back().mean_response >
        scan.grid[scan.best].mean_response) {
      scan.best = scan.grid.size() - 1;
    }
  }
  if (scan.grid.empty()) throw std::invalid_argument("scan grid is empty");
  return scan;
}

nlohmann::json ToJson(const OscillationReport& r) {
  return {{"checkpoints", r.checkpoints},
          {"fraction_deviating", r.fraction_deviating},
          {"center", r.center},
          {"delta", r.delta},
          {"n_runs", r.n_runs}};
}

OscillationReport ReduceOscillation(
    const std::vector<std::vector<double>>& p_values,
    const std::vector<std::int64_t>& checkpoints, double p_star,
    double delta) {
  OscillationReport out;
  out.checkpoints = checkpoints;
  out.center = p_star;
  out.delta = delta;
  out.n_runs = static_cast<std::int64_t>(p_values.size());
  std::vector<std::int64_t> hits(checkpoints.size(), 0);
  for (const auto& row : p_values) {
    if (row.size() != checkpoints.size()) {
      throw std::invalid_argument("replica row does not match checkpoints");
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (std::abs(row[k] - p_star) >= delta) ++hits[k];
    }
  }
  for (std::int64_t h : hits) {
    out.fraction_deviating.push_back(
        out.n_runs == 0 ? 0.0
                        : static_cast<double>(h) /
                              static_cast<double>(out.n_runs));
  }
  return out;
}

OscillationReport OscillationEstimate(
    const RunConfig& config, double p_star, double delta,
    const std::vector<std::int64_t>& checkpoints, std::int64_t n_runs,
    std::uint64_t master_seed, int workers) {
  if (!(delta > 0.0 && delta < std::min(p_star, 1.0 - p_star))) {
    throw std::invalid_argument(
        "oscillation delta must lie in (0, min(p*, 1 - p*))");
  }
  for (std::int64_t c : checkpoints) {
    if (c < 1 || c > config.steps) {
      throw std::invalid_argument("oscillation checkpoint outside 1..steps");
    }
  }
  RunConfig cfg = config;
  cfg.options.tail_window = 0;
  cfg.options.schedule.extra.insert(cfg.options.schedule.extra.end(),
                                    checkpoints.begin(), checkpoints.end());
  const auto rows = MonteCarloMap(
      cfg, n_runs, master_seed, workers, [&](const Trajectory& traj) {
        std::vector<double> row;
        row.reserve(checkpoints.size());
        for (std::int64_t c : checkpoints) row.push_back(traj.At(c)->p_t);
        return row;
      });
  return ReduceOscillation(rows, checkpoints, p_star, delta);
}

std::vector<DeviationPoint> TimeAverageDeviation(const Trajectory& traj,
                                                 double q_star,
                                                 double rate_exponent) {
  std::vector<DeviationPoint> out;
  out.reserve(traj.checkpoints.size());
  for (const auto& rec : traj.checkpoints) {
    out.push_back({rec.t, std::pow(static_cast<double>(rec.t), rate_exponent) *
                              std::abs(rec.q_bar - q_star)});
  }
  return out;
}

std::string_view ToString(Normalization n) {
  return n == Normalization::kBySigmaHat ? "by-sigma-hat" : "by-sqrt-t";
}

nlohmann::json ToJson(const MartingaleCheckReport& r) {
  nlohmann::json j = {{"t", r.t},
                      {"n_runs", r.n_runs},
                      {"normalization", ToString(r.normalization)},
                      {"degenerate", r.degenerate},
                      {"sample_mean", r.sample_mean},
                      {"sample_variance", r.sample_variance}};
  if (r.degenerate) {
    j["ks_statistic"] = nullptr;
  } else {
    j["ks_statistic"] = r.ks_statistic;
  }
  return j;
}

double KsDistanceToNormal(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("empty KS sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double cdf = 0.5 * std::erfc(-sample[k] / std::sqrt(2.0));
    d = std::max({d, static_cast<double>(k + 1) / n - cdf,
                  cdf - static_cast<double>(k) / n});
  }
  return d;
}

MartingaleCheckReport ReduceMartingale(
    const std::vector<CheckpointRecord>& records,
    Normalization normalization) {
  if (records.size() < 50) {
    throw std::invalid_argument(
        "martingale check needs at least 50 replicas, got " +
        std::to_string(records.size()));
  }
  MartingaleCheckReport out;
  out.t = records.front().t;
  out.n_runs = static_cast<std::int64_t>(records.size());
  out.normalization = normalization;
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const auto& rec : records) {
    const double t = static_cast<double>(rec.t);
    const double diff = rec.z_t - t * rec.q_bar;
    if (normalization == Normalization::kBySigmaHat) {
      if (!(rec.sum_var_q > 0.0)) {
        out.degenerate = true;
        return out;
      }
      xs.push_back(diff / std::sqrt(rec.sum_var_q));
    } else {
      xs.push_back(diff / std::sqrt(t));
    }
  }
  if (normalization == Normalization::kBySqrtT) {
    const MeanSd d = Describe(xs);
    if (!(d.sd > 0.0)) {
      out.degenerate = true;
      return out;
    }
    for (double& x : xs) x /= d.sd;
  }
  const MeanSd d = Describe(xs);
  out.sample_mean = d.mean;
  out.sample_variance = d.sd * d.sd;
  out.ks_statistic = KsDistanceToNormal(std::move(xs));
  return out;
}

MartingaleCheckReport MartingaleCheck(const RunConfig& config, std::int64_t t,
                                      std::int64_t n_runs,
                                      std::uint64_t master_seed,
                                      Normalization normalization,
                                      int workers) {
  if (n_runs < 50) {
    throw std::invalid_argument(
        "martingale check needs at least 50 replicas, got " +
        std::to_string(n_runs));
  }
  RunConfig cfg = config;
  cfg.steps = t;
  cfg.options.tail_window = 0;
  const auto records = MonteCarloMap(
      cfg, n_runs, master_seed, workers,
      [](const Trajectory& traj) { return traj.Final(); });
  return ReduceMartingale(records, normalization);
}

bool StationarityReport::Within(double k) const {
  return std::abs(mean_payoff_rate - r_star) <= k * payoff_se &&
         std::abs(mean_z_rate - q_star) <= k * z_se;
}

nlohmann::json ToJson(const StationarityReport& r) {
  return {{"t", r.t},
          {"n_runs", r.n_runs},
          {"r_star", r.r_star},
          {"q_star", r.q_star},
          {"mean_payoff_rate", r.mean_payoff_rate},
          {"payoff_se", r.payoff_se},
          {"mean_z_rate", r.mean_z_rate},
          {"z_se", r.z_se}};
}

StationarityReport StationarityCheck(const Game2x2& game,
                                     const StrategySpec& spec1, double q_star,
                                     std::int64_t t, std::int64_t n_runs,
                                     std::uint64_t master_seed, int workers) {
  const double r0 = PurePayoff(game, Player::kOne, 0, q_star);
  const double r1 = PurePayoff(game, Player::kOne, 1, q_star);
  const double scale = std::max({1.0, std::abs(r0), std::abs(r1)});
  if (std::abs(r0 - r1) > 1e-9 * scale) {
    throw std::invalid_argument(
        "stationarity check needs q_star to make player one indifferent");
  }
  if (n_runs < 2) {
    throw std::invalid_argument("stationarity check needs n_runs >= 2");
  }
  RunConfig config;
  config.game = game;
  config.spec1 = spec1;
  config.script = OpponentScript::IidBernoulli(q_star);
  config.steps = t;
  config.options = LeanOptions();
  struct Pair {
    double payoff;
    double z;
  };
  const auto pairs = MonteCarloMap(
      config, n_runs, master_seed, workers, [](const Trajectory& traj) {
        const auto& f = traj.Final();
        const double n = static_cast<double>(f.t);
        return Pair{f.payoff1 / n, f.z_t / n};
      });
  std::vector<double> pay, z;
  for (const auto& p : pairs) {
    pay.push_back(p.payoff);
    z.push_back(p.z);
  }
  const double root_n = std::sqrt(static_cast<double>(n_runs));
  const MeanSd dp = Describe(pay);
  const MeanSd dz = Describe(z);
  StationarityReport out;
  out.t = t;
  out.n_runs = n_runs;
  out.r_star = 0.5 * (r0 + r1);
  out.q_star = q_star;
  out.mean_payoff_rate = dp.mean;
  out.payoff_se = dp.sd / root_n;
  out.mean_z_rate = dz.mean;
  out.z_se = dz.sd / root_n;
  return out;
}

double NeighborhoodFraction(const Trajectory& traj, double q_star) {
  if (!traj.neighborhood_center ||
      std::abs(*traj.neighborhood_center - q_star) > 1e-12) {
    throw std::invalid_argument(
        "trajectory has no neighbourhood counter centred at this q*");
  }
  return static_cast<double>(traj.neighborhood_count) /
         static_cast<double>(traj.steps);
}

namespace {

ShakyHandsComparison Compare(const Pmf& empirical, const Pmf& model,
                             const std::vector<std::int64_t>& hist,
                             std::int64_t n_runs, double center,
                             double halfwidth, double gamma) {
  ShakyHandsComparison out;
  out.window = MinPmfRatio(empirical, model, center, halfwidth);
  out.window.gamma = gamma;
  const double n = static_cast<double>(n_runs);
  const double p = static_cast<double>(hist[static_cast<std::size_t>(
                       out.window.argmin_z)]) /
                   n;
  const double half = 1.96 * std::sqrt(p * (1.0 - p) / n);
  const double m = model(out.window.argmin_z);
  out.ci_low = std::max(0.0, p - half) / m;
  out.ci_high = (p + half) / m;
  return out;
}

nlohmann::json ToJson(const ShakyHandsComparison& c) {
  nlohmann::json j = ToJson(c.window);
  j["ci_low"] = c.ci_low;
  j["ci_high"] = c.ci_high;
  return j;
}

}  // namespace

nlohmann::json ToJson(const ShakyHandsReport& r) {
  return {{"t", r.t},
          {"gamma", r.gamma},
          {"n_runs", r.n_runs},
          {"vs_poisson_binomial", ToJson(r.vs_poisson_binomial)},
          {"vs_binomial", ToJson(r.vs_binomial)}};
}

std::int64_t ShakyHandsRequiredRuns(std::int64_t t, double q_star,
                                    double gamma) {
  const Pmf model = BinomialPmf(t, q_star);
  const double center = static_cast<double>(t) * q_star;
  const double half = gamma * std::sqrt(static_cast<double>(t));
  double min_mass = 1.0;
  const auto lo = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::ceil(center - half)));
  const auto hi = std::min<std::int64_t>(
      t, static_cast<std::int64_t>(std::floor(center + half)));
  for (std::int64_t z = lo; z <= hi; ++z) min_mass = std::min(min_mass, model(z));
  if (!(min_mass > 0.0)) {
    throw std::invalid_argument("shaky-hands window has zero model mass");
  }
  return static_cast<std::int64_t>(std::ceil(20.0 / min_mass));
}

ShakyHandsReport ShakyHandsEstimate(const RunConfig& config, double q_star,
                                    double gamma, std::int64_t n_runs,
                                    std::uint64_t master_seed, int workers) {
  if (config.mode != FeedbackMode::kRealization) {
    throw std::invalid_argument("shaky-hands estimate needs realised play");
  }
  const std::int64_t t = config.steps;
  const std::int64_t required = ShakyHandsRequiredRuns(t, q_star, gamma);
  if (n_runs < required) {
    throw std::invalid_argument(
        "shaky-hands window undersampled: n_runs = " + std::to_string(n_runs) +
        " but at least " + std::to_string(required) + " are required");
  }
  RunConfig cfg = config;
  cfg.options.tail_window = t;
  ValidateRunConfig(cfg);

  // Fixed block size keeps the reduction order independent of `workers`.
  constexpr std::int64_t kBlock = 256;
  const std::int64_t n_blocks = (n_runs + kBlock - 1) / kBlock;
  struct Partial {
    std::vector<double> sum_q;
    std::vector<std::int64_t> hist;
  };
  const auto partials = ParallelMap(n_blocks, workers, [&](std::int64_t b) {
    Partial part{std::vector<double>(static_cast<std::size_t>(t), 0.0),
                 std::vector<std::int64_t>(static_cast<std::size_t>(t + 1), 0)};
    const std::int64_t end = std::min(n_runs, (b + 1) * kBlock);
    for (std::int64_t i = b * kBlock; i < end; ++i) {
      const Trajectory traj =
          Run(cfg, MixSeed(master_seed, static_cast<std::uint64_t>(i)));
      for (std::size_t s = 0; s < traj.tail.size(); ++s) {
        part.sum_q[s] += traj.tail[s].q;
      }
      ++part.hist[static_cast<std::size_t>(std::llround(traj.Final().z_t))];
    }
    return part;
  });
  std::vector<double> sum_q(static_cast<std::size_t>(t), 0.0);
  std::vector<std::int64_t> hist(static_cast<std::size_t>(t + 1), 0);
  for (const auto& part : partials) {
    for (std::size_t s = 0; s < sum_q.size(); ++s) sum_q[s] += part.sum_q[s];
    for (std::size_t z = 0; z < hist.size(); ++z) hist[z] += part.hist[z];
  }

  ShakyHandsReport out;
  out.t = t;
  out.gamma = gamma;
  out.n_runs = n_runs;
  out.mean_q.resize(sum_q.size());
  for (std::size_t s = 0; s < sum_q.size(); ++s) {
    out.mean_q[s] = std::clamp(sum_q[s] / static_cast<double>(n_runs), 0.0, 1.0);
  }
  std::vector<double> masses(hist.size());
  for (std::size_t z = 0; z < hist.size(); ++z) {
    masses[z] = static_cast<double>(hist[z]) / static_cast<double>(n_runs);
  }
  // Renormalise away the rounding of the integer division.
  const double total = std::accumulate(masses.begin(), masses.end(), 0.0);
  for (double& m : masses) m /= total;
  out.empirical = Pmf(0, std::move(masses));

  const double center = static_cast<double>(t) * q_star;
  const double half = gamma * std::sqrt(static_cast<double>(t));
  out.vs_poisson_binomial =
      Compare(out.empirical, PoissonBinomialPmf(out.mean_q), hist, n_runs,
              center, half, gamma);
  out.vs_binomial = Compare(out.empirical, BinomialPmf(t, q_star), hist,
                            n_runs, center, half, gamma);
  return out;
}

}  // namespace noregret
