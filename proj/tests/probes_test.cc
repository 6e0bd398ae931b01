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

#include "gtest/gtest.h"

namespace noregret {
namespace {

double BinomialMass(int n, int k, double q) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0) + k * std::log(q) +
                  (n - k) * std::log1p(-q));
}

RunOptions FullTail(std::int64_t steps) {
  RunOptions opts;
  opts.tail_window = steps;
  return opts;
}

TEST(ProbesTest, RegretMatchesDirectRecount) {
  const Game2x2 game = MakeCompetitiveFamily(0.3, 2.0);
  const auto traj = RunRealization(game, StrategySpec::Hedge(0.5),
                                   StrategySpec::Hedge(0.5), 2000, 8,
                                   FullTail(2000));
  for (Player player : {Player::kOne, Player::kTwo}) {
    double alt0 = 0, alt1 = 0, got = 0, worst = -1e300;
    for (const StepRecord& s : traj.tail) {
      if (player == Player::kOne) {
        alt0 += game.g()[0][s.j];
        alt1 += game.g()[1][s.j];
        got += game.g()[s.i][s.j];
      } else {
        alt0 += game.h()[s.i][0];
        alt1 += game.h()[s.i][1];
        got += game.h()[s.i][s.j];
      }
      worst = std::max(worst, (std::max(alt0, alt1) - got) / std::sqrt(s.t * 1.0));
    }
    const RegretReport r = RealizedRegret(traj, player);
    EXPECT_EQ(r.t, 2000);
    EXPECT_NEAR(r.regret, std::max(alt0, alt1) - got, 1e-9);
    EXPECT_NEAR(r.max_normalized, worst, 1e-12);
    EXPECT_GE(r.max_normalized, r.normalized);
  }
}

TEST(ProbesTest, StubbornLearnerHasLinearRegret) {
  const Game2x2 mp = MakeMatchingPennies();
  const int worse = mp.g()[1][1] > mp.g()[0][1] ? 0 : 1;
  const double gap = std::abs(mp.g()[1][1] - mp.g()[0][1]);
  const auto traj = RunVsScript(mp, StrategySpec::Fixed(worse),
                                OpponentScript::IidBernoulli(1.0), 400, 1,
                                FullTail(400));
  const RegretReport r = RealizedRegret(traj, Player::kOne);
  EXPECT_DOUBLE_EQ(r.regret, 400 * gap);
  EXPECT_DOUBLE_EQ(r.normalized, 20 * gap);
}

TEST(ProbesTest, HedgeRegretIsOrderSqrtT) {
  const auto traj = RunVsScript(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                                OpponentScript::IidBernoulli(0.5), 20000, 2,
                                FullTail(20000));
  EXPECT_LT(RealizedRegret(traj, Player::kOne).max_normalized, 3.0);
}

TEST(ProbesTest, RegretAuditRejectsPartialHistories) {
  const Game2x2 mp = MakeMatchingPennies();
  RunOptions partial;
  partial.tail_window = 10;
  const auto cut = RunRealization(mp, StrategySpec::Hedge(0.5),
                                  StrategySpec::Hedge(0.5), 100, 1, partial);
  EXPECT_THROW(RealizedRegret(cut, Player::kOne), std::invalid_argument);
  const auto tele = RunTelepathic(mp, StrategySpec::Hedge(0.5),
                                  StrategySpec::Hedge(0.5), 100);
  EXPECT_THROW(RealizedRegret(tele, Player::kOne), std::invalid_argument);
}

TEST(ProbesTest, SensitivityWithoutTailMatchesBinomialAverage) {
  const Game2x2 mp = MakeMatchingPennies();
  const int t = 400;
  const double q = NashEquilibrium(mp).q_star;
  double expected = 0.0;
  for (int z = 0; z <= t; ++z) {
    const double x = static_cast<double>(z) / t;
    const double eta = 1.0 / std::sqrt(t + 1.0);
    const double w1 = std::exp(eta * t * PurePayoff(mp, Player::kOne, 1, x));
    const double w0 = std::exp(eta * t * PurePayoff(mp, Player::kOne, 0, x));
    expected += BinomialMass(t, z, q) * w1 / (w0 + w1);
  }
  const SensitivityReport r =
      SensitivityProbe(StrategySpec::Hedge(0.5), mp, t, 0, 4000, 21, 1, 2);
  EXPECT_EQ(r.n_samples, 4000);
  EXPECT_GT(r.ci_halfwidth, 0.0);
  EXPECT_NEAR(r.mean_response, expected, 2 * r.ci_halfwidth);
  EXPECT_THROW(SensitivityProbe(StrategySpec::Hedge(0.5), mp, t, t, 10, 1),
               std::invalid_argument);
  EXPECT_THROW(SensitivityProbe(StrategySpec::Hedge(0.5), mp, t, 1, 0, 1),
               std::invalid_argument);
}

TEST(ProbesTest, SensitivityGridAndBest) {
  const Game2x2 mp = MakeMatchingPennies();
  const SensitivityScan scan =
      ScanSensitivity(StrategySpec::Hedge(0.5), mp, 900, 2.0, 50, 3);
  // floor(2 sqrt(900)) = 60.
  const std::vector<std::int64_t> want = {1, 2, 4, 8, 16, 32, 60};
  ASSERT_EQ(scan.grid.size(), want.size());
  double best = -1.0;
  for (std::size_t k = 0; k < want.size(); ++k) {
    EXPECT_EQ(scan.grid[k].s, want[k]);
    best = std::max(best, scan.grid[k].mean_response);
  }
  EXPECT_EQ(scan.Best().mean_response, best);
  // A longer run of ones pushes the matching player further towards action 1.
  EXPECT_GT(scan.grid.back().mean_response, scan.grid.front().mean_response);
}

TEST(ProbesTest, OscillationReduction) {
  const std::vector<std::vector<double>> p = {
      {0.5, 0.65, 0.2}, {0.55, 0.5, 0.5}, {0.1, 0.41, 0.5}, {0.5, 0.5, 0.9}};
  const OscillationReport r = ReduceOscillation(p, {10, 20, 30}, 0.5, 0.1);
  ASSERT_EQ(r.fraction_deviating.size(), 3u);
  EXPECT_DOUBLE_EQ(r.fraction_deviating[0], 0.25);
  EXPECT_DOUBLE_EQ(r.fraction_deviating[1], 0.25);
  EXPECT_DOUBLE_EQ(r.fraction_deviating[2], 0.5);
  EXPECT_EQ(r.n_runs, 4);
}

TEST(ProbesTest, OscillationAtEquilibriumIsZero) {
  RunConfig config;
  config.spec1 = StrategySpec::Fixed(0.5);
  config.spec2 = StrategySpec::Fixed(0.5);
  config.steps = 1000;
  const OscillationReport r =
      OscillationEstimate(config, 0.5, 0.1, {10, 100, 1000}, 20, 1);
  for (double f : r.fraction_deviating) EXPECT_EQ(f, 0.0);
  EXPECT_THROW(OscillationEstimate(config, 0.5, 0.6, {10}, 2, 1),
               std::invalid_argument);
}

TEST(ProbesTest, TimeAverageDeviationUsesCheckpoints) {
  const auto traj = RunVsScript(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                                OpponentScript::IidBernoulli(0.5), 5000, 3);
  const auto dev = TimeAverageDeviation(traj, 0.5, 0.5);
  ASSERT_EQ(dev.size(), traj.checkpoints.size());
  for (std::size_t k = 0; k < dev.size(); ++k) {
    const auto& c = traj.checkpoints[k];
    EXPECT_EQ(dev[k].t, c.t);
    EXPECT_NEAR(dev[k].value, std::sqrt(c.t * 1.0) * std::abs(c.q_bar - 0.5),
                1e-12);
  }
}

TEST(ProbesTest, KsDistanceOracle) {
  // Midpoint normal quantiles have KS distance exactly 1 / (2n).
  std::vector<double> sample;
  const int n = 200;
  for (int k = 0; k < n; ++k) {
    const double u = (k + 0.5) / n;
    // Invert the normal CDF by bisection.
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (0.5 * std::erfc(-mid / std::sqrt(2.0)) < u ? lo : hi) = mid;
    }
    sample.push_back(0.5 * (lo + hi));
  }
  std::reverse(sample.begin(), sample.end());
  EXPECT_NEAR(KsDistanceToNormal(sample), 0.5 / n, 1e-9);
  for (double& x : sample) x += 1.0;
  EXPECT_GT(KsDistanceToNormal(sample), 0.3);
}

TEST(ProbesTest, MartingaleRequiresEnoughNonDegenerateRecords) {
  std::vector<CheckpointRecord> few(49);
  EXPECT_THROW(ReduceMartingale(few, Normalization::kBySigmaHat),
               std::invalid_argument);
  std::vector<CheckpointRecord> flat(60);
  for (auto& r : flat) {
    r.t = 10;
    r.z_t = 10;
    r.q_hat = 1;
    r.q_bar = 1;
  }
  EXPECT_TRUE(ReduceMartingale(flat, Normalization::kBySigmaHat).degenerate);
  EXPECT_TRUE(ReduceMartingale(flat, Normalization::kBySqrtT).degenerate);
}

TEST(ProbesTest, MartingaleStatisticIsNormalForFixedOpponent) {
  RunConfig config;
  config.spec1 = StrategySpec::Hedge(0.5);
  config.spec2 = StrategySpec::Fixed(0.3);
  config.steps = 2000;
  for (Normalization n : {Normalization::kBySigmaHat, Normalization::kBySqrtT}) {
    const auto r = MartingaleCheck(config, 2000, 500, 5, n, 2);
    EXPECT_FALSE(r.degenerate);
    EXPECT_EQ(r.n_runs, 500);
    EXPECT_LT(r.ks_statistic, 0.1) << ToString(n);
    EXPECT_NEAR(r.sample_mean, 0.0, 0.2);
    EXPECT_NEAR(r.sample_variance, 1.0, 0.2);
  }
}

TEST(ProbesTest, StationarityAtIndifference) {
  const Game2x2 mp = MakeMatchingPennies();
  const double q = NashEquilibrium(mp).q_star;
  const auto r = StationarityCheck(mp, StrategySpec::Hedge(0.5), q, 2000, 300, 4);
  EXPECT_DOUBLE_EQ(r.q_star, q);
  EXPECT_DOUBLE_EQ(r.r_star, PurePayoff(mp, Player::kOne, 0, q));
  EXPECT_TRUE(r.Within(4.0));
  EXPECT_THROW(StationarityCheck(mp, StrategySpec::Hedge(0.5), 0.2, 100, 10, 1),
               std::invalid_argument);
}

TEST(ProbesTest, NeighborhoodFractionExtremes) {
  const Game2x2 mp = MakeMatchingPennies();
  const double q = NashEquilibrium(mp).q_star;
  const auto inside = RunRealization(mp, StrategySpec::Hedge(0.5),
                                     StrategySpec::Fixed(q), 300, 1);
  EXPECT_DOUBLE_EQ(NeighborhoodFraction(inside, q), 1.0);
  const auto outside = RunRealization(mp, StrategySpec::Hedge(0.5),
                                      StrategySpec::Fixed(0.0), 300, 1);
  EXPECT_DOUBLE_EQ(NeighborhoodFraction(outside, q), 0.0);
  EXPECT_THROW(NeighborhoodFraction(outside, q + 0.1), std::invalid_argument);
}

TEST(ProbesTest, ShakyHandsRunCountAndFixedOpponent) {
  const int t = 100;
  const double q = 0.5;
  double min_mass = 1.0;
  for (int z = 40; z <= 60; ++z) min_mass = std::min(min_mass, BinomialMass(t, z, q));
  const std::int64_t need = ShakyHandsRequiredRuns(t, q, 1.0);
  EXPECT_EQ(need, static_cast<std::int64_t>(std::ceil(20.0 / min_mass)));

  RunConfig config;
  config.spec1 = StrategySpec::Hedge(0.5);
  config.spec2 = StrategySpec::Fixed(q);
  config.steps = t;
  config.options.tail_window = 0;
  EXPECT_THROW(ShakyHandsEstimate(config, q, 1.0, need - 1, 1),
               std::invalid_argument);
  const ShakyHandsReport r = ShakyHandsEstimate(config, q, 1.0, need, 6, 2);
  EXPECT_EQ(r.n_runs, need);
  EXPECT_NEAR(r.empirical.Total(), 1.0, 1e-12);
  ASSERT_EQ(r.mean_q.size(), static_cast<std::size_t>(t));
  for (double m : r.mean_q) EXPECT_DOUBLE_EQ(m, q);
  EXPECT_NEAR(r.vs_binomial.window.min_ratio,
              r.vs_poisson_binomial.window.min_ratio, 1e-9);
  EXPECT_LE(r.vs_binomial.ci_low, r.vs_binomial.window.min_ratio);
  EXPECT_GE(r.vs_binomial.ci_high, r.vs_binomial.window.min_ratio);

  // With ample replicas the exact model is recovered: ratio 1 within the CI.
  const ShakyHandsReport big = ShakyHandsEstimate(config, q, 1.0, 16 * need, 6, 2);
  EXPECT_LE(big.vs_binomial.ci_low, 1.0);
  EXPECT_GE(big.vs_binomial.ci_high, 1.0);
}

TEST(ProbesTest, ReportsSerialise) {
  RegretReport r;
  r.t = 5;
  r.regret = 2.0;
  EXPECT_EQ(ToJson(r)["t"], 5);
  StationarityReport s;
  s.n_runs = 3;
  EXPECT_EQ(ToJson(s)["n_runs"], 3);
}

}  // namespace
}  // namespace noregret
