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

#include "noregret/dynamics.h"

#include <cmath>
#include <map>
#include <set>

#include "gtest/gtest.h"
#include "noregret/ensemble.h"

namespace noregret {
namespace {

// Hedge at rate 1/sqrt(t) written out from its weights.
double HedgeFromCounts(const Game2x2& game, Player role, int t, int ones) {
  if (t == 1) return 0.5;
  const double x = static_cast<double>(ones) / (t - 1);
  const double eta = 1.0 / std::sqrt(static_cast<double>(t));
  const double w1 = std::exp(eta * (t - 1) * PurePayoff(game, role, 1, x));
  const double w0 = std::exp(eta * (t - 1) * PurePayoff(game, role, 0, x));
  return w1 / (w0 + w1);
}

// Exact law of Z_T (player two's count of action 1) for Hedge self-play by
// enumerating all 4^T joint action paths.
void Enumerate(const Game2x2& game, int t, int steps, int ones_i, int ones_j,
               double mass, std::map<int, double>& law) {
  if (t > steps) {
    law[ones_j] += mass;
    return;
  }
  const double p = HedgeFromCounts(game, Player::kOne, t, ones_j);
  const double q = HedgeFromCounts(game, Player::kTwo, t, ones_i);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double w = (i ? p : 1 - p) * (j ? q : 1 - q);
      Enumerate(game, t + 1, steps, ones_i + i, ones_j + j, mass * w, law);
    }
  }
}

TEST(DynamicsTest, RealizationLawMatchesPathEnumeration) {
  const Game2x2 mp = MakeMatchingPennies();
  constexpr int kSteps = 4;
  std::map<int, double> law;
  Enumerate(mp, 1, kSteps, 0, 0, 1.0, law);
  double total = 0.0;
  for (const auto& [z, m] : law) total += m;
  EXPECT_NEAR(total, 1.0, 1e-14);

  constexpr int kRuns = 40000;
  std::map<int, int> counts;
  RunOptions opts;
  opts.tail_window = 0;
  for (int r = 0; r < kRuns; ++r) {
    const Trajectory traj =
        RunRealization(mp, StrategySpec::Hedge(0.5), StrategySpec::Hedge(0.5),
                       kSteps, MixSeed(77, r), opts);
    ++counts[static_cast<int>(traj.Final().z_t)];
  }
  for (int z = 0; z <= kSteps; ++z) {
    const double m = law[z];
    const double sd = std::sqrt(m * (1 - m) / kRuns);
    EXPECT_NEAR(counts[z] / static_cast<double>(kRuns), m, 5 * sd + 1e-12) << z;
  }
}

TEST(DynamicsTest, RealizationIsDeterministicPerSeed) {
  const Game2x2 mp = MakeMatchingPennies();
  RunOptions opts;
  opts.tail_window = 500;
  const auto a = RunRealization(mp, StrategySpec::Hedge(0.5),
                                StrategySpec::LogBarrier(0.5), 500, 42, opts);
  const auto b = RunRealization(mp, StrategySpec::Hedge(0.5),
                                StrategySpec::LogBarrier(0.5), 500, 42, opts);
  const auto c = RunRealization(mp, StrategySpec::Hedge(0.5),
                                StrategySpec::LogBarrier(0.5), 500, 43, opts);
  ASSERT_EQ(a.tail.size(), b.tail.size());
  bool any_difference = false;
  for (std::size_t k = 0; k < a.tail.size(); ++k) {
    EXPECT_EQ(a.tail[k].i, b.tail[k].i);
    EXPECT_EQ(a.tail[k].j, b.tail[k].j);
    EXPECT_EQ(a.tail[k].p, b.tail[k].p);
    any_difference |= a.tail[k].i != c.tail[k].i || a.tail[k].j != c.tail[k].j;
  }
  EXPECT_TRUE(any_difference);
}

TEST(DynamicsTest, DegenerateMixturesDrawDeterministicBits) {
  const Game2x2 mp = MakeMatchingPennies();
  RunOptions opts;
  opts.tail_window = 200;
  const auto traj = RunRealization(mp, StrategySpec::Fixed(0.0),
                                   StrategySpec::Fixed(1.0), 200, 5, opts);
  for (const StepRecord& s : traj.tail) {
    EXPECT_EQ(s.i, 0);
    EXPECT_EQ(s.j, 1);
  }
  EXPECT_DOUBLE_EQ(traj.Final().z_t, 200.0);
  EXPECT_DOUBLE_EQ(traj.Final().q_hat, 1.0);
  EXPECT_DOUBLE_EQ(traj.Final().sum_var_q, 0.0);
}

TEST(DynamicsTest, CheckpointsAgreeWithFullTail) {
  const Game2x2 game = MakeCompetitiveFamily(0.3, 2.0);
  RunOptions opts;
  opts.tail_window = 3000;
  const auto traj = RunRealization(game, StrategySpec::Hedge(0.5),
                                   StrategySpec::Hedge(0.6), 3000, 11, opts);
  ASSERT_EQ(traj.tail.size(), 3000u);
  double si = 0, sj = 0, sp = 0, sq = 0, pay1 = 0, pay2 = 0, vq = 0;
  std::size_t next = 0;
  for (const StepRecord& s : traj.tail) {
    si += s.i;
    sj += s.j;
    sp += s.p;
    sq += s.q;
    pay1 += game.g()[s.i][s.j];
    pay2 += game.h()[s.i][s.j];
    vq += s.q * (1 - s.q);
    EXPECT_NEAR(s.payoff1, pay1, 1e-9);
    EXPECT_NEAR(s.payoff2, pay2, 1e-9);
    if (next < traj.checkpoints.size() && traj.checkpoints[next].t == s.t) {
      const CheckpointRecord& c = traj.checkpoints[next++];
      const double n = static_cast<double>(s.t);
      EXPECT_EQ(c.p_t, s.p);
      EXPECT_EQ(c.q_t, s.q);
      EXPECT_NEAR(c.p_hat, si / n, 1e-12);
      EXPECT_NEAR(c.q_hat, sj / n, 1e-12);
      EXPECT_NEAR(c.p_bar, sp / n, 1e-12);
      EXPECT_NEAR(c.q_bar, sq / n, 1e-12);
      EXPECT_NEAR(c.payoff1, pay1, 1e-9);
      EXPECT_NEAR(c.payoff2, pay2, 1e-9);
      EXPECT_EQ(c.z_t, sj);
      EXPECT_NEAR(c.sum_var_q, vq, 1e-9);
    }
  }
  EXPECT_EQ(next, traj.checkpoints.size());
  EXPECT_EQ(traj.At(3000), &traj.Final());
  EXPECT_EQ(traj.At(11), nullptr);
  EXPECT_NE(traj.At(10), nullptr);
}

TEST(DynamicsTest, TailKeepsOnlyTrailingSteps) {
  RunOptions opts;
  opts.tail_window = 25;
  const auto traj = RunRealization(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                                   StrategySpec::Hedge(0.5), 100, 1, opts);
  ASSERT_EQ(traj.tail.size(), 25u);
  EXPECT_EQ(traj.tail.front().t, 76);
  EXPECT_EQ(traj.tail.back().t, 100);
}

TEST(DynamicsTest, TelepathicFollowsMixtureRecursion) {
  const Game2x2 mp = MakeMatchingPennies();
  RunOptions opts;
  opts.initial_p = 0.9;
  opts.initial_q = 0.5;
  opts.schedule.base = 1.0;
  opts.schedule.ratio = 1.0001;
  const int steps = 60;
  const auto traj = RunTelepathic(mp, StrategySpec::Hedge(0.5),
                                  StrategySpec::Hedge(0.5), steps, opts);
  ASSERT_EQ(traj.checkpoints.size(), static_cast<std::size_t>(steps));
  double sum_p = 0.0, sum_q = 0.0;
  double p = 0.9, q = 0.5;
  for (int t = 1; t <= steps; ++t) {
    if (t > 1) {
      const double eta = 1.0 / std::sqrt(static_cast<double>(t));
      const auto hedge = [&](Player role, double x) {
        const double w1 = std::exp(eta * (t - 1) * PurePayoff(mp, role, 1, x));
        const double w0 = std::exp(eta * (t - 1) * PurePayoff(mp, role, 0, x));
        return w1 / (w0 + w1);
      };
      p = hedge(Player::kOne, sum_q / (t - 1));
      q = hedge(Player::kTwo, sum_p / (t - 1));
    }
    const CheckpointRecord& c = traj.checkpoints[static_cast<std::size_t>(t - 1)];
    ASSERT_EQ(c.t, t);
    EXPECT_NEAR(c.p_t, p, 1e-12) << t;
    EXPECT_NEAR(c.q_t, q, 1e-12) << t;
    sum_p += p;
    sum_q += q;
  }
  EXPECT_TRUE(traj.tail.empty());
  const auto again = RunTelepathic(mp, StrategySpec::Hedge(0.5),
                                   StrategySpec::Hedge(0.5), steps, opts);
  EXPECT_EQ(again.Final().p_t, traj.Final().p_t);
  EXPECT_EQ(again.next_q, traj.next_q);
}

TEST(DynamicsTest, SymmetricTelepathicStartIsFixedPoint) {
  const auto traj =
      RunTelepathic(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                    StrategySpec::Hedge(0.5), 1000);
  EXPECT_DOUBLE_EQ(traj.Final().p_t, 0.5);
  EXPECT_DOUBLE_EQ(traj.Final().q_t, 0.5);
}

TEST(DynamicsTest, InitialMixturesAreValidated) {
  RunOptions opts;
  opts.initial_p = 1.5;
  EXPECT_THROW(RunTelepathic(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                             StrategySpec::Hedge(0.5), 10, opts),
               std::invalid_argument);
  EXPECT_THROW(RunRealization(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                              StrategySpec::Hedge(0.5), 0, 1),
               std::invalid_argument);
}

TEST(DynamicsTest, CheckpointScheduleIsStrictlyIncreasing) {
  CheckpointSchedule schedule;
  schedule.extra = {7, 7, 1, 500, 20000};
  for (std::int64_t steps : {1, 9, 10, 1000, 123457}) {
    const auto points = schedule.Points(steps);
    ASSERT_FALSE(points.empty());
    EXPECT_EQ(points.back(), steps);
    for (std::size_t k = 1; k < points.size(); ++k) {
      EXPECT_LT(points[k - 1], points[k]);
    }
    for (std::int64_t e : schedule.extra) {
      if (e <= steps) {
        EXPECT_TRUE(std::binary_search(points.begin(), points.end(), e));
      }
    }
  }
  EXPECT_THROW((CheckpointSchedule{0.5, 1.25, {}}.Points(10)),
               std::invalid_argument);
  EXPECT_THROW((CheckpointSchedule{10, 1.0, {}}.Points(10)),
               std::invalid_argument);
}

TEST(DynamicsTest, SeedMixingSeparatesStreams) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t master : {0ULL, 1ULL, 2ULL}) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(MixSeed(master, i));
  }
  EXPECT_EQ(seen.size(), 3000u);
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
}

TEST(DynamicsTest, ScriptsParseAndPlay) {
  for (const char* text : {"iid:q=0.25", "prop1:q=0.5,t=100,s=10,tail=0",
                           "opposite-previous"}) {
    const auto script = OpponentScript::Parse(text);
    EXPECT_EQ(script.ToString(), text);
    EXPECT_EQ(OpponentScript::Parse(script.ToString()), script);
  }
  for (const char* bad : {"iid", "iid:q=2", "prop1:q=0.5,t=10,s=11,tail=1",
                          "prop1:q=0.5,t=10,s=1,tail=2", "iid:q=0.5,z=1",
                          "nope:q=1"}) {
    EXPECT_THROW(OpponentScript::Parse(bad), std::invalid_argument) << bad;
  }
  const auto prop = OpponentScript::PiecewiseProp1(0.3, 10, 3, 1);
  EXPECT_EQ(prop.Mixture(7, 0), 0.3);
  EXPECT_EQ(prop.Mixture(8, 0), 1.0);
  const auto opp = OpponentScript::OppositeOfPrevious();
  EXPECT_EQ(opp.Mixture(1, 1), 0.0);
  EXPECT_EQ(opp.Mixture(5, 1), 0.0);
  EXPECT_EQ(opp.Mixture(5, 0), 1.0);
}

TEST(DynamicsTest, EmptyTailMatchesIidScript) {
  const Game2x2 mp = MakeMatchingPennies();
  RunOptions opts;
  opts.tail_window = 400;
  const auto a = RunVsScript(mp, StrategySpec::Hedge(0.5),
                             OpponentScript::IidBernoulli(0.4), 400, 9, opts);
  const auto b = RunVsScript(mp, StrategySpec::Hedge(0.5),
                             OpponentScript::PiecewiseProp1(0.4, 400, 0, 1),
                             400, 9, opts);
  for (std::size_t k = 0; k < a.tail.size(); ++k) {
    EXPECT_EQ(a.tail[k].i, b.tail[k].i);
    EXPECT_EQ(a.tail[k].j, b.tail[k].j);
  }
  EXPECT_EQ(a.next_p, b.next_p);
}

TEST(DynamicsTest, OppositePreviousScriptReactsToLastBit) {
  RunOptions opts;
  opts.tail_window = 300;
  const auto traj =
      RunVsScript(MakeMatchingPennies(), StrategySpec::Hedge(0.5),
                  OpponentScript::OppositeOfPrevious(), 300, 4, opts);
  EXPECT_EQ(traj.tail[0].j, 0);
  for (std::size_t k = 1; k < traj.tail.size(); ++k) {
    EXPECT_EQ(traj.tail[k].j, 1 - traj.tail[k - 1].i);
  }
}

TEST(DynamicsTest, EnsembleIsIndependentOfWorkerCount) {
  RunConfig config;
  config.spec1 = StrategySpec::Hedge(0.5);
  config.spec2 = StrategySpec::Hedge(0.5);
  config.steps = 2000;
  config.options.tail_window = 0;
  const auto one = MonteCarlo(config, 12, 99, 1);
  const auto three = MonteCarlo(config, 12, 99, 3);
  ASSERT_EQ(one.size(), 12u);
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].seed, MixSeed(99, k));
    EXPECT_EQ(one[k].Final().z_t, three[k].Final().z_t);
    EXPECT_EQ(one[k].next_p, three[k].next_p);
  }
  const auto single = MonteCarlo(config, 1, 99, 4);
  EXPECT_EQ(single[0].Final().payoff1, noregret::Run(config, MixSeed(99, 0)).Final().payoff1);

  RunConfig bad = config;
  bad.script = OpponentScript::IidBernoulli(0.5);
  EXPECT_THROW(ValidateRunConfig(bad), std::invalid_argument);
  bad.spec2.reset();
  bad.mode = FeedbackMode::kTelepathic;
  EXPECT_THROW(ValidateRunConfig(bad), std::invalid_argument);
  EXPECT_THROW(MonteCarlo(config, 0, 1, 1), std::invalid_argument);
}

TEST(DynamicsTest, EnsembleMeanOfFixedOpponentCount) {
  RunConfig config;
  config.spec1 = StrategySpec::Hedge(0.5);
  config.spec2 = StrategySpec::Fixed(0.2);
  config.steps = 10000;
  config.options.tail_window = 0;
  const int n_runs = 40;
  const auto q_hat = MonteCarloMap(config, n_runs, 12, 2, [](const Trajectory& t) {
    return t.Final().q_hat;
  });
  double mean = 0.0;
  for (double v : q_hat) mean += v / n_runs;
  EXPECT_NEAR(mean, 0.2, 3 * std::sqrt(0.16 / (10000.0 * n_runs)));
}

TEST(DynamicsTest, ParallelMapPropagatesErrors) {
  EXPECT_THROW(ParallelMap(50, 3,
                           [](std::int64_t i) -> int {
                             if (i == 17) throw std::runtime_error("boom");
                             return static_cast<int>(i);
                           }),
               std::runtime_error);
  const auto squares = ParallelMap(20, 4, [](std::int64_t i) { return i * i; });
  for (std::int64_t i = 0; i < 20; ++i) EXPECT_EQ(squares[i], i * i);
}

TEST(DynamicsTest, ConvergingRunsStayInEquilibriumBand) {
  const Game2x2 game = MakeCompetitiveFamily(0.25, 0.429);
  RunOptions opts;
  opts.initial_p = 0.9;
  opts.initial_q = 0.1;
  const auto traj = RunTelepathic(game, StrategySpec::Hedge(0.5, RecencySpec{{1}}),
                                  StrategySpec::Hedge(0.5, RecencySpec{{1}}),
                                  20000, opts);
  ASSERT_TRUE(traj.neighborhood_center.has_value());
  EXPECT_NEAR(*traj.neighborhood_center, NashEquilibrium(game).q_star, 1e-15);
  EXPECT_GT(traj.neighborhood_count / 20000.0, 0.9);
}

TEST(DynamicsTest, FeedbackModeNames) {
  EXPECT_EQ(ParseFeedbackMode(ToString(FeedbackMode::kTelepathic)),
            FeedbackMode::kTelepathic);
  EXPECT_EQ(ParseFeedbackMode("realization"), FeedbackMode::kRealization);
  EXPECT_THROW(ParseFeedbackMode("psychic"), std::invalid_argument);
}

}  // namespace
}  // namespace noregret
