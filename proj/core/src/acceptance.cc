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

#include "noregret/acceptance.h"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>

#include "noregret/dynamics.h"
#include "noregret/ensemble.h"
#include "noregret/games.h"
#include "noregret/pmf.h"
#include "noregret/probes.h"
#include "noregret/strategies.h"

namespace noregret {
namespace {

std::string Fmt(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

struct Outcome {
  bool passed = false;
  std::string detail;
};

void Append(std::string& detail, const std::string& part) {
  if (!detail.empty()) detail += "; ";
  detail += part;
}

// 1
Outcome NashExactness(int) {
  Outcome out{true, ""};
  const auto check = [&](const char* label, const Game2x2& game, double p,
                         double q) {
    const Equilibrium eq = NashEquilibrium(game);
    const double err = std::max(std::abs(eq.p_star - p), std::abs(eq.q_star - q));
    out.passed &= err <= 1e-12;
    Append(out.detail, Fmt("%s p*=%.15g q*=%.15g err=%.2g", label, eq.p_star,
                           eq.q_star, err));
    return eq;
  };
  check("pennies", MakeMatchingPennies(), 0.5, 0.5);
  for (const auto& [a, b] : {std::pair{0.111, 4.0}, std::pair{0.25, 0.429}}) {
    const double p = b / (1.0 + b);
    const double q = a / (1.0 + a);
    check(Fmt("family(%g,%g)", a, b).c_str(), MakeCompetitiveFamily(a, b), p, q);
    check(Fmt("zs(%g,%g)", a, b).c_str(), MakeZeroSumEquivalent(a, b), p, q);
  }
  out.passed &= std::abs(NashEquilibrium(MakeCompetitiveFamily(0.111, 4.0)).p_star -
                         0.8) <= 1e-12;
  const double p_low = NashEquilibrium(MakeCompetitiveFamily(0.25, 0.429)).p_star;
  out.passed &= std::abs(p_low - 0.3) <= 5e-3;
  return out;
}

// Sum over all 2^t outcomes; independent of the convolution DP.
std::vector<double> EnumeratePoissonBinomial(const std::vector<double>& qs) {
  const std::size_t t = qs.size();
  std::vector<double> pmf(t + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
    double mass = 1.0;
    for (std::size_t s = 0; s < t; ++s) {
      mass *= (mask >> s) & 1u ? qs[s] : 1.0 - qs[s];
    }
    pmf[static_cast<std::size_t>(std::popcount(mask))] += mass;
  }
  return pmf;
}

// 2
Outcome PoissonBinomialOracle(int) {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const int t = 1 + c % 16;
    std::vector<double> qs(static_cast<std::size_t>(t));
    for (double& q : qs) q = unit(rng);
    const Pmf dp = PoissonBinomialPmf(qs);
    const std::vector<double> brute = EnumeratePoissonBinomial(qs);
    for (int z = 0; z <= t; ++z) {
      worst = std::max(worst, std::abs(dp(z) - brute[static_cast<std::size_t>(z)]));
    }
  }
  return {worst <= 1e-12, Fmt("100 cases, t<=16, max abs error %.3g", worst)};
}

// 3
Outcome RegretCertification(int workers) {
  constexpr std::int64_t kT = 100000;
  const Game2x2 game = MakeMatchingPennies();
  Outcome out{true, ""};
  const std::pair<const char*, OpponentScript> adversaries[] = {
      {"constant-ones", OpponentScript::IidBernoulli(1.0)},
      {"iid-0.5", OpponentScript::IidBernoulli(0.5)},
      {"opposite-previous", OpponentScript::OppositeOfPrevious()},
  };
  for (const auto& [label, script] : adversaries) {
    RunConfig config;
    config.game = game;
    config.spec1 = StrategySpec::Hedge(0.5);
    config.script = script;
    config.steps = kT;
    config.options.tail_window = kT;
    const auto worst = MonteCarloMap(
        config, 20, 3003, workers, [](const Trajectory& traj) {
          return RealizedRegret(traj, Player::kOne).max_normalized;
        });
    const double m = *std::max_element(worst.begin(), worst.end());
    out.passed &= m <= 3.0;
    Append(out.detail, Fmt("%s max regret/sqrt(t)=%.3f", label, m));
  }
  return out;
}

// 4
Outcome TimeAverageConvergence(int workers) {
  RunConfig config;
  config.spec1 = StrategySpec::Hedge(0.5);
  config.spec2 = StrategySpec::Hedge(0.5);
  config.steps = 1000000;
  config.options.tail_window = 0;
  config.options.schedule.extra = {1000};
  const auto maxima = MonteCarloMap(
      config, 20, 4004, workers, [](const Trajectory& traj) {
        double m = 0.0;
        for (const auto& d : TimeAverageDeviation(traj, 0.5)) {
          if (d.t >= 1000) m = std::max(m, d.value);
        }
        return m;
      });
  const auto good = std::count_if(maxima.begin(), maxima.end(),
                                  [](double m) { return m <= 5.0; });
  const double worst = *std::max_element(maxima.begin(), maxima.end());
  return {good >= 18,
          Fmt("%lld/20 seeds with max sqrt(t)|q_bar-0.5| <= 5 (worst %.3f)",
              static_cast<long long>(good), worst)};
}

double FractionAtMillion(const StrategySpec& spec1, const StrategySpec& spec2,
                         std::uint64_t seed, int workers) {
  RunConfig config;
  config.spec1 = spec1;
  config.spec2 = spec2;
  config.steps = 1000000;
  config.options.tail_window = 0;
  return OscillationEstimate(config, 0.5, 0.1, {1000000}, 200, seed, workers)
      .fraction_deviating[0];
}

// 5
Outcome WarmUpOscillation(int workers) {
  const double f = FractionAtMillion(StrategySpec::Hedge(0.5),
                                     StrategySpec::Fixed(0.5), 5005, workers);
  return {f >= 0.5, Fmt("fraction |P_t-0.5|>=0.1 at t=1e6: %.3f (200 seeds)", f)};
}

// 6
Outcome BothPlayersOscillation(int workers) {
  Outcome out{true, ""};
  const std::pair<const char*, StrategySpec> specs[] = {
      {"hedge", StrategySpec::Hedge(0.5)},
      {"optimistic-hedge", StrategySpec::Hedge(0.5, RecencySpec{{1}})},
      {"logbarrier", StrategySpec::LogBarrier(0.5)},
  };
  for (const auto& [label, spec] : specs) {
    const double f = FractionAtMillion(spec, spec, 6006, workers);
    out.passed &= f >= 0.5;
    Append(out.detail, Fmt("%s fraction %.3f", label, f));
  }
  return out;
}

// 7
Outcome TelepathicContrast(int) {
  const Game2x2 game = MakeMatchingPennies();
  // Off-equilibrium start; the symmetric one never moves.
  RunOptions opts;
  opts.initial_p = 0.9;
  opts.initial_q = 0.5;
  opts.schedule.extra = {100000};
  const StrategySpec optimistic = StrategySpec::Hedge(0.5, RecencySpec{{1}});
  const Trajectory conv = RunTelepathic(game, optimistic, optimistic, 100000, opts);
  const double gap = std::abs(conv.At(100000)->p_t - 0.5);

  RunOptions dense = opts;
  dense.schedule.extra.clear();
  for (std::int64_t t = 100000; t <= 1000000; t += 100) dense.schedule.extra.push_back(t);
  const StrategySpec hedge = StrategySpec::Hedge(0.5);
  const Trajectory cyc = RunTelepathic(game, hedge, hedge, 1000000, dense);
  double amplitude = 0.0;
  for (const auto& rec : cyc.checkpoints) {
    if (rec.t >= 100000) amplitude = std::max(amplitude, std::abs(rec.p_t - 0.5));
  }
  return {gap <= 0.01 && amplitude >= 0.25,
          Fmt("optimistic |p-0.5| at 1e5 = %.3g; plain max |p-0.5| on "
              "[1e5,1e6] = %.3f",
              gap, amplitude)};
}

// 8
Outcome SensitivityCriterion(int workers) {
  const SensitivityScan scan = ScanSensitivity(
      StrategySpec::Hedge(0.5), MakeMatchingPennies(), 100000, 2.0, 200, 8008,
      2.0, workers);
  const SensitivityReport& best = scan.Best();
  return {best.mean_response >= 0.6 &&
              best.mean_response - best.ci_halfwidth > 0.55,
          Fmt("best s=%lld mean response %.4f +- %.4f over %zu grid points",
              static_cast<long long>(best.s), best.mean_response,
              best.ci_halfwidth, scan.grid.size())};
}

// 9
Outcome StationarityCriterion(int workers) {
  const StationarityReport r =
      StationarityCheck(MakeMatchingPennies(), StrategySpec::Hedge(0.5), 0.5,
                        10000, 500, 9009, workers);
  return {r.Within(3.0),
          Fmt("payoff/t %.5f (R*=%.3g, se %.2g); Z/t %.5f (q*=%.3g, se %.2g)",
              r.mean_payoff_rate, r.r_star, r.payoff_se, r.mean_z_rate,
              r.q_star, r.z_se)};
}

// 10
Outcome MartingaleCriterion(int workers) {
  Outcome out{true, ""};
  const std::pair<const char*, StrategySpec> opponents[] = {
      {"fixed-NE", StrategySpec::Fixed(0.5)},
      {"hedge", StrategySpec::Hedge(0.5)},
  };
  for (const auto& [label, opp] : opponents) {
    RunConfig config;
    config.spec1 = StrategySpec::Hedge(0.5);
    config.spec2 = opp;
    const MartingaleCheckReport r = MartingaleCheck(
        config, 100000, 500, 10010, Normalization::kBySigmaHat, workers);
    out.passed &= !r.degenerate && r.ks_statistic <= 0.1;
    Append(out.detail, Fmt("%s KS %.4f (mean %.3f, var %.3f)", label,
                           r.ks_statistic, r.sample_mean, r.sample_variance));
  }
  return out;
}

// 11
Outcome ChangeOfMeasure(int) {
  int checked = 0;
  int failed = 0;
  int failed_exponential = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::string first_failure;
  for (std::int64_t t : {100, 400, 10000}) {
    const auto root = static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(t))));
    for (std::int64_t s : {std::int64_t{0}, root / 2, root}) {
      for (double q : {0.2, 0.5, 0.8}) {
        const ShiftRatioCheck c = ShiftRatioBoundCheck(t, s, q, 1.0);
        ++checked;
        if (!c.Holds()) {
          ++failed;
          if (first_failure.empty()) {
            first_failure = Fmt(" (first: t=%lld s=%lld q=%g measured %.4f < %.4f)",
                                static_cast<long long>(t),
                                static_cast<long long>(s), q, c.measured,
                                c.analytic);
          }
        }
        if (!c.HoldsExponential()) ++failed_exponential;
        worst_margin = std::min(worst_margin, c.measured - c.analytic);
      }
    }
  }
  return {failed == 0,
          Fmt("%d/%d grid points meet (1+b0)^-a%s; smallest margin %.4g; "
              "exp(-a b0) met at %d/%d",
              checked - failed, checked, first_failure.c_str(), worst_margin,
              checked - failed_exponential, checked)};
}

// 12
Outcome DeMoivreCriterion(int) {
  std::vector<double> certs;
  for (std::int64_t t : {1000, 10000, 100000, 1000000}) {
    certs.push_back(DeMoivreRatioCertificate(t, 0.5, 2.0));
  }
  const bool monotone = std::is_sorted(certs.rbegin(), certs.rend()) &&
                        std::adjacent_find(certs.begin(), certs.end()) == certs.end();
  return {certs[1] <= 0.1 && certs[3] <= 0.01 && monotone,
          Fmt("t=1e3 %.3g, 1e4 %.3g, 1e5 %.3g, 1e6 %.3g", certs[0], certs[1],
              certs[2], certs[3])};
}

// 13
Outcome ExtremizerCriterion(int) {
  int cases = 0;
  int failures = 0;
  std::string first_failure;
  for (int t = 1; t <= 6; ++t) {
    for (double q_bar : {0.3, 0.5}) {
      for (double delta : {0.1, 0.2}) {
        const auto results = ExtremizerScan(t, q_bar, delta, 9);
        for (std::size_t z = 0; z < results.size(); ++z) {
          ++cases;
          if (!results[z].three_point_structure) {
            ++failures;
            if (first_failure.empty()) {
              first_failure = Fmt(" first: t=%d q=%g delta=%g z=%zu", t,
                                  q_bar, delta, z);
            }
          }
        }
      }
    }
  }
  return {failures == 0, Fmt("%d/%d (t,q,delta,z) cases have three-point "
                             "minimizers%s",
                             cases - failures, cases, first_failure.c_str())};
}

struct DominanceTally {
  std::int64_t checked = 0;
  std::int64_t violations = 0;
  double worst = 0.0;  // most negative margin
};

void Dominance(const StrategyState& state, DominanceTally& tally) {
  StrategyState probe = state;
  const double p = probe.MixedAction();
  const double cf = CounterfactualHedgeIterate(state.summary(),
                                               state.spec().schedule.floor_constant);
  const double margin = std::abs(p - 0.5) - std::abs(cf - 0.5);
  ++tally.checked;
  if (margin < 0.0) {
    ++tally.violations;
    tally.worst = std::min(tally.worst, margin);
  }
}

void ExhaustiveDominance(const StrategyState& state, int max_t,
                         DominanceTally& tally) {
  if (state.summary().t() >= 2) Dominance(state, tally);
  if (state.summary().t() >= max_t) return;
  StrategyState base = state;
  base.MixedAction();  // advances the adaptive budget exactly as play would
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      StrategyState child = base;
      child.Observe(j, i);
      ExhaustiveDominance(child, max_t, tally);
    }
  }
}

// 14
Outcome DominanceCriterion(int) {
  const Game2x2 game = MakeMatchingPennies();
  const StrategySpec spec = StrategySpec::AdaptiveHedge(1.0);
  DominanceTally exhaustive;
  ExhaustiveDominance(StrategyState(spec, game, Player::kOne), 12, exhaustive);

  DominanceTally sampled;
  std::mt19937_64 rng(14014);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 10000; ++k) {
    StrategyState state(spec, game, Player::kOne);
    const double q = unit(rng);
    for (int s = 1; s < 1000; ++s) {
      state.MixedAction();
      const int i = unit(rng) < 0.5 ? 1 : 0;
      const int j = unit(rng) < q ? 1 : 0;
      state.Observe(j, i);
    }
    Dominance(state, sampled);
  }
  return {exhaustive.violations == 0 && sampled.violations == 0,
          Fmt("exhaustive t<=12: %lld histories, %lld violations; sampled "
              "t=1e3: %lld histories, %lld violations",
              static_cast<long long>(exhaustive.checked),
              static_cast<long long>(exhaustive.violations),
              static_cast<long long>(sampled.checked),
              static_cast<long long>(sampled.violations))};
}

struct Entry {
  const char* name;
  Outcome (*fn)(int);
};

constexpr Entry kEntries[kCriterionCount] = {
    {"nash-exactness", NashExactness},
    {"poisson-binomial-oracle", PoissonBinomialOracle},
    {"regret-certification", RegretCertification},
    {"time-average-convergence", TimeAverageConvergence},
    {"warm-up-oscillation", WarmUpOscillation},
    {"both-players-oscillation", BothPlayersOscillation},
    {"telepathic-contrast", TelepathicContrast},
    {"sensitivity-probe", SensitivityCriterion},
    {"stationarity", StationarityCriterion},
    {"martingale-clt", MartingaleCriterion},
    {"change-of-measure", ChangeOfMeasure},
    {"demoivre-laplace", DeMoivreCriterion},
    {"extremizer-oracle", ExtremizerCriterion},
    {"stochastic-dominance", DominanceCriterion},
};

}  // namespace

std::vector<int> CriteriaForTier(Tier tier) {
  if (tier == Tier::kFull) {
    std::vector<int> all(kCriterionCount);
    for (int k = 0; k < kCriterionCount; ++k) all[static_cast<std::size_t>(k)] = k + 1;
    return all;
  }
  return {1, 2, 3, 7, 9, 11, 12, 13, 14};
}

std::string CriterionName(int id) {
  if (id < 1 || id > kCriterionCount) {
    throw std::invalid_argument("criterion id must be 1.." +
                                std::to_string(kCriterionCount));
  }
  return kEntries[id - 1].name;
}

CriterionResult RunCriterion(int id, int workers) {
  CriterionResult result;
  result.id = id;
  const auto start = std::chrono::steady_clock::now();
  try {
    result.name = CriterionName(id);
    const Outcome o = kEntries[id - 1].fn(std::max(workers, 1));
    result.passed = o.passed;
    result.detail = o.detail;
  } catch (const std::exception& e) {
    result.passed = false;
    result.detail = std::string("error: ") + e.what();
  }
  result.seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return result;
}

std::vector<CriterionResult> RunAcceptance(
    Tier tier, int workers,
    const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> results;
  for (int id : CriteriaForTier(tier)) {
    results.push_back(RunCriterion(id, workers));
    if (on_result) on_result(results.back());
  }
  return results;
}

std::string FormatResultLine(const CriterionResult& r) {
  return Fmt("[%s] %2d %s (%.1f s): ", r.passed ? "PASS" : "FAIL", r.id,
             r.name.c_str(), r.seconds) +
         r.detail;
}

}  // namespace noregret
