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

#include "noregret/strategies.h"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

namespace noregret {
namespace {

constexpr double kProbFloor = 0x1p-53;
constexpr int kMaxRecency = 64;

constexpr std::string_view kGrammar =
    "hedge|logbarrier|optimistic-hedge|optimistic-logbarrier[:r=<0.5..1),"
    "ell=<int>,w=<r1/r2/..>] | adahedge:C=<positive> | fixed:q=<0..1>";

[[noreturn]] void Fail(std::string_view descriptor, const std::string& why) {
  throw std::invalid_argument("bad strategy '" + std::string(descriptor) +
                              "': " + why + " (expected " +
                              std::string(kGrammar) + ")");
}

double Logistic(double a) {
  double p;
  if (a >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-a));
  } else {
    const double e = std::exp(a);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

// Cumulative payoff advantage of action 1 over action 0 after t - 1 steps
// against an opponent whose average play is `statistic`.
double CumulativeAdvantage(const Game2x2& game, Player role, std::int64_t t,
                           double statistic) {
  const double x = std::clamp(statistic, 0.0, 1.0);
  const double steps = static_cast<double>(t - 1);
  return steps * (PurePayoff(game, role, 1, x) - PurePayoff(game, role, 0, x));
}

double ParseNumber(std::string_view descriptor, std::string_view key,
                   std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    Fail(descriptor, "key '" + std::string(key) + "' needs a number, got '" +
                         std::string(text) + "'");
  }
  return value;
}

int ParseInt(std::string_view descriptor, std::string_view key,
             std::string_view text) {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    Fail(descriptor, "key '" + std::string(key) + "' needs an integer, got '" +
                         std::string(text) + "'");
  }
  return value;
}

std::string FormatNumber(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

double LearningRateSchedule::Rate(std::int64_t t) const {
  const double x = static_cast<double>(std::max<std::int64_t>(t, 1));
  if (kind == Kind::kFixedPower) {
    return exponent == 0.5 ? 1.0 / std::sqrt(x) : std::pow(x, -exponent);
  }
  return floor_constant / std::sqrt(x);
}

StrategySpec StrategySpec::Hedge(double exponent, RecencySpec recency) {
  StrategySpec spec;
  spec.family = StrategyFamily::kHedge;
  spec.schedule.exponent = exponent;
  spec.recency = std::move(recency);
  return spec;
}

StrategySpec StrategySpec::LogBarrier(double exponent, RecencySpec recency) {
  StrategySpec spec = Hedge(exponent, std::move(recency));
  spec.family = StrategyFamily::kLogBarrier;
  return spec;
}

StrategySpec StrategySpec::AdaptiveHedge(double floor_constant) {
  StrategySpec spec;
  spec.family = StrategyFamily::kAdaptiveHedge;
  spec.schedule.kind = LearningRateSchedule::Kind::kAdaptiveWithFloor;
  spec.schedule.floor_constant = floor_constant;
  return spec;
}

StrategySpec StrategySpec::Fixed(double q) {
  StrategySpec spec;
  spec.family = StrategyFamily::kFixedMixture;
  spec.fixed_q = q;
  return spec;
}

StrategySpec StrategySpec::Parse(std::string_view descriptor) {
  const auto colon = descriptor.find(':');
  const std::string_view name = descriptor.substr(0, colon);
  std::map<std::string, std::string, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = descriptor.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      if (eq == std::string_view::npos || eq == 0) {
        Fail(descriptor, "expected key=value, got '" + std::string(item) + "'");
      }
      const auto [it, inserted] = kv.emplace(std::string(item.substr(0, eq)),
                                             std::string(item.substr(eq + 1)));
      if (!inserted) Fail(descriptor, "duplicate key '" + it->first + "'");
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  const auto allow = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [key, value] : kv) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        Fail(descriptor, "unknown key '" + key + "'");
      }
    }
  };

  StrategySpec spec;
  if (name == "fixed") {
    allow({"q"});
    if (!kv.contains("q")) Fail(descriptor, "missing key 'q'");
    const double q = ParseNumber(descriptor, "q", kv["q"]);
    if (!(q >= 0.0 && q <= 1.0)) Fail(descriptor, "q must lie in [0, 1]");
    return Fixed(q);
  }
  if (name == "adahedge") {
    allow({"C"});
    double c = 1.0;
    if (kv.contains("C")) c = ParseNumber(descriptor, "C", kv["C"]);
    if (!(c > 0.0)) Fail(descriptor, "C must be positive");
    return AdaptiveHedge(c);
  }

  const bool optimistic = name.starts_with("optimistic-");
  const std::string_view base =
      optimistic ? name.substr(std::string_view("optimistic-").size()) : name;
  if (base == "hedge") {
    spec.family = StrategyFamily::kHedge;
  } else if (base == "logbarrier") {
    spec.family = StrategyFamily::kLogBarrier;
  } else {
    Fail(descriptor, "unknown family '" + std::string(name) + "'");
  }
  allow({"r", "ell", "w"});
  if (kv.contains("r")) {
    spec.schedule.exponent = ParseNumber(descriptor, "r", kv["r"]);
  }
  if (!(spec.schedule.exponent >= 0.5 && spec.schedule.exponent < 1.0)) {
    Fail(descriptor, "r must lie in [0.5, 1) for a no-regret rate");
  }
  int ell = optimistic ? 1 : 0;
  if (kv.contains("ell")) ell = ParseInt(descriptor, "ell", kv["ell"]);
  if (ell < 0 || ell > kMaxRecency) {
    Fail(descriptor, "ell must lie in [0, " + std::to_string(kMaxRecency) + "]");
  }
  if (optimistic && ell == 0) Fail(descriptor, "optimistic rules need ell >= 1");
  spec.recency.weights.assign(static_cast<std::size_t>(ell), 1);
  if (kv.contains("w")) {
    std::vector<int> weights;
    std::string_view list = kv["w"];
    while (true) {
      const auto slash = list.find('/');
      weights.push_back(ParseInt(descriptor, "w", list.substr(0, slash)));
      if (slash == std::string_view::npos) break;
      list = list.substr(slash + 1);
    }
    if (static_cast<int>(weights.size()) != ell) {
      Fail(descriptor, "w must list exactly ell weights");
    }
    spec.recency.weights = std::move(weights);
  }
  for (int w : spec.recency.weights) {
    if (w < 1 || w > ell) Fail(descriptor, "recency weights must lie in {1..ell}");
  }
  return spec;
}

std::string StrategySpec::ToString() const {
  switch (family) {
    case StrategyFamily::kFixedMixture:
      return "fixed:q=" + FormatNumber(fixed_q);
    case StrategyFamily::kAdaptiveHedge:
      return "adahedge:C=" + FormatNumber(schedule.floor_constant);
    case StrategyFamily::kHedge:
    case StrategyFamily::kLogBarrier:
      break;
  }
  const int ell = recency.ell();
  std::string out = ell > 0 ? "optimistic-" : "";
  out += family == StrategyFamily::kHedge ? "hedge" : "logbarrier";
  out += ":r=" + FormatNumber(schedule.exponent);
  if (ell > 0) {
    out += ",ell=" + std::to_string(ell);
    const bool all_ones =
        std::all_of(recency.weights.begin(), recency.weights.end(),
                    [](int w) { return w == 1; });
    if (!all_ones) {
      out += ",w=";
      for (int j = 0; j < ell; ++j) {
        if (j > 0) out += '/';
        out += std::to_string(recency.weights[j]);
      }
    }
  }
  return out;
}

HistorySummary::HistorySummary(int recency_capacity)
    : ring_(static_cast<std::size_t>(std::max(recency_capacity, 0)), 0.0) {}

double HistorySummary::EmpiricalAverage(double prior) const {
  if (observations_ == 0) return prior;
  return z() / static_cast<double>(observations_);
}

double HistorySummary::Recent(int j) const {
  assert(j >= 1 && j <= recent_count_);
  const int cap = static_cast<int>(ring_.size());
  return ring_[static_cast<std::size_t>((head_ - j + cap) % cap)];
}

void HistorySummary::Record(double opponent_value, double own_loss_increment) {
  ++observations_;
  // Kahan-compensated running sum; exact for 0/1 observations.
  const double y = opponent_value - compensation_;
  const double next = sum_ + y;
  compensation_ = (next - sum_) - y;
  sum_ = next;
  if (!ring_.empty()) {
    ring_[static_cast<std::size_t>(head_)] = opponent_value;
    head_ = (head_ + 1) % static_cast<int>(ring_.size());
    recent_count_ = std::min<int>(recent_count_ + 1,
                                  static_cast<int>(ring_.size()));
  }
  own_loss_ += own_loss_increment;
}

double HedgeMap(const Game2x2& game, Player role, std::int64_t t,
                double statistic, double eta) {
  return Logistic(eta * CumulativeAdvantage(game, role, t, statistic));
}

double HedgeMap(const Game2x2& game, Player role, std::int64_t t,
                double statistic, const LearningRateSchedule& schedule) {
  return HedgeMap(game, role, t, statistic, schedule.Rate(t));
}

double LogBarrierProbability(double d) {
  // Rationalised root 2 / (2 - d + sqrt(4 + d^2)). For d > 0 the sum
  // -d + sqrt(4 + d^2) cancels, so use the reflection p(d) = 1 - p(-d).
  if (std::isinf(d)) return d > 0 ? 1.0 - kProbFloor : kProbFloor;
  const double p = d <= 0.0 ? 2.0 / ((2.0 - d) + std::hypot(2.0, d))
                            : 1.0 - 2.0 / ((2.0 + d) + std::hypot(2.0, d));
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

double LogBarrierMap(const Game2x2& game, Player role, std::int64_t t,
                     double statistic, double eta) {
  return LogBarrierProbability(eta *
                               CumulativeAdvantage(game, role, t, statistic));
}

double LogBarrierMap(const Game2x2& game, Player role, std::int64_t t,
                     double statistic, const LearningRateSchedule& schedule) {
  return LogBarrierMap(game, role, t, statistic, schedule.Rate(t));
}

double ApplyRecencyBias(const HistorySummary& summary,
                        const RecencySpec& recency) {
  const std::int64_t seen = summary.t() - 1;
  if (seen == 0) return 0.5;
  double total = summary.z();
  const int usable = std::min(recency.ell(), summary.recent_count());
  for (int j = 1; j <= usable; ++j) {
    total += recency.weights[static_cast<std::size_t>(j - 1)] *
             summary.Recent(j);
  }
  return total / static_cast<double>(seen);
}

AdaptiveHedgeOutput AdaptiveHedgeStep(const AdaptiveHedgeState& state,
                                      const Game2x2& game, Player role,
                                      const HistorySummary& summary) {
  AdaptiveHedgeOutput out;
  out.next = state;
  while (summary.own_loss() > out.next.loss_budget) out.next.loss_budget *= 2.0;
  const std::int64_t t = summary.t();
  const double floor = state.floor_constant /
                       std::sqrt(static_cast<double>(t));
  out.proposed_eta = std::sqrt(std::numbers::ln2 / out.next.loss_budget);
  out.effective_eta = std::max(out.proposed_eta, floor);
  assert(out.effective_eta >= floor);
  out.probability =
      HedgeMap(game, role, t, summary.EmpiricalAverage(), out.effective_eta);
  return out;
}

double CounterfactualHedgeIterate(const HistorySummary& summary, double c) {
  if (summary.t() < 2) {
    throw std::invalid_argument("counterfactual iterate needs t >= 2");
  }
  static const Game2x2 kPennies = MakeMatchingPennies();
  const std::int64_t t = summary.t();
  return HedgeMap(kPennies, Player::kOne, t, summary.EmpiricalAverage(),
                  c / std::sqrt(static_cast<double>(t)));
}

std::string_view ToString(Monotonicity m) {
  switch (m) {
    case Monotonicity::kNonDecreasing:
      return "NonDecreasing";
    case Monotonicity::kNonIncreasing:
      return "NonIncreasing";
    case Monotonicity::kNonMonotone:
      return "NonMonotone";
  }
  return "?";
}

double EvaluateMap(const StrategySpec& spec, const Game2x2& game, Player role,
                   std::int64_t t, double statistic) {
  switch (spec.family) {
    case StrategyFamily::kFixedMixture:
      return FixedMixtureMap(spec.fixed_q);
    case StrategyFamily::kHedge:
    case StrategyFamily::kAdaptiveHedge:
      return HedgeMap(game, role, t, statistic, spec.schedule);
    case StrategyFamily::kLogBarrier:
      return LogBarrierMap(game, role, t, statistic, spec.schedule);
  }
  return 0.5;
}

Monotonicity MonotonicityCheck(const StrategySpec& spec, const Game2x2& game,
                               Player role, std::int64_t t, int grid_size) {
  if (grid_size < 3) {
    throw std::invalid_argument("monotonicity grid needs at least 3 points");
  }
  bool up = true;
  bool down = true;
  double prev = EvaluateMap(spec, game, role, t, 0.0);
  for (int k = 1; k < grid_size; ++k) {
    const double x = static_cast<double>(k) / (grid_size - 1);
    const double cur = EvaluateMap(spec, game, role, t, x);
    up = up && cur >= prev;
    down = down && cur <= prev;
    prev = cur;
  }
  if (up) return Monotonicity::kNonDecreasing;
  if (down) return Monotonicity::kNonIncreasing;
  return Monotonicity::kNonMonotone;
}

StrategyState::StrategyState(StrategySpec spec, const Game2x2& game,
                             Player role)
    : spec_(std::move(spec)),
      game_(game),
      role_(role),
      summary_(spec_.recency.ell()) {
  adaptive_.floor_constant = spec_.schedule.floor_constant;
  const Matrix2& m = role == Player::kOne ? game.g() : game.h();
  const double hi = std::max({m[0][0], m[0][1], m[1][0], m[1][1]});
  loss_min_ = std::min({m[0][0], m[0][1], m[1][0], m[1][1]});
  loss_range_ = hi - loss_min_;
}

double StrategyState::MixedAction() {
  const std::int64_t t = summary_.t();
  switch (spec_.family) {
    case StrategyFamily::kFixedMixture:
      last_eta_ = 0.0;
      return spec_.fixed_q;
    case StrategyFamily::kAdaptiveHedge: {
      const AdaptiveHedgeOutput out =
          AdaptiveHedgeStep(adaptive_, game_, role_, summary_);
      adaptive_ = out.next;
      last_eta_ = out.effective_eta;
      return t == 1 ? 0.5 : out.probability;
    }
    case StrategyFamily::kHedge:
    case StrategyFamily::kLogBarrier:
      break;
  }
  last_eta_ = spec_.schedule.Rate(t);
  if (t == 1) return 0.5;
  const double statistic = spec_.recency.ell() == 0
                               ? summary_.EmpiricalAverage()
                               : ApplyRecencyBias(summary_, spec_.recency);
  return spec_.family == StrategyFamily::kHedge
             ? HedgeMap(game_, role_, t, statistic, last_eta_)
             : LogBarrierMap(game_, role_, t, statistic, last_eta_);
}

void StrategyState::Observe(double opponent_value, double own_value) {
  double loss = 0.0;
  if (spec_.family == StrategyFamily::kAdaptiveHedge && loss_range_ > 0.0) {
    const double p = role_ == Player::kOne ? own_value : opponent_value;
    const double q = role_ == Player::kOne ? opponent_value : own_value;
    const Matrix2& m = role_ == Player::kOne ? game_.g() : game_.h();
    const double hi = loss_min_ + loss_range_;
    const double payoff = (1 - p) * (1 - q) * m[0][0] + (1 - p) * q * m[0][1] +
                          p * (1 - q) * m[1][0] + p * q * m[1][1];
    loss = (hi - payoff) / loss_range_;
  }
  summary_.Record(opponent_value, loss);
}

}  // namespace noregret
