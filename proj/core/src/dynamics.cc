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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

namespace noregret {
namespace {

int DrawBit(std::mt19937_64& engine, double p) {
  // 53-bit uniform in [0, 1); fixed by the engine's output alone.
  const double u = static_cast<double>(engine() >> 11) * 0x1p-53;
  return u < p ? 1 : 0;
}

double First(std::int64_t t, const std::optional<double>& initial,
             double mixed) {
  return t == 1 && initial ? *initial : mixed;
}

RunOptions WithNeighborhood(const Game2x2& game, RunOptions options) {
  for (const auto& x : {options.initial_p, options.initial_q}) {
    if (x && !(*x >= 0.0 && *x <= 1.0)) {
      throw std::invalid_argument("initial mixtures must lie in [0, 1]");
    }
  }
  if (!options.neighborhood_center &&
      Competitiveness(game) != CompetitiveClass::kNotCompetitive) {
    options.neighborhood_center = NashEquilibrium(game).q_star;
  }
  return options;
}

// Running totals shared by every run flavour.
class Recorder {
 public:
  Recorder(Trajectory& traj, const RunOptions& options)
      : traj_(traj),
        points_(options.schedule.Points(traj.steps)),
        tail_start_(traj.steps - std::max<std::int64_t>(options.tail_window, 0) +
                    1) {
    traj_.neighborhood_center = options.neighborhood_center;
    if (traj_.neighborhood_center) {
      band_lo_ = *traj_.neighborhood_center / 2.0;
      band_hi_ = (*traj_.neighborhood_center + 1.0) / 2.0;
    }
    traj_.checkpoints.reserve(points_.size());
    if (options.tail_window > 0) {
      traj_.tail.reserve(static_cast<std::size_t>(
          std::min(options.tail_window, traj.steps)));
    }
  }

  // i, j are realised bits, or the mixtures themselves in telepathic mode.
  void Step(std::int64_t t, double p, double q, double i, double j,
            double pay1, double pay2) {
    sum_i_.Add(i);
    sum_j_.Add(j);
    sum_p_.Add(p);
    sum_q_.Add(q);
    pay1_.Add(pay1);
    pay2_.Add(pay2);
    var_q_.Add(q * (1.0 - q));
    if (traj_.neighborhood_center && q >= band_lo_ && q <= band_hi_) {
      ++traj_.neighborhood_count;
    }
    if (t >= tail_start_) {
      traj_.tail.push_back({t, p, q, static_cast<std::int8_t>(i),
                            static_cast<std::int8_t>(j), pay1_.value(),
                            pay2_.value()});
    }
    if (next_point_ < points_.size() && points_[next_point_] == t) {
      ++next_point_;
      const double n = static_cast<double>(t);
      CheckpointRecord rec;
      rec.t = t;
      rec.p_t = p;
      rec.q_t = q;
      rec.p_hat = sum_i_.value() / n;
      rec.q_hat = sum_j_.value() / n;
      rec.p_bar = sum_p_.value() / n;
      rec.q_bar = sum_q_.value() / n;
      rec.payoff1 = pay1_.value();
      rec.payoff2 = pay2_.value();
      rec.z_t = sum_j_.value();
      rec.sum_var_q = var_q_.value();
      traj_.checkpoints.push_back(rec);
    }
  }

 private:
  Trajectory& traj_;
  std::vector<std::int64_t> points_;
  std::size_t next_point_ = 0;
  std::int64_t tail_start_;
  double band_lo_ = 0.0;
  double band_hi_ = 0.0;
  CompensatedSum sum_i_, sum_j_, sum_p_, sum_q_, pay1_, pay2_, var_q_;
};

void RequireSteps(std::int64_t steps) {
  if (steps < 1) throw std::invalid_argument("a run needs steps >= 1");
}

}  // namespace

std::string_view ToString(FeedbackMode mode) {
  return mode == FeedbackMode::kRealization ? "realization" : "telepathic";
}

FeedbackMode ParseFeedbackMode(std::string_view text) {
  if (text == "realization") return FeedbackMode::kRealization;
  if (text == "telepathic") return FeedbackMode::kTelepathic;
  throw std::invalid_argument("mode must be 'realization' or 'telepathic', got '" +
                              std::string(text) + "'");
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t MixSeed(std::uint64_t master, std::uint64_t index) {
  return SplitMix64(master ^ SplitMix64(index));
}

std::vector<std::int64_t> CheckpointSchedule::Points(std::int64_t steps) const {
  if (!(base >= 1.0) || !(ratio > 1.0)) {
    throw std::invalid_argument(
        "checkpoint schedule needs base >= 1 and ratio > 1");
  }
  std::vector<std::int64_t> out;
  for (double x = base; x <= static_cast<double>(steps); x *= ratio) {
    out.push_back(static_cast<std::int64_t>(std::floor(x)));
  }
  for (std::int64_t e : extra) {
    if (e >= 1 && e <= steps) out.push_back(e);
  }
  out.push_back(steps);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

OpponentScript OpponentScript::IidBernoulli(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("script q must lie in [0, 1]");
  }
  OpponentScript s;
  s.kind = Kind::kIidBernoulli;
  s.q = q;
  return s;
}

OpponentScript OpponentScript::PiecewiseProp1(double q, std::int64_t t_total,
                                              std::int64_t s_tail,
                                              int tail_value) {
  OpponentScript s = IidBernoulli(q);
  if (s_tail < 0 || s_tail > t_total) {
    throw std::invalid_argument("script tail must satisfy 0 <= s <= t");
  }
  if (tail_value != 0 && tail_value != 1) {
    throw std::invalid_argument("script tail value must be 0 or 1");
  }
  s.kind = Kind::kPiecewiseProp1;
  s.t_total = t_total;
  s.s_tail = s_tail;
  s.tail_value = tail_value;
  return s;
}

OpponentScript OpponentScript::OppositeOfPrevious() {
  OpponentScript s;
  s.kind = Kind::kOppositeOfPrevious;
  return s;
}

double OpponentScript::Mixture(std::int64_t t, int previous_own_action) const {
  switch (kind) {
    case Kind::kIidBernoulli:
      return q;
    case Kind::kPiecewiseProp1:
      return t <= t_total - s_tail ? q : static_cast<double>(tail_value);
    case Kind::kOppositeOfPrevious:
      return t == 1 ? 0.0 : static_cast<double>(1 - previous_own_action);
  }
  return q;
}

OpponentScript OpponentScript::Parse(std::string_view descriptor) {
  const auto fail = [&](const std::string& why) -> OpponentScript {
    throw std::invalid_argument(
        "bad opponent script '" + std::string(descriptor) + "': " + why +
        " (expected iid:q=<p> | prop1:q=<p>,t=<int>,s=<int>,tail=<0|1> | "
        "opposite-previous)");
  };
  if (descriptor == "opposite-previous") return OppositeOfPrevious();
  const auto colon = descriptor.find(':');
  if (colon == std::string_view::npos) return fail("missing parameters");
  const std::string_view name = descriptor.substr(0, colon);
  std::map<std::string, std::string, std::less<>> kv;
  std::string_view rest = descriptor.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) return fail("expected key=value");
    kv[std::string(item.substr(0, eq))] = std::string(item.substr(eq + 1));
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  const auto number = [&](const char* key) {
    if (!kv.contains(key)) fail(std::string("missing key '") + key + "'");
    const std::string& text = kv.find(key)->second;
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      fail(std::string("key '") + key + "' needs a number");
    }
    return v;
  };
  const auto only = [&](std::initializer_list<std::string_view> keys) {
    for (const auto& [k, v] : kv) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
        fail("unknown key '" + k + "'");
      }
    }
  };
  try {
    if (name == "iid") {
      only({"q"});
      return IidBernoulli(number("q"));
    }
    if (name == "prop1") {
      only({"q", "t", "s", "tail"});
      return PiecewiseProp1(number("q"),
                            static_cast<std::int64_t>(number("t")),
                            static_cast<std::int64_t>(number("s")),
                            static_cast<int>(number("tail")));
    }
  } catch (const std::invalid_argument& e) {
    if (std::string_view(e.what()).starts_with("bad opponent script")) throw;
    return fail(e.what());
  }
  return fail("unknown script '" + std::string(name) + "'");
}

std::string OpponentScript::ToString() const {
  const auto num = [](double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
  };
  switch (kind) {
    case Kind::kIidBernoulli:
      return "iid:q=" + num(q);
    case Kind::kPiecewiseProp1:
      return "prop1:q=" + num(q) + ",t=" + std::to_string(t_total) +
             ",s=" + std::to_string(s_tail) +
             ",tail=" + std::to_string(tail_value);
    case Kind::kOppositeOfPrevious:
      return "opposite-previous";
  }
  return "";
}

const CheckpointRecord* Trajectory::At(std::int64_t t) const {
  const auto it = std::lower_bound(
      checkpoints.begin(), checkpoints.end(), t,
      [](const CheckpointRecord& r, std::int64_t x) { return r.t < x; });
  if (it == checkpoints.end() || it->t != t) return nullptr;
  return &*it;
}

Trajectory RunRealization(const Game2x2& game, const StrategySpec& spec1,
                          const StrategySpec& spec2, std::int64_t steps,
                          std::uint64_t seed, const RunOptions& options) {
  RequireSteps(steps);
  Trajectory traj;
  traj.game = game;
  traj.spec1 = spec1;
  traj.spec2 = spec2;
  traj.mode = FeedbackMode::kRealization;
  traj.seed = seed;
  traj.steps = steps;
  const RunOptions opts = WithNeighborhood(game, options);
  Recorder recorder(traj, opts);

  StrategyState one(spec1, game, Player::kOne);
  StrategyState two(spec2, game, Player::kTwo);
  std::mt19937_64 rng1(MixSeed(seed, 1));
  std::mt19937_64 rng2(MixSeed(seed, 2));
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double p = First(t, opts.initial_p, one.MixedAction());
    const double q = First(t, opts.initial_q, two.MixedAction());
    const int i = DrawBit(rng1, p);
    const int j = DrawBit(rng2, q);
    one.Observe(j, i);
    two.Observe(i, j);
    recorder.Step(t, p, q, i, j, g[i][j], h[i][j]);
  }
  traj.next_p = one.MixedAction();
  traj.next_q = two.MixedAction();
  return traj;
}

Trajectory RunTelepathic(const Game2x2& game, const StrategySpec& spec1,
                         const StrategySpec& spec2, std::int64_t steps,
                         const RunOptions& options) {
  RequireSteps(steps);
  Trajectory traj;
  traj.game = game;
  traj.spec1 = spec1;
  traj.spec2 = spec2;
  traj.mode = FeedbackMode::kTelepathic;
  traj.steps = steps;
  RunOptions opts = WithNeighborhood(game, options);
  // Telepathic runs carry no realised bits to keep.
  opts.tail_window = 0;
  Recorder recorder(traj, opts);

  StrategyState one(spec1, game, Player::kOne);
  StrategyState two(spec2, game, Player::kTwo);
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double p = First(t, opts.initial_p, one.MixedAction());
    const double q = First(t, opts.initial_q, two.MixedAction());
    one.Observe(q, p);
    two.Observe(p, q);
    recorder.Step(t, p, q, p, q, ExpectedPayoff(game, p, q, Player::kOne),
                  ExpectedPayoff(game, p, q, Player::kTwo));
  }
  traj.next_p = one.MixedAction();
  traj.next_q = two.MixedAction();
  return traj;
}

Trajectory RunVsScript(const Game2x2& game, const StrategySpec& spec1,
                       const OpponentScript& script, std::int64_t steps,
                       std::uint64_t seed, const RunOptions& options) {
  RequireSteps(steps);
  Trajectory traj;
  traj.game = game;
  traj.spec1 = spec1;
  traj.script = script;
  traj.mode = FeedbackMode::kRealization;
  traj.seed = seed;
  traj.steps = steps;
  const RunOptions opts = WithNeighborhood(game, options);
  Recorder recorder(traj, opts);

  StrategyState one(spec1, game, Player::kOne);
  std::mt19937_64 rng1(MixSeed(seed, 1));
  std::mt19937_64 rng2(MixSeed(seed, 2));
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  int last_i = 0;
  for (std::int64_t t = 1; t <= steps; ++t) {
    const double p = First(t, opts.initial_p, one.MixedAction());
    const double q = script.Mixture(t, last_i);
    const int i = DrawBit(rng1, p);
    const int j = DrawBit(rng2, q);
    one.Observe(j, i);
    recorder.Step(t, p, q, i, j, g[i][j], h[i][j]);
    last_i = i;
  }
  traj.next_p = one.MixedAction();
  traj.next_q = script.Mixture(steps + 1, last_i);
  return traj;
}

}  // namespace noregret
