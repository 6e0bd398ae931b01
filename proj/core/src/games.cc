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

#include "noregret/games.h"

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace noregret {
namespace {

void RequireFinite(const Matrix2& m, const char* name) {
  for (const auto& row : m) {
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("non-finite payoff in ") +
                                    name);
      }
    }
  }
}

void RequirePositive(double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument(
        "competitive family needs alpha > 0 and beta > 0");
  }
}

Matrix2 Negate(const Matrix2& m) {
  return {{{-m[0][0], -m[0][1]}, {-m[1][0], -m[1][1]}}};
}

// Parses "a,b" into two doubles.
std::pair<double, double> ParsePair(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw std::invalid_argument("expected 'alpha,beta' but got '" +
                                std::string(text) + "'");
  }
  std::size_t used_a = 0;
  std::size_t used_b = 0;
  const std::string a(text.substr(0, comma));
  const std::string b(text.substr(comma + 1));
  double x = 0.0;
  double y = 0.0;
  try {
    x = std::stod(a, &used_a);
    y = std::stod(b, &used_b);
  } catch (const std::exception&) {
    throw std::invalid_argument("expected 'alpha,beta' but got '" +
                                std::string(text) + "'");
  }
  if (used_a != a.size() || used_b != b.size()) {
    throw std::invalid_argument("trailing characters in '" +
                                std::string(text) + "'");
  }
  return {x, y};
}

}  // namespace

Game2x2::Game2x2(const Matrix2& g, const Matrix2& h) : g_(g), h_(h) {
  RequireFinite(g_, "g");
  RequireFinite(h_, "h");
}

Game2x2 Game2x2::ZeroSum(const Matrix2& g) { return Game2x2(g, Negate(g)); }

bool Game2x2::IsZeroSum() const {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      if (h_[i][j] != -g_[i][j]) return false;
    }
  }
  return true;
}

std::string_view ToString(CompetitiveClass c) {
  switch (c) {
    case CompetitiveClass::kConditionA:
      return "ConditionA";
    case CompetitiveClass::kConditionB:
      return "ConditionB";
    case CompetitiveClass::kNotCompetitive:
      return "NotCompetitive";
  }
  return "?";
}

Game2x2 MakeMatchingPennies() {
  return Game2x2::ZeroSum({{{1.0, 0.0}, {0.0, 1.0}}});
}

Game2x2 MakeCompetitiveFamily(double alpha, double beta) {
  RequirePositive(alpha, beta);
  return Game2x2({{{-alpha, 0.0}, {0.0, -1.0}}}, {{{beta, 0.0}, {0.0, 1.0}}});
}

Game2x2 MakeZeroSumEquivalent(double alpha, double beta) {
  RequirePositive(alpha, beta);
  const double g00 = (1.0 - alpha * beta) / (1.0 + beta);
  const double g10 = (1.0 + alpha) / (1.0 + beta);
  return Game2x2::ZeroSum({{{g00, 1.0}, {g10, 0.0}}});
}

Game2x2 AffineTransform(const Game2x2& game, double scale_g, double shift_g,
                        double scale_h, double shift_h) {
  Matrix2 g = game.g();
  Matrix2 h = game.h();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      g[i][j] = scale_g * g[i][j] + shift_g;
      h[i][j] = scale_h * h[i][j] + shift_h;
    }
  }
  return Game2x2(g, h);
}

Game2x2 SwapRowActions(const Game2x2& game) {
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  return Game2x2({g[1], g[0]}, {h[1], h[0]});
}

Game2x2 SwapColumnActions(const Game2x2& game) {
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  return Game2x2({{{g[0][1], g[0][0]}, {g[1][1], g[1][0]}}},
                 {{{h[0][1], h[0][0]}, {h[1][1], h[1][0]}}});
}

CompetitiveClass Competitiveness(const Game2x2& game) {
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  if (g[0][0] > g[1][0] && g[0][1] < g[1][1] && h[0][0] < h[0][1] &&
      h[1][0] > h[1][1]) {
    return CompetitiveClass::kConditionA;
  }
  if (g[0][0] < g[1][0] && g[0][1] > g[1][1] && h[0][0] > h[0][1] &&
      h[1][0] < h[1][1]) {
    return CompetitiveClass::kConditionB;
  }
  return CompetitiveClass::kNotCompetitive;
}

Equilibrium NashEquilibrium(const Game2x2& game) {
  const CompetitiveClass cls = Competitiveness(game);
  if (cls == CompetitiveClass::kNotCompetitive) {
    throw std::invalid_argument(
        "game is not competitive; its equilibrium may be pure or non-unique");
  }
  const Matrix2& g = game.g();
  const Matrix2& h = game.h();
  // Player two's q* makes player one indifferent, and vice versa.
  const double gap_q0 = g[0][0] - g[1][0];
  const double gap_q1 = g[1][1] - g[0][1];
  const double gap_p0 = h[0][0] - h[0][1];
  const double gap_p1 = h[1][1] - h[1][0];
  const double den_q = gap_q0 + gap_q1;
  const double den_p = gap_p0 + gap_p1;
  // Strict inequalities give both sums one strict sign.
  if (den_q == 0.0 || den_p == 0.0) {
    throw std::logic_error("degenerate equilibrium denominator");
  }
  Equilibrium eq;
  eq.q_star = gap_q0 / den_q;
  eq.p_star = gap_p0 / den_p;
  eq.r_star = ExpectedPayoff(game, eq.p_star, eq.q_star, Player::kOne);
  return eq;
}

double ExpectedPayoff(const Game2x2& game, double p, double q, Player player) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("mixed strategies must lie in [0, 1]");
  }
  const Matrix2& x = player == Player::kOne ? game.g() : game.h();
  return (1 - p) * (1 - q) * x[0][0] + (1 - p) * q * x[0][1] +
         p * (1 - q) * x[1][0] + p * q * x[1][1];
}

nlohmann::json GameToJson(const Game2x2& game) {
  const auto rows = [](const Matrix2& m) {
    return nlohmann::json::array({nlohmann::json::array({m[0][0], m[0][1]}),
                                  nlohmann::json::array({m[1][0], m[1][1]})});
  };
  return {{"g", rows(game.g())}, {"h", rows(game.h())}};
}

Game2x2 GameFromJson(const nlohmann::json& j) {
  const auto read = [&j](const char* key) {
    if (!j.is_object() || !j.contains(key)) {
      throw std::invalid_argument(std::string("game JSON lacks key '") + key +
                                  "'");
    }
    const auto& m = j.at(key);
    if (!m.is_array() || m.size() != 2 || !m[0].is_array() ||
        m[0].size() != 2 || !m[1].is_array() || m[1].size() != 2) {
      throw std::invalid_argument(std::string("game JSON key '") + key +
                                  "' must be a 2x2 array");
    }
    Matrix2 out{};
    for (int i = 0; i < 2; ++i) {
      for (int c = 0; c < 2; ++c) {
        if (!m[i][c].is_number()) {
          throw std::invalid_argument("game payoffs must be numbers");
        }
        out[i][c] = m[i][c].get<double>();
      }
    }
    return out;
  };
  return Game2x2(read("g"), read("h"));
}

Game2x2 ParseGameDescriptor(std::string_view descriptor) {
  if (descriptor == "matching-pennies") return MakeMatchingPennies();
  constexpr std::string_view kFamily = "family:";
  constexpr std::string_view kZeroSum = "zs-equivalent:";
  if (descriptor.starts_with(kFamily)) {
    const auto [a, b] = ParsePair(descriptor.substr(kFamily.size()));
    return MakeCompetitiveFamily(a, b);
  }
  if (descriptor.starts_with(kZeroSum)) {
    const auto [a, b] = ParsePair(descriptor.substr(kZeroSum.size()));
    return MakeZeroSumEquivalent(a, b);
  }
  std::ifstream in{std::string(descriptor)};
  if (!in) {
    throw std::invalid_argument(
        "game must be 'matching-pennies', 'family:a,b', 'zs-equivalent:a,b' "
        "or a readable JSON file; got '" +
        std::string(descriptor) + "'");
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("bad game JSON in '" + std::string(descriptor) +
                                "': " + e.what());
  }
  return GameFromJson(j);
}

}  // namespace noregret
