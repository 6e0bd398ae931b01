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

#ifndef NOREGRET_GAMES_H_
#define NOREGRET_GAMES_H_

#include <array>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace noregret {

// Seat in the 2x2 game. Player one picks rows, player two picks columns.
enum class Player { kOne = 1, kTwo = 2 };

// Payoff matrix indexed [row action][column action], actions in {0, 1}.
using Matrix2 = std::array<std::array<double, 2>, 2>;

// A two-player, two-action game. g holds player one's payoffs G(i, j) and h
// holds player two's payoffs H(i, j), where i is player one's action and j is
// player two's action. Immutable once built.
class Game2x2 {
 public:
  // Throws std::invalid_argument when any entry is not finite.
  Game2x2(const Matrix2& g, const Matrix2& h);

  // h = -g.
  static Game2x2 ZeroSum(const Matrix2& g);

  const Matrix2& g() const { return g_; }
  const Matrix2& h() const { return h_; }

  // Payoff of `player` when the row player plays i and the column player j.
  double Payoff(Player player, int i, int j) const {
    return player == Player::kOne ? g_[i][j] : h_[i][j];
  }

  // True when h(i, j) == -g(i, j) exactly for every cell.
  bool IsZeroSum() const;

  bool operator==(const Game2x2& other) const = default;

 private:
  Matrix2 g_;
  Matrix2 h_;
};

enum class CompetitiveClass { kConditionA, kConditionB, kNotCompetitive };

std::string_view ToString(CompetitiveClass c);

// Unique completely mixed equilibrium: p_star (q_star) is the probability that
// player one (two) plays action 1; r_star is player one's payoff there.
struct Equilibrium {
  double p_star = 0.5;
  double q_star = 0.5;
  double r_star = 0.0;
};

// Matching pennies with payoffs in {0, 1}: G(0,0) = G(1,1) = 1, off-diagonal
// zero, h = -g.
Game2x2 MakeMatchingPennies();

// Non-zero-sum competitive game with G(0,0) = -alpha, G(1,1) = -1,
// H(0,0) = beta, H(1,1) = 1 and zero off-diagonals. Requires alpha, beta > 0.
Game2x2 MakeCompetitiveFamily(double alpha, double beta);

// The zero-sum game sharing best-response functions (and hence the
// equilibrium) with MakeCompetitiveFamily(alpha, beta).
Game2x2 MakeZeroSumEquivalent(double alpha, double beta);

// Applies G -> scale_g * G + shift_g and H -> scale_h * H + shift_h. With
// (2, -1, 2, 1) this maps {0,1} matching pennies onto its {-1,+1} form.
Game2x2 AffineTransform(const Game2x2& game, double scale_g, double shift_g,
                        double scale_h, double shift_h);

// Relabels player one's actions (swaps rows of both matrices).
Game2x2 SwapRowActions(const Game2x2& game);
// Relabels player two's actions (swaps columns of both matrices).
Game2x2 SwapColumnActions(const Game2x2& game);

CompetitiveClass Competitiveness(const Game2x2& game);

// Closed form from the two indifference conditions. Throws
// std::invalid_argument for games that are not competitive.
Equilibrium NashEquilibrium(const Game2x2& game);

// Bilinear extension X(p, q) of the selected player's payoff matrix.
// Throws std::invalid_argument unless p, q lie in [0, 1].
double ExpectedPayoff(const Game2x2& game, double p, double q, Player player);

// Payoff of pure action `action` of `player` against the opponent's mixture.
// Unchecked; callers keep `opponent_mix` in [0, 1].
inline double PurePayoff(const Game2x2& game, Player player, int action,
                         double opponent_mix) {
  if (player == Player::kOne) {
    const auto& row = game.g()[action];
    return (1.0 - opponent_mix) * row[0] + opponent_mix * row[1];
  }
  const auto& h = game.h();
  return (1.0 - opponent_mix) * h[0][action] + opponent_mix * h[1][action];
}

// {"g": [[..],[..]], "h": [[..],[..]]}
nlohmann::json GameToJson(const Game2x2& game);
Game2x2 GameFromJson(const nlohmann::json& j);

// Accepts "matching-pennies", "family:alpha,beta", "zs-equivalent:alpha,beta"
// or a path to a JSON file holding GameToJson output.
Game2x2 ParseGameDescriptor(std::string_view descriptor);

}  // namespace noregret

#endif  // NOREGRET_GAMES_H_
