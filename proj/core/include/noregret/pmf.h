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

#ifndef NOREGRET_PMF_H_
#define NOREGRET_PMF_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

namespace noregret {

// Probability mass function on the integers {offset, ..., offset + n - 1}.
class Pmf {
 public:
  Pmf() = default;
  // Throws std::invalid_argument on negative or non-finite masses or when the
  // total differs from one by more than 1e-10.
  Pmf(std::int64_t support_offset, std::vector<double> masses);

  static Pmf PointMass(std::int64_t z);

  std::int64_t support_offset() const { return offset_; }
  std::int64_t support_max() const {
    return offset_ + static_cast<std::int64_t>(masses_.size()) - 1;
  }
  const std::vector<double>& masses() const { return masses_; }

  // Mass at z; zero outside the support.
  double operator()(std::int64_t z) const;

  double Mean() const;
  double Total() const;

  // True when some mass was flushed to zero for falling below 1e-300.
  bool underflow() const { return underflow_; }

  // Distribution of the sum of independent variables with these pmfs.
  Pmf Convolve(const Pmf& other) const;

  // "z,mass" rows after a header line; 17 significant digits.
  void WriteCsv(std::ostream& out) const;

 private:
  friend Pmf FlushTiny(std::int64_t offset, std::vector<double> masses,
                       bool zero_is_underflow);
  std::int64_t offset_ = 0;
  std::vector<double> masses_{1.0};
  bool underflow_ = false;
};

// Masses below this are treated as zero in ratio computations.
inline constexpr double kUnderflowMass = 1e-300;

Pmf BinomialPmf(std::int64_t t, double q);

// Exact O(t^2) convolution over independent Bernoulli(q_s).
Pmf PoissonBinomialPmf(std::span<const double> qs);

// Binomial(t - s, q) shifted up by s.
Pmf ShiftedBinomialPmf(std::int64_t t, std::int64_t s, double q);

// Bin(n/2, q_bar + delta) + Bin(n/2, q_bar - delta) + Bin(t - n, q_bar).
Pmf MixtureBinomialPmf(std::int64_t n, std::int64_t t, double q_bar,
                       double delta);

double NormalPdf(double x, double mean, double variance);

// Worst |pmf(z) / normal_pdf(z; tq, tq(1-q)) - 1| over integers z within
// window_coeff * sqrt(t) of tq.
double DeMoivreRatioCertificate(std::int64_t t, double q,
                                double window_coeff);

struct RatioWindowReport {
  double center = 0.0;
  double halfwidth = 0.0;
  double min_ratio = 0.0;
  std::int64_t argmin_z = 0;
  double gamma = 0.0;
  bool underflow = false;
};

nlohmann::json ToJson(const RatioWindowReport& report);

// Minimum numerator(z) / denominator(z) over integers in
// [center - halfwidth, center + halfwidth]. Points where only the denominator
// vanishes count as +infinity and points where both vanish are skipped.
// Throws std::invalid_argument when no usable point remains.
RatioWindowReport MinPmfRatio(const Pmf& numerator, const Pmf& denominator,
                              double center, double halfwidth);

struct ShiftRatioCheck {
  double measured = 0.0;   // min P(Z'_t = z) / P(Z''_{t,s} = z)
  double analytic = 0.0;   // (1 + beta0)^(-alpha)
  // exp(-alpha beta0). The product form of the ratio is bounded below by
  // (1 + beta0 / sqrt(t))^(-s), which is at least this.
  double exponential = 0.0;
  std::int64_t z_low = 0;
  std::int64_t z_high = 0;
  bool Holds() const { return measured >= analytic; }
  bool HoldsExponential() const { return measured >= exponential; }
};

// Compares Binomial(t, q) against its s-shifted counterpart on
// z in [s, q t + window_coeff sqrt(t)] with alpha = s / sqrt(t) and
// beta0 = window_coeff / q.
ShiftRatioCheck ShiftRatioBoundCheck(std::int64_t t, std::int64_t s, double q,
                                     double window_coeff);

struct ExtremizerResult {
  double min_mass = 0.0;
  // Every grid vector attaining the minimum (up to 1e-12 relative).
  std::vector<std::vector<double>> minimizers;
  // True when every minimizer coordinate is in {-delta, 0, +delta}.
  bool three_point_structure = true;
};

// Exhaustive minimisation of P(Y_t = z), Y_t a sum of Bernoulli(q_bar + eta_s),
// over zero-sum deviation vectors eta on a grid_levels-point grid spanning
// [-delta, delta]. Requires t <= 8 and odd grid_levels.
ExtremizerResult ExtremizerOracle(int t, double q_bar, double delta,
                                  std::int64_t z, int grid_levels = 9);

// Same search reporting every z in {0..t} from a single enumeration.
std::vector<ExtremizerResult> ExtremizerScan(int t, double q_bar,
                                             double delta,
                                             int grid_levels = 9);

}  // namespace noregret

#endif  // NOREGRET_PMF_H_
