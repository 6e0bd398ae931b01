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

#include "noregret/pmf.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace noregret {
namespace {

void RequireProbability(double q, const char* what) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

double LogBinomialMass(std::int64_t t, double q, std::int64_t z) {
  if (z < 0 || z > t) return -std::numeric_limits<double>::infinity();
  if (q == 0.0) return z == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (q == 1.0) return z == t ? 0.0 : -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(t);
  const double k = static_cast<double>(z);
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1) +
         k * std::log(q) + (n - k) * std::log1p(-q);
}

}  // namespace

Pmf FlushTiny(std::int64_t offset, std::vector<double> masses,
              bool zero_is_underflow) {
  bool flushed = false;
  for (double& m : masses) {
    if (m < kUnderflowMass) {
      if (m != 0.0 || zero_is_underflow) flushed = true;
      m = 0.0;
    }
  }
  Pmf out(offset, std::move(masses));
  out.underflow_ = flushed;
  return out;
}

Pmf::Pmf(std::int64_t support_offset, std::vector<double> masses)
    : offset_(support_offset), masses_(std::move(masses)) {
  if (masses_.empty()) throw std::invalid_argument("pmf needs a support");
  for (double m : masses_) {
    if (!std::isfinite(m) || m < 0.0) {
      throw std::invalid_argument("pmf masses must be finite and >= 0");
    }
  }
  if (std::abs(Total() - 1.0) > 1e-10) {
    throw std::invalid_argument("pmf masses must sum to one");
  }
}

Pmf Pmf::PointMass(std::int64_t z) { return Pmf(z, {1.0}); }

double Pmf::operator()(std::int64_t z) const {
  if (z < offset_ || z > support_max()) return 0.0;
  return masses_[static_cast<std::size_t>(z - offset_)];
}

double Pmf::Total() const {
  return std::accumulate(masses_.begin(), masses_.end(), 0.0);
}

double Pmf::Mean() const {
  double mean = 0.0;
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    mean += static_cast<double>(offset_ + static_cast<std::int64_t>(k)) *
            masses_[k];
  }
  return mean;
}

Pmf Pmf::Convolve(const Pmf& other) const {
  std::vector<double> out(masses_.size() + other.masses_.size() - 1, 0.0);
  for (std::size_t a = 0; a < masses_.size(); ++a) {
    if (masses_[a] == 0.0) continue;
    for (std::size_t b = 0; b < other.masses_.size(); ++b) {
      out[a + b] += masses_[a] * other.masses_[b];
    }
  }
  Pmf result = FlushTiny(offset_ + other.offset_, std::move(out), false);
  result.underflow_ = result.underflow_ || underflow_ || other.underflow_;
  return result;
}

void Pmf::WriteCsv(std::ostream& out) const {
  out << "z,mass\n";
  char buf[64];
  for (std::size_t k = 0; k < masses_.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.17g", masses_[k]);
    out << offset_ + static_cast<std::int64_t>(k) << ',' << buf << '\n';
  }
}

Pmf BinomialPmf(std::int64_t t, double q) {
  if (t < 0) throw std::invalid_argument("binomial needs t >= 0");
  RequireProbability(q, "binomial q");
  std::vector<double> w(static_cast<std::size_t>(t) + 1, 0.0);
  if (q == 0.0) {
    w.front() = 1.0;
    return Pmf(0, std::move(w));
  }
  if (q == 1.0) {
    w.back() = 1.0;
    return Pmf(0, std::move(w));
  }
  // Unnormalised recurrence outward from the mode keeps every ratio <= 1.
  const auto mode = std::clamp<std::int64_t>(
      static_cast<std::int64_t>(std::floor((t + 1) * q)), 0, t);
  const double odds = q / (1.0 - q);
  w[mode] = 1.0;
  for (std::int64_t k = mode; k < t; ++k) {
    w[k + 1] = w[k] * (static_cast<double>(t - k) / (k + 1)) * odds;
  }
  for (std::int64_t k = mode; k > 0; --k) {
    w[k - 1] = w[k] * (static_cast<double>(k) / (t - k + 1)) / odds;
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& m : w) m /= total;
  return FlushTiny(0, std::move(w), /*zero_is_underflow=*/true);
}

Pmf PoissonBinomialPmf(std::span<const double> qs) {
  std::vector<double> dp(qs.size() + 1, 0.0);
  dp[0] = 1.0;
  std::size_t n = 0;
  for (double q : qs) {
    RequireProbability(q, "Bernoulli mean");
    ++n;
    for (std::size_t k = n; k > 0; --k) {
      dp[k] = dp[k] * (1.0 - q) + dp[k - 1] * q;
    }
    dp[0] *= 1.0 - q;
  }
  return FlushTiny(0, std::move(dp), false);
}

Pmf ShiftedBinomialPmf(std::int64_t t, std::int64_t s, double q) {
  if (s < 0 || s > t) {
    throw std::invalid_argument("shifted binomial needs 0 <= s <= t");
  }
  const Pmf base = BinomialPmf(t - s, q);
  return Pmf::PointMass(s).Convolve(base);
}

Pmf MixtureBinomialPmf(std::int64_t n, std::int64_t t, double q_bar,
                       double delta) {
  if (n < 0 || n > t || n % 2 != 0) {
    throw std::invalid_argument("mixture binomial needs even n in [0, t]");
  }
  RequireProbability(q_bar, "q_bar");
  RequireProbability(q_bar + delta, "q_bar + delta");
  RequireProbability(q_bar - delta, "q_bar - delta");
  return BinomialPmf(n / 2, q_bar + delta)
      .Convolve(BinomialPmf(n / 2, q_bar - delta))
      .Convolve(BinomialPmf(t - n, q_bar));
}

double NormalPdf(double x, double mean, double variance) {
  const double d = x - mean;
  return std::exp(-0.5 * d * d / variance) /
         std::sqrt(2.0 * std::numbers::pi * variance);
}

double DeMoivreRatioCertificate(std::int64_t t, double q,
                                double window_coeff) {
  if (!(q > 0.0 && q < 1.0)) {
    throw std::invalid_argument("de Moivre certificate needs 0 < q < 1");
  }
  if (t < 1) throw std::invalid_argument("de Moivre certificate needs t >= 1");
  const Pmf pmf = BinomialPmf(t, q);
  const double mean = static_cast<double>(t) * q;
  const double var = mean * (1.0 - q);
  const double half = window_coeff * std::sqrt(static_cast<double>(t));
  const auto lo = std::max<std::int64_t>(
      0, static_cast<std::int64_t>(std::ceil(mean - half)));
  const auto hi = std::min<std::int64_t>(
      t, static_cast<std::int64_t>(std::floor(mean + half)));
  double worst = 0.0;
  for (std::int64_t z = lo; z <= hi; ++z) {
    const double ratio = pmf(z) / NormalPdf(static_cast<double>(z), mean, var);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  return worst;
}

nlohmann::json ToJson(const RatioWindowReport& report) {
  return {{"center", report.center},       {"halfwidth", report.halfwidth},
          {"min_ratio", report.min_ratio}, {"argmin_z", report.argmin_z},
          {"gamma", report.gamma},         {"underflow", report.underflow}};
}

RatioWindowReport MinPmfRatio(const Pmf& numerator, const Pmf& denominator,
                              double center, double halfwidth) {
  RatioWindowReport report;
  report.center = center;
  report.halfwidth = halfwidth;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.underflow = numerator.underflow() || denominator.underflow();
  const auto lo = static_cast<std::int64_t>(std::ceil(center - halfwidth));
  const auto hi = static_cast<std::int64_t>(std::floor(center + halfwidth));
  bool any = false;
  for (std::int64_t z = lo; z <= hi; ++z) {
    const double num = numerator(z);
    const double den = denominator(z);
    if (num == 0.0 && den == 0.0) continue;
    const double ratio = den == 0.0 ? std::numeric_limits<double>::infinity()
                                    : num / den;
    if (!any || ratio < report.min_ratio) {
      report.min_ratio = ratio;
      report.argmin_z = z;
    }
    any = true;
  }
  if (!any) {
    throw std::invalid_argument("ratio window holds no supported point");
  }
  return report;
}

ShiftRatioCheck ShiftRatioBoundCheck(std::int64_t t, std::int64_t s, double q,
                                     double window_coeff) {
  if (t < 1 || s < 0 || s > t) {
    throw std::invalid_argument("shift ratio check needs t >= 1, 0 <= s <= t");
  }
  if (!(q > 0.0 && q < 1.0) || !(window_coeff > 0.0)) {
    throw std::invalid_argument(
        "shift ratio check needs 0 < q < 1 and a positive window");
  }
  const double root_t = std::sqrt(static_cast<double>(t));
  const double alpha = static_cast<double>(s) / root_t;
  const double beta0 = window_coeff / q;
  ShiftRatioCheck check;
  check.analytic = std::pow(1.0 + beta0, -alpha);
  check.exponential = std::exp(-alpha * beta0);
  check.z_low = s;
  check.z_high = std::min<std::int64_t>(
      t, static_cast<std::int64_t>(
             std::floor(q * static_cast<double>(t) + window_coeff * root_t +
                        1e-9)));
  if (check.z_high < check.z_low) {
    throw std::invalid_argument("shift ratio window is empty");
  }
  // Log masses avoid underflow in the far-left part of the window.
  check.measured = std::numeric_limits<double>::infinity();
  for (std::int64_t z = check.z_low; z <= check.z_high; ++z) {
    const double log_plain = LogBinomialMass(t, q, z);
    const double log_shifted = LogBinomialMass(t - s, q, z - s);
    check.measured = std::min(check.measured, std::exp(log_plain - log_shifted));
  }
  if (s == 0) check.measured = std::min(check.measured, 1.0);
  return check;
}

std::vector<ExtremizerResult> ExtremizerScan(int t, double q_bar, double delta,
                                             int grid_levels) {
  if (t < 1 || t > 8) {
    throw std::invalid_argument("extremizer oracle needs 1 <= t <= 8");
  }
  if (grid_levels < 3 || grid_levels % 2 == 0) {
    throw std::invalid_argument(
        "extremizer grid needs an odd number of levels >= 3 so the zero-sum "
        "constraint is feasible");
  }
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  RequireProbability(q_bar - delta, "q_bar - delta");
  RequireProbability(q_bar + delta, "q_bar + delta");

  const int half = (grid_levels - 1) / 2;
  const auto value_of = [&](int level) {
    return delta * static_cast<double>(level) / half;
  };

  std::vector<ExtremizerResult> results(static_cast<std::size_t>(t) + 1);
  if (delta == 0.0) {
    const std::vector<double> qs(static_cast<std::size_t>(t), q_bar);
    const Pmf pmf = PoissonBinomialPmf(qs);
    for (int z = 0; z <= t; ++z) {
      results[z].min_mass = pmf(z);
      results[z].minimizers = {std::vector<double>(t, 0.0)};
    }
    return results;
  }

  // Odometer over level vectors in {-half..half}^t.
  std::vector<int> levels(static_cast<std::size_t>(t), -half);
  std::vector<double> qs(static_cast<std::size_t>(t));
  std::vector<double> dp(static_cast<std::size_t>(t) + 1);
  const auto advance = [&]() {
    for (int k = 0; k < t; ++k) {
      if (levels[k] < half) {
        ++levels[k];
        return true;
      }
      levels[k] = -half;
    }
    return false;
  };
  const auto masses = [&]() {
    std::fill(dp.begin(), dp.end(), 0.0);
    dp[0] = 1.0;
    for (int k = 0; k < t; ++k) {
      const double q = q_bar + value_of(levels[k]);
      for (int m = k + 1; m > 0; --m) dp[m] = dp[m] * (1.0 - q) + dp[m - 1] * q;
      dp[0] *= 1.0 - q;
    }
  };
  const auto feasible = [&]() {
    return std::accumulate(levels.begin(), levels.end(), 0) == 0;
  };

  std::vector<double> best(static_cast<std::size_t>(t) + 1,
                           std::numeric_limits<double>::infinity());
  do {
    if (!feasible()) continue;
    masses();
    for (int z = 0; z <= t; ++z) best[z] = std::min(best[z], dp[z]);
  } while (advance());

  std::fill(levels.begin(), levels.end(), -half);
  do {
    if (!feasible()) continue;
    masses();
    for (int z = 0; z <= t; ++z) {
      const double tol = 1e-12 * std::max(best[z], 1e-300);
      if (dp[z] <= best[z] + tol) {
        std::vector<double> eta(static_cast<std::size_t>(t));
        bool three_point = true;
        for (int k = 0; k < t; ++k) {
          eta[k] = value_of(levels[k]);
          three_point = three_point &&
                        (levels[k] == 0 || std::abs(levels[k]) == half);
        }
        results[z].minimizers.push_back(std::move(eta));
        results[z].three_point_structure =
            results[z].three_point_structure && three_point;
      }
    }
  } while (advance());
  for (int z = 0; z <= t; ++z) results[z].min_mass = best[z];
  return results;
}

ExtremizerResult ExtremizerOracle(int t, double q_bar, double delta,
                                  std::int64_t z, int grid_levels) {
  if (z < 0 || z > t) throw std::invalid_argument("z must lie in {0..t}");
  return std::move(ExtremizerScan(t, q_bar, delta, grid_levels)[z]);
}

}  // namespace noregret
