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
#include <random>
#include <sstream>

#include "gtest/gtest.h"

namespace noregret {
namespace {

// Exact C(n, k) q^k (1 - q)^(n - k) via lgamma, independent of the recurrence.
double BinomialMassOracle(std::int64_t n, double q, std::int64_t k) {
  if (k < 0 || k > n) return 0.0;
  const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                    std::lgamma(n - k + 1.0);
  return std::exp(lc + k * std::log(q) + (n - k) * std::log1p(-q));
}

std::vector<double> Enumerate(const std::vector<double>& qs) {
  const std::size_t t = qs.size();
  std::vector<double> pmf(t + 1, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << t); ++mask) {
    double mass = 1.0;
    int ones = 0;
    for (std::size_t s = 0; s < t; ++s) {
      const bool bit = (mask >> s) & 1u;
      ones += bit;
      mass *= bit ? qs[s] : 1.0 - qs[s];
    }
    pmf[static_cast<std::size_t>(ones)] += mass;
  }
  return pmf;
}

TEST(PmfTest, ValidatesMasses) {
  EXPECT_THROW(Pmf(0, {0.5, 0.6}), std::invalid_argument);
  EXPECT_THROW(Pmf(0, {1.5, -0.5}), std::invalid_argument);
  EXPECT_NO_THROW(Pmf(3, {0.25, 0.75}));
  const Pmf p(3, {0.25, 0.75});
  EXPECT_EQ(p.support_offset(), 3);
  EXPECT_EQ(p.support_max(), 4);
  EXPECT_DOUBLE_EQ(p(4), 0.75);
  EXPECT_DOUBLE_EQ(p(5), 0.0);
  EXPECT_DOUBLE_EQ(p.Mean(), 3.75);
}

TEST(PmfTest, BinomialSmallCases) {
  const Pmf a = BinomialPmf(2, 0.5);
  EXPECT_NEAR(a(0), 0.25, 1e-15);
  EXPECT_NEAR(a(1), 0.5, 1e-15);
  EXPECT_NEAR(a(2), 0.25, 1e-15);
  const Pmf b = BinomialPmf(1, 0.3);
  EXPECT_NEAR(b(0), 0.7, 1e-15);
  EXPECT_NEAR(b(1), 0.3, 1e-15);
  // C(20, 10) / 2^20 exactly.
  EXPECT_NEAR(BinomialPmf(20, 0.5)(10), 184756.0 / 1048576.0, 1e-15);
  EXPECT_DOUBLE_EQ(BinomialPmf(0, 0.4)(0), 1.0);
  EXPECT_DOUBLE_EQ(BinomialPmf(5, 1.0)(5), 1.0);
  EXPECT_DOUBLE_EQ(BinomialPmf(5, 0.0)(0), 1.0);
}

TEST(PmfTest, BinomialMatchesLgammaOracle) {
  for (std::int64_t t : {7, 100, 1000, 20000}) {
    for (double q : {0.1, 0.5, 0.77}) {
      const Pmf p = BinomialPmf(t, q);
      EXPECT_NEAR(p.Total(), 1.0, 1e-10);
      EXPECT_NEAR(p.Mean(), t * q, 1e-8 * t);
      const auto c = static_cast<std::int64_t>(t * q);
      for (std::int64_t z = std::max<std::int64_t>(0, c - 50);
           z <= std::min(t, c + 50); ++z) {
        const double want = BinomialMassOracle(t, q, z);
        EXPECT_NEAR(p(z), want, 1e-9 * want + 1e-300) << t << " " << q << " " << z;
      }
    }
  }
}

TEST(PmfTest, PoissonBinomialMatchesEnumeration) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const std::size_t t = 1 + static_cast<std::size_t>(rng() % 16);
    std::vector<double> qs(t);
    for (double& q : qs) q = unit(rng);
    const Pmf dp = PoissonBinomialPmf(qs);
    const auto brute = Enumerate(qs);
    for (std::size_t z = 0; z <= t; ++z) {
      worst = std::max(worst, std::abs(dp(static_cast<std::int64_t>(z)) - brute[z]));
    }
  }
  EXPECT_LE(worst, 1e-12);
  const Pmf p = PoissonBinomialPmf(std::vector<double>{0.1, 0.9});
  EXPECT_NEAR(p(0), 0.09, 1e-15);
  EXPECT_NEAR(p(1), 0.82, 1e-15);
  EXPECT_NEAR(p(2), 0.09, 1e-15);
}

TEST(PmfTest, ConstantPoissonBinomialIsBinomial) {
  for (double q : {0.2, 0.5}) {
    const std::vector<double> qs(300, q);
    const Pmf a = PoissonBinomialPmf(qs);
    const Pmf b = BinomialPmf(300, q);
    for (std::int64_t z = 0; z <= 300; ++z) EXPECT_NEAR(a(z), b(z), 1e-12);
  }
}

TEST(PmfTest, ShiftedBinomial) {
  const Pmf s0 = ShiftedBinomialPmf(50, 0, 0.3);
  const Pmf b = BinomialPmf(50, 0.3);
  for (std::int64_t z = 0; z <= 50; ++z) EXPECT_NEAR(s0(z), b(z), 1e-15);
  const Pmf full = ShiftedBinomialPmf(10, 10, 0.3);
  EXPECT_DOUBLE_EQ(full(10), 1.0);
  EXPECT_NEAR(ShiftedBinomialPmf(100, 10, 0.5)(60), BinomialPmf(90, 0.5)(50),
              1e-15);
  EXPECT_EQ(ShiftedBinomialPmf(100, 10, 0.5).support_offset(), 10);
  EXPECT_THROW(ShiftedBinomialPmf(5, 6, 0.5), std::invalid_argument);
}

TEST(PmfTest, MixtureBinomial) {
  const Pmf m = MixtureBinomialPmf(2, 2, 0.5, 0.3);
  EXPECT_NEAR(m(0), 0.16, 1e-15);
  EXPECT_NEAR(m(1), 0.68, 1e-15);
  EXPECT_NEAR(m(2), 0.16, 1e-15);
  const Pmf plain = BinomialPmf(40, 0.3);
  const Pmf n0 = MixtureBinomialPmf(0, 40, 0.3, 0.2);
  const Pmf d0 = MixtureBinomialPmf(20, 40, 0.3, 0.0);
  for (std::int64_t z = 0; z <= 40; ++z) {
    EXPECT_NEAR(n0(z), plain(z), 1e-14);
    EXPECT_NEAR(d0(z), plain(z), 1e-14);
  }
  for (std::int64_t n : {0, 10, 40}) {
    EXPECT_NEAR(MixtureBinomialPmf(n, 40, 0.3, 0.15).Mean(), 12.0, 1e-9);
  }
  EXPECT_THROW(MixtureBinomialPmf(3, 10, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(MixtureBinomialPmf(4, 10, 0.9, 0.2), std::invalid_argument);
  EXPECT_THROW(MixtureBinomialPmf(12, 10, 0.5, 0.1), std::invalid_argument);
}

TEST(PmfTest, PmfsSumToOneAndAreNonNegative) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> qs(1 + rng() % 200);
    for (double& q : qs) q = unit(rng);
    for (const Pmf& p : {PoissonBinomialPmf(qs),
                         BinomialPmf(static_cast<std::int64_t>(qs.size()), qs[0]),
                         ShiftedBinomialPmf(static_cast<std::int64_t>(qs.size()),
                                            static_cast<std::int64_t>(qs.size() / 3),
                                            qs[0])}) {
      EXPECT_NEAR(p.Total(), 1.0, 1e-10);
      for (double m : p.masses()) EXPECT_GE(m, 0.0);
    }
  }
}

TEST(PmfTest, FarTailsFlagUnderflow) {
  const Pmf p = BinomialPmf(100000, 0.5);
  EXPECT_TRUE(p.underflow());
  EXPECT_EQ(p(0), 0.0);
  EXPECT_FALSE(BinomialPmf(100, 0.5).underflow());
}

TEST(PmfTest, ConvolveAndCsv) {
  const Pmf a = Pmf(0, {0.5, 0.5});
  const Pmf c = a.Convolve(a).Convolve(Pmf::PointMass(3));
  EXPECT_EQ(c.support_offset(), 3);
  EXPECT_NEAR(c(4), 0.5, 1e-15);
  std::ostringstream out;
  Pmf(0, {0.1, 0.9}).WriteCsv(out);
  EXPECT_EQ(out.str(), "z,mass\n0,0.10000000000000001\n1,0.90000000000000002\n");
}

TEST(PmfTest, MinPmfRatio) {
  const Pmf b = BinomialPmf(30, 0.4);
  const RatioWindowReport same = MinPmfRatio(b, b, 12, 5);
  EXPECT_DOUBLE_EQ(same.min_ratio, 1.0);
  const Pmf pb = PoissonBinomialPmf(std::vector<double>{0.4, 0.6});
  const RatioWindowReport r = MinPmfRatio(pb, BinomialPmf(2, 0.5), 1, 1);
  EXPECT_NEAR(r.min_ratio, 0.96, 1e-12);
  EXPECT_TRUE(r.argmin_z == 0 || r.argmin_z == 2);
  EXPECT_GE(r.argmin_z, r.center - r.halfwidth);
  EXPECT_LE(r.argmin_z, r.center + r.halfwidth);
  // Denominator zero with a non-zero numerator counts as +infinity.
  const RatioWindowReport inf = MinPmfRatio(Pmf(0, {0.5, 0.5}), Pmf(0, {1.0}), 0.5, 0.5);
  EXPECT_DOUBLE_EQ(inf.min_ratio, 0.5);
  EXPECT_EQ(inf.argmin_z, 0);
  EXPECT_THROW(MinPmfRatio(Pmf(0, {1.0}), Pmf(0, {1.0}), 10, 1),
               std::invalid_argument);
}

TEST(PmfTest, DeMoivreCertificateImprovesWithT) {
  double previous = 1e9;
  for (std::int64_t t : {1000, 10000, 100000, 1000000}) {
    const double c = DeMoivreRatioCertificate(t, 0.5, 2.0);
    EXPECT_LT(c, previous);
    previous = c;
  }
  EXPECT_LE(DeMoivreRatioCertificate(10000, 0.5, 2.0), 0.1);
  EXPECT_LE(DeMoivreRatioCertificate(1000000, 0.5, 2.0), 0.01);
  EXPECT_TRUE(std::isfinite(DeMoivreRatioCertificate(10, 0.5, 1.0)));
  EXPECT_NEAR(NormalPdf(0.0, 0.0, 1.0), 1.0 / std::sqrt(2.0 * M_PI), 1e-15);
}

// Product form of the ratio, evaluated without any pmf code.
double ShiftRatioOracle(std::int64_t t, std::int64_t s, double q,
                        std::int64_t z) {
  double log_r = s * std::log(q);
  for (std::int64_t k = 0; k < s; ++k) {
    log_r += std::log(static_cast<double>(t - k)) - std::log(static_cast<double>(z - k));
  }
  return std::exp(log_r);
}

TEST(PmfTest, ShiftRatioMeasuredMatchesProductForm) {
  for (std::int64_t t : {100, 400, 10000}) {
    const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(t)));
    for (std::int64_t s : {root / 2, root}) {
      for (double q : {0.2, 0.5, 0.8}) {
        const ShiftRatioCheck c = ShiftRatioBoundCheck(t, s, q, 1.0);
        double want = 1e300;
        for (std::int64_t z = std::max(c.z_low, s); z <= c.z_high; ++z) {
          want = std::min(want, ShiftRatioOracle(t, s, q, z));
        }
        EXPECT_NEAR(c.measured, want, 1e-9 * want);
        // The exponential form always holds.
        EXPECT_TRUE(c.HoldsExponential());
      }
    }
  }
  const ShiftRatioCheck zero = ShiftRatioBoundCheck(400, 0, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(zero.measured, 1.0);
  EXPECT_TRUE(zero.Holds());
}

TEST(PmfTest, ExtremizerTwoCoordinates) {
  for (double q : {0.3, 0.5}) {
    for (std::int64_t z = 0; z <= 2; ++z) {
      const ExtremizerResult r = ExtremizerOracle(2, q, 0.2, z, 9);
      for (const auto& v : r.minimizers) {
        const bool pair = std::abs(std::abs(v[0]) - 0.2) < 1e-12 &&
                          std::abs(v[0] + v[1]) < 1e-12;
        const bool zero = std::abs(v[0]) < 1e-12 && std::abs(v[1]) < 1e-12;
        EXPECT_TRUE(pair || zero);
      }
    }
  }
  const ExtremizerResult flat = ExtremizerOracle(4, 0.5, 0.0, 2, 9);
  ASSERT_EQ(flat.minimizers.size(), 1u);
  for (double x : flat.minimizers[0]) EXPECT_EQ(x, 0.0);
  const ExtremizerResult r = ExtremizerOracle(4, 0.5, 0.2, 2, 9);
  EXPECT_TRUE(r.three_point_structure);
  EXPECT_THROW(ExtremizerOracle(9, 0.5, 0.1, 2, 9), std::invalid_argument);
  EXPECT_THROW(ExtremizerOracle(3, 0.5, 0.1, 2, 8), std::invalid_argument);
}

// The minimum found by the oracle is no larger than any three-point vector.
TEST(PmfTest, ExtremizerMinimumBelowThreePointCandidates) {
  for (double q : {0.3, 0.5}) {
    for (int t = 2; t <= 5; ++t) {
      const auto scan = ExtremizerScan(t, q, 0.2, 9);
      for (int n = 0; 2 * n <= t; ++n) {
        const Pmf three = MixtureBinomialPmf(2 * n, t, q, 0.2);
        for (int z = 0; z <= t; ++z) {
          EXPECT_LE(scan[static_cast<std::size_t>(z)].min_mass,
                    three(z) + 1e-12);
        }
      }
    }
  }
}

}  // namespace
}  // namespace noregret
