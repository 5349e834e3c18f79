// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "datasel/approx.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "datasel/error.h"
#include "test_util.h"

namespace datasel {
namespace {

Eigen::MatrixXd Column(std::initializer_list<double> values) {
  Eigen::MatrixXd x(values.size(), 1);
  int i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

// Oracle: k(x,x) - K_xS K_SS^{-1} K_Sx with an LU inverse, unclamped.
Eigen::VectorXd PowerSquaredOracle(const Eigen::MatrixXd& k,
                                   const std::vector<int>& s) {
  const int n = static_cast<int>(k.rows());
  Eigen::MatrixXd k_ss(s.size(), s.size());
  Eigen::MatrixXd k_sx(s.size(), n);
  for (size_t i = 0; i < s.size(); ++i) {
    for (size_t j = 0; j < s.size(); ++j) k_ss(i, j) = k(s[i], s[j]);
    for (int x = 0; x < n; ++x) k_sx(i, x) = k(s[i], x);
  }
  const Eigen::MatrixXd inv = k_ss.fullPivLu().inverse();
  Eigen::VectorXd out(n);
  for (int x = 0; x < n; ++x) {
    out(x) = k(x, x) - k_sx.col(x).dot(inv * k_sx.col(x));
  }
  return out;
}

struct Instance {
  GramMatrix k;
  SelectionMask mask;
};

// Random rbf instance, well conditioned for the LU oracle.
Instance RandomRbf(std::mt19937_64& rng, int max_n) {
  const int n = testing::UniformInt(rng, 2, max_n);
  const int m = testing::UniformInt(rng, 1, n - 1);
  const Eigen::MatrixXd x = testing::RandomPoints(rng, n, 2, 2.0);
  return {Gram(KernelSpec::Rbf(testing::UniformReal(rng, 0.3, 1.5)), x),
          testing::RandomMask(rng, n, m)};
}

TEST(PowerProfileTest, TwoPointRbf) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  const PowerProfile p = ComputePowerProfile(k, SelectionMask({0}));
  EXPECT_EQ(p.values(0), 0.0);
  // Closed form for a single selected point: sqrt(k(x,x) - k(x,s)^2 / k(s,s)).
  EXPECT_NEAR(p.values(1), std::sqrt(1.0 - std::exp(-1.0) * std::exp(-1.0)),
              1e-15);
  EXPECT_EQ(p.clamped_count, 0);
}

TEST(PowerProfileTest, RankOneLinearIsZero) {
  const GramMatrix k = Gram(KernelSpec::Linear(), Column({2, 3}));
  const PowerProfile p = ComputePowerProfile(k, SelectionMask({0}));
  EXPECT_LE(p.values(1), 1e-7);
  EXPECT_EQ(p.values(0), 0.0);
}

TEST(PowerProfileTest, EmptySelectionRejected) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  EXPECT_THROW(ComputePowerProfile(k, SelectionMask()), InvalidArgument);
  EXPECT_THROW(TedObjective(k, SelectionMask()), InvalidArgument);
  EXPECT_THROW(ComputePowerProfile(k, SelectionMask({2})), InvalidArgument);
}

TEST(PowerProfileTest, MatchesLuOracleAndVanishesOnS) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = RandomRbf(rng, 25);
    const PowerProfile p = ComputePowerProfile(in.k, in.mask);
    const Eigen::VectorXd oracle = PowerSquaredOracle(in.k.values, in.mask.indices());
    const std::vector<bool> member = in.mask.Membership(in.k.size());
    for (int x = 0; x < in.k.size(); ++x) {
      EXPECT_GE(p.values(x), 0.0);
      if (member[x]) {
        EXPECT_EQ(p.values(x), 0.0);
      } else {
        EXPECT_NEAR(p.values(x) * p.values(x), std::max(oracle(x), 0.0), 1e-8);
      }
    }
  }
}

TEST(PowerProfileTest, AddingAPointNeverIncreasesPower) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = testing::UniformInt(rng, 3, 25);
    const Eigen::MatrixXd x = testing::RandomPoints(rng, n, 2, 2.0);
    const GramMatrix k = Gram(KernelSpec::Rbf(1.0), x);
    std::vector<int> s = testing::RandomMask(rng, n, testing::UniformInt(rng, 1, n - 2)).indices();
    const Eigen::VectorXd before = PowerSquaredOracle(k.values, s);
    const IndexSplit split = SplitIndices(SelectionMask(s), n);
    s.push_back(split.unlabelled[testing::UniformInt(
        rng, 0, static_cast<int>(split.unlabelled.size()) - 1)]);
    const Eigen::VectorXd after = PowerSquaredOracle(k.values, s);
    for (int i = 0; i < n; ++i) EXPECT_LE(after(i), before(i) + 1e-8);
    const PowerProfile pb = ComputePowerProfile(k, SelectionMask(split.train));
    const PowerProfile pa = ComputePowerProfile(k, SelectionMask(s));
    for (int i = 0; i < n; ++i) EXPECT_LE(pa.values(i), pb.values(i) + 1e-8);
  }
}

TEST(TedObjectiveTest, Examples) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  EXPECT_NEAR(TedObjective(k, SelectionMask({0})), 1.0 - std::exp(-2.0), 1e-15);
  EXPECT_NEAR(TedObjective(k, SelectionMask({0})), 0.864665, 1e-6);
  EXPECT_EQ(TedObjective(k, SelectionMask::All(2)), 0.0);
  EXPECT_THROW(TedObjective(k, SelectionMask({0}), -1.0), InvalidArgument);
}

TEST(TedObjectiveTest, RidgeReadingAgainstExplicitFormula) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = RandomRbf(rng, 20);
    const double ridge = testing::UniformReal(rng, 0.0, 1.0);
    const IndexSplit split = SplitIndices(in.mask, in.k.size());
    const Eigen::MatrixXd k_ss = Submatrix(in.k.values, split.train, split.train);
    const Eigen::MatrixXd k_su =
        Submatrix(in.k.values, split.train, split.unlabelled);
    const Eigen::MatrixXd k_uu =
        Submatrix(in.k.values, split.unlabelled, split.unlabelled);
    const Eigen::MatrixXd reg =
        k_ss + ridge * Eigen::MatrixXd::Identity(k_ss.rows(), k_ss.cols());
    const double oracle =
        (k_uu - k_su.transpose() * reg.fullPivLu().inverse() * k_su).trace();
    EXPECT_NEAR(TedObjective(in.k, in.mask, ridge), oracle, 1e-8);
  }
}

TEST(TedObjectiveTest, EqualsSumOfSquaredPowerAndSchurTrace) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = RandomRbf(rng, 30);
    const PowerProfile p = ComputePowerProfile(in.k, in.mask);
    const double ted = TedObjective(in.k, in.mask, 0.0);
    EXPECT_NEAR(ted, p.values.squaredNorm(), 1e-8);
    EXPECT_NEAR(ted, SchurComplement(in.k, in.mask).trace(), 1e-8);
  }
}

TEST(TedObjectiveTest, RankDeficientLinearKernelIsZero) {
  std::mt19937_64 rng(47);
  for (int r = 1; r <= 3; ++r) {
    const int n = 8;
    const Eigen::MatrixXd x =
        testing::RandomPoints(rng, n, r) * testing::RandomPoints(rng, r, 4);
    const GramMatrix k = Gram(KernelSpec::Linear(), x);
    for (int bits = 1; bits < (1 << n); ++bits) {
      std::vector<int> s;
      for (int i = 0; i < n; ++i) {
        if (bits & (1 << i)) s.push_back(i);
      }
      if (static_cast<int>(s.size()) < r) continue;
      EXPECT_LE(TedObjective(k, SelectionMask(s), 0.0), 1e-8);
    }
  }
}

TEST(TedHalfTest, ExamplesAndCrossTerms) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  EXPECT_NEAR(TedHalf(k, SelectionMask({0})), std::sqrt(1.0 - std::exp(-2.0)),
              1e-15);
  EXPECT_EQ(TedHalf(k, SelectionMask::All(2)), 0.0);

  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = RandomRbf(rng, 30);
    const PowerProfile p = ComputePowerProfile(in.k, in.mask);
    const double half = TedHalf(in.k, in.mask);
    EXPECT_NEAR(half, p.values.sum(), 1e-10);
    const double ted = TedObjective(in.k, in.mask);
    int nonzero = 0;
    for (int i = 0; i < p.values.size(); ++i) nonzero += p.values(i) > 1e-6;
    if (nonzero <= 1) {
      EXPECT_NEAR(half * half, ted, 1e-8);
    } else {
      EXPECT_GT(half * half, ted + 1e-12);
    }
  }
}

TEST(TedHalfTest, SingleUnlabelledPointHasNoCrossTerm) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = testing::UniformInt(rng, 2, 12);
    const GramMatrix k = Gram(KernelSpec::Rbf(1.0), testing::RandomPoints(rng, n, 2));
    const SelectionMask mask = testing::RandomMask(rng, n, n - 1);
    const double half = TedHalf(k, mask);
    EXPECT_NEAR(half * half, TedObjective(k, mask), 1e-10);
  }
}

TEST(ScaleTest, HomogeneityAndExhaustiveArgminInvariance) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = testing::UniformInt(rng, 4, 10);
    const int m = testing::UniformInt(rng, 1, 3);
    const Eigen::MatrixXd x = testing::RandomPoints(rng, n, 2);
    const KernelSpec base = KernelSpec::Rbf(1.0);
    std::vector<int> best_mask_bits;
    for (double c : {0.1, 1.0, 10.0}) {
      const GramMatrix k1 = Gram(base, x);
      const GramMatrix kc = Gram(Rescale(base, c), x);
      int best_bits = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int bits = 1; bits < (1 << n); ++bits) {
        if (__builtin_popcount(bits) != m) continue;
        std::vector<int> s;
        for (int i = 0; i < n; ++i) {
          if (bits & (1 << i)) s.push_back(i);
        }
        const SelectionMask mask(s);
        const double ted_c = TedObjective(kc, mask);
        EXPECT_NEAR(ted_c, c * TedObjective(k1, mask), 1e-10 * c * n);
        EXPECT_NEAR(TedHalf(kc, mask), std::sqrt(c) * TedHalf(k1, mask),
                    1e-8 * std::sqrt(c) * n);
        if (ted_c < best) {
          best = ted_c;
          best_bits = bits;
        }
      }
      best_mask_bits.push_back(best_bits);
    }
    EXPECT_EQ(best_mask_bits[0], best_mask_bits[1]);
    EXPECT_EQ(best_mask_bits[1], best_mask_bits[2]);
  }
}

TEST(ProjectionEstimateTest, Examples) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  const SelectionMask mask({0});
  const std::vector<int> labels = {0, 1};
  const Eigen::MatrixXd est =
      ProjectionEstimate(k, mask, SelectedOneHot(mask, labels, 2));
  EXPECT_EQ(est(0, 0), 1.0);
  EXPECT_EQ(est(0, 1), 0.0);
  EXPECT_NEAR(est(1, 0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(est(1, 0), 0.367879, 1e-6);
  EXPECT_EQ(est(1, 1), 0.0);

  GramMatrix identity;
  identity.values = Eigen::MatrixXd::Identity(4, 4);
  const SelectionMask two({1, 3});
  const std::vector<int> labels4 = {0, 1, 0, 0};
  const Eigen::MatrixXd zero_rows =
      ProjectionEstimate(identity, two, SelectedOneHot(two, labels4, 2));
  EXPECT_EQ(zero_rows.row(0).norm(), 0.0);
  EXPECT_EQ(zero_rows.row(2).norm(), 0.0);
  EXPECT_EQ(zero_rows(1, 1), 1.0);
  EXPECT_EQ(zero_rows(3, 0), 1.0);
}

TEST(ProjectionEstimateTest, InterpolatesAtNodesAndMatchesOracle) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    const Instance in = RandomRbf(rng, 25);
    const int n = static_cast<int>(in.k.size());
    std::vector<int> labels(n);
    for (int& l : labels) l = testing::UniformInt(rng, 0, 2);
    const Eigen::MatrixXd y = SelectedOneHot(in.mask, labels, 3);
    const Eigen::MatrixXd est = ProjectionEstimate(in.k, in.mask, y);
    const std::vector<int>& s = in.mask.indices();
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const Eigen::MatrixXd oracle =
        Submatrix(in.k.values, all, s) *
        Submatrix(in.k.values, s, s).fullPivLu().inverse() * y;
    EXPECT_LE((est - oracle).cwiseAbs().maxCoeff(), 1e-7);
    for (int l = 0; l < in.mask.size(); ++l) {
      EXPECT_EQ(est.row(s[l]), y.row(l));
    }
  }
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  EXPECT_THROW(ProjectionEstimate(k, SelectionMask({0}), Eigen::MatrixXd(2, 2)),
               InvalidArgument);
}

TEST(EpsHTest, FormulaArithmetic) {
  EXPECT_NEAR(EpsHFromCoefficients(Eigen::VectorXd::Constant(1, 0.5),
                                   Eigen::VectorXd::Constant(1, 0.6), 0.04),
              std::sqrt(0.08), 1e-15);
  EXPECT_NEAR(std::sqrt(0.08), 0.282843, 1e-6);
  EXPECT_THROW(EpsHFromCoefficients(Eigen::VectorXd::Zero(2),
                                    Eigen::VectorXd::Zero(1), 0.0),
               InvalidArgument);
}

TEST(EpsHTest, UnitEigenvaluesAndZeroClass) {
  const int n = 6;
  GramMatrix k;
  k.values = n * Eigen::MatrixXd::Identity(n, n);
  const SpectralModel s = ComputeSpectralModel(k);
  std::mt19937_64 rng(71);
  Eigen::MatrixXd probs = testing::RandomSimplexRows(rng, n, 3);
  probs.col(2).setZero();
  for (int i = 0; i < n; ++i) probs.row(i) /= probs.row(i).sum();
  const ConditionalDistribution p(probs);
  EXPECT_NEAR(EpsH(s, p, 0), 0.0, 1e-7);
  EXPECT_EQ(EpsH(s, p, 2), 0.0);
  EXPECT_THROW(EpsH(s, p, 3), InvalidArgument);
}

TEST(EpsHTest, NullMassMatchesDirectResidual) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = testing::UniformInt(rng, 3, 30);
    // Linear kernel in 2-D has rank 2, so most of p lies in the null space.
    const GramMatrix k = Gram(KernelSpec::Linear(), testing::RandomPoints(rng, n, 2));
    const SpectralModel s = ComputeSpectralModel(k, 1e-10);
    const ConditionalDistribution p(testing::RandomSimplexRows(rng, n, 2));
    const EpsHTerms terms = DecomposeEpsH(s, p, 1);
    const Eigen::VectorXd p_c = p.probs().col(1);
    // Second route: explicit residual of p_c after projecting onto span(phi).
    const Eigen::VectorXd residual = p_c - s.eigenfunctions * terms.coefficients;
    EXPECT_NEAR(terms.null_mass, residual.squaredNorm() / n, 1e-10);
    double sum = terms.null_mass;
    for (int i = 0; i < s.rank(); ++i) {
      sum += std::pow(terms.coefficients(i) * (1.0 - s.eigenvalues(i)), 2);
    }
    EXPECT_NEAR(terms.value, std::sqrt(sum), 1e-14);
  }
}

TEST(BoundReportTest, TwoPointInstance) {
  const GramMatrix k = Gram(KernelSpec::Rbf(1.0), Column({0, 1}));
  const SpectralModel s = ComputeSpectralModel(k);
  EXPECT_NEAR(s.Trace(), 1.0, 1e-15);
  Eigen::MatrixXd probs(2, 2);
  probs << 0.9, 0.1, 0.2, 0.8;
  const BoundReport r =
      ComputeBoundReport(k, SelectionMask({0}), s, ConditionalDistribution(probs));
  const double power = std::sqrt(1.0 - std::exp(-2.0));
  EXPECT_NEAR(r.ted_half, power, 1e-15);
  // first_term = ted_half / (2N) * sqrt(sum lambda), N = 2, sum lambda = 1.
  EXPECT_NEAR(r.first_term, power / 4.0, 1e-15);
  EXPECT_NEAR(r.total,
              r.first_term + 0.5 * (r.eps_h_per_class[0] + r.eps_h_per_class[1]),
              1e-15);
  // Full-rank kernel: every p is in the span, so the RKHS variant exists.
  ASSERT_TRUE(r.rkhs_variant.has_value());
  EXPECT_GE(*r.rkhs_variant, 0.0);
}

TEST(BoundReportTest, FullSelectionAndInvariants) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 40; ++trial) {
    const Instance in = RandomRbf(rng, 30);
    const int n = static_cast<int>(in.k.size());
    const SpectralModel s = ComputeSpectralModel(in.k);
    const ConditionalDistribution p(testing::RandomSimplexRows(rng, n, 3));
    const BoundReport all = ComputeBoundReport(in.k, SelectionMask::All(n), s, p);
    EXPECT_EQ(all.first_term, 0.0);
    double eps = 0.0;
    for (double e : all.eps_h_per_class) eps += e;
    EXPECT_NEAR(all.total, 0.5 * eps, 1e-15);

    const BoundReport r = ComputeBoundReport(in.k, in.mask, s, p);
    EXPECT_GE(r.total, r.first_term);
    EXPECT_GE(r.ted_half, 0.0);
    EXPECT_GE(r.trace_k, 0.0);
    for (double e : r.eps_h_per_class) EXPECT_GE(e, 0.0);
    EXPECT_NEAR(r.first_term, r.ted_half / (2.0 * n) * std::sqrt(r.trace_k), 1e-15);
  }
}

TEST(BoundReportTest, RkhsVariantAbsentWithNullMass) {
  std::mt19937_64 rng(83);
  const int n = 12;
  const GramMatrix k = Gram(KernelSpec::Linear(), testing::RandomPoints(rng, n, 2) +
                                                      Eigen::MatrixXd::Constant(n, 2, 3.0));
  const SpectralModel s = ComputeSpectralModel(k, 1e-10);
  const ConditionalDistribution p(testing::RandomSimplexRows(rng, n, 2));
  const BoundReport r = ComputeBoundReport(k, SelectionMask({0, 1, 2}), s, p);
  EXPECT_FALSE(r.rkhs_variant.has_value());
}

TEST(PointwiseCheckTest, HoldsOnRandomRbfInstances) {
  std::mt19937_64 rng(89);
  for (int trial = 0; trial < 60; ++trial) {
    const Instance in = RandomRbf(rng, 50);
    const int n = static_cast<int>(in.k.size());
    const SpectralModel s = ComputeSpectralModel(in.k);
    const ConditionalDistribution p(testing::RandomSimplexRows(rng, n, 3));
    for (int c = 0; c < 3; ++c) {
      EXPECT_LE(PointwiseProjectionBoundCheck(in.k, in.mask, s, p, c), 1e-8);
      EXPECT_LE(PointwiseProjectionBoundCheck(in.k, SelectionMask::All(n), s, p, c),
                1e-12);
    }
  }
}

}  // namespace
}  // namespace datasel
