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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "datasel/approx.h"
#include "datasel/cli.h"
#include "datasel/dataset.h"
#include "datasel/eval.h"
#include "datasel/format.h"
#include "datasel/kernel.h"
#include "datasel/select.h"
#include "test_util.h"

namespace datasel {
namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double Seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

struct Instance {
  GramMatrix k;
  SelectionMask mask;
  std::string family;
};

// Random instance with N <= max_n and 1 <= M < N. Feature dimension is large
// enough that K_SS is nonsingular, so the LU oracle below is meaningful.
Instance RandomInstance(std::mt19937_64& rng, int index, int max_n) {
  const KernelSpec spec = testing::KernelForIndex(index, rng);
  const int n = testing::UniformInt(rng, 2, max_n);
  const int m = testing::UniformInt(rng, 1, n - 1);
  const int d = spec.family == KernelFamily::kRbf
                    ? 3
                    : testing::DimensionFor(spec, n);
  const Eigen::MatrixXd x = testing::RandomPoints(rng, n, d, 1.0);
  return {Gram(spec, x), testing::RandomMask(rng, n, m),
          KernelFamilyName(spec.family)};
}

// Schur complement K/K_SS through an explicit LU inverse.
Eigen::MatrixXd SchurOracle(const Eigen::MatrixXd& k, const SelectionMask& mask) {
  const IndexSplit split = SplitIndices(mask, static_cast<int>(k.rows()));
  const Eigen::MatrixXd k_ss = Submatrix(k, split.train, split.train);
  const Eigen::MatrixXd k_su = Submatrix(k, split.train, split.unlabelled);
  const Eigen::MatrixXd k_uu = Submatrix(k, split.unlabelled, split.unlabelled);
  return k_uu - k_su.transpose() * k_ss.fullPivLu().inverse() * k_su;
}

Verdict Criterion1() {
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Instance in = RandomInstance(rng, i, 60);
    const double n = static_cast<double>(in.k.size());
    const PowerProfile profile = ComputePowerProfile(in.k, in.mask);
    const double lhs = profile.values.sum() / n;
    const Eigen::MatrixXd schur = SchurOracle(in.k.values, in.mask);
    const double rhs = schur.diagonal().cwiseMax(0.0).cwiseSqrt().sum() / n;
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  const double secs = Seconds(start);
  return {worst <= 1e-8 && secs < 30.0,
          "max |lhs - rhs| = " + Num(worst) + ", " + Num(secs) + " s"};
}

Verdict Criterion2() {
  std::mt19937_64 rng(101);  // the same instances as criterion 1
  double worst_identity = 0.0;
  double worst_continuity = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Instance in = RandomInstance(rng, i, 60);
    const PowerProfile profile = ComputePowerProfile(in.k, in.mask);
    const double ted0 = TedObjective(in.k, in.mask, 0.0);
    worst_identity =
        std::max(worst_identity, std::abs(ted0 - profile.values.squaredNorm()));
    worst_continuity = std::max(
        worst_continuity, std::abs(TedObjective(in.k, in.mask, 1e-10) - ted0));
  }
  return {worst_identity <= 1e-8 && worst_continuity <= 1e-6,
          "identity " + Num(worst_identity) + ", ridge continuity " +
              Num(worst_continuity)};
}

Verdict Criterion3() {
  std::mt19937_64 rng(103);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 100; ++i) {
    const int n = testing::UniformInt(rng, 2, 50);
    const int m = testing::UniformInt(rng, 1, n - 1);
    const int c = testing::UniformInt(rng, 2, 4);
    const GramMatrix k =
        Gram(KernelSpec::Rbf(testing::UniformReal(rng, 0.2, 2.0)),
             testing::RandomPoints(rng, n, 2, 1.5));
    const SelectionMask mask = testing::RandomMask(rng, n, m);
    const ConditionalDistribution p(testing::RandomSimplexRows(rng, n, c));
    const SpectralModel spectrum = ComputeSpectralModel(k);
    for (int cls = 0; cls < c; ++cls) {
      worst = std::max(worst,
                       PointwiseProjectionBoundCheck(k, mask, spectrum, p, cls));
    }
  }
  return {worst <= 1e-8, "max violation " + Num(worst)};
}

Verdict Criterion4() {
  std::mt19937_64 rng(107);
  double worst = 0.0;
  long masks = 0;
  for (int r = 1; r <= 3; ++r) {
    for (int n : {r + 1, 8, 12}) {
      const Eigen::MatrixXd x =
          testing::RandomPoints(rng, n, r) * testing::RandomPoints(rng, r, 5);
      const GramMatrix k = Gram(KernelSpec::Linear(), x);
      for (int bits = 1; bits < (1 << n); ++bits) {
        std::vector<int> s;
        for (int i = 0; i < n; ++i) {
          if (bits & (1 << i)) s.push_back(i);
        }
        if (static_cast<int>(s.size()) < r) continue;
        worst = std::max(worst, TedObjective(k, SelectionMask(s), 0.0));
        ++masks;
      }
    }
  }
  return {worst <= 1e-8,
          std::to_string(masks) + " masks, max TED " + Num(worst)};
}

Verdict Criterion5() {
  std::mt19937_64 rng(109);
  int mismatched = 0;
  for (int i = 0; i < 50; ++i) {
    const KernelSpec spec = testing::KernelForIndex(i, rng);
    const int n = testing::UniformInt(rng, 3, 40);
    const int m = testing::UniformInt(rng, 1, n);
    const int d =
        spec.family == KernelFamily::kRbf ? 2 : testing::DimensionFor(spec, n);
    const Eigen::MatrixXd x = testing::RandomPoints(rng, n, d, 1.5);
    const std::vector<int> base = SelectTedGreedy(Gram(spec, x), m).order;
    for (double c : {0.1, 10.0}) {
      mismatched += SelectTedGreedy(Gram(Rescale(spec, c), x), m).order != base;
    }
  }

  double worst_beta = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int n = testing::UniformInt(rng, 2, 30);
    const Eigen::MatrixXd k =
        Gram(KernelSpec::Rbf(testing::UniformReal(rng, 0.3, 2.0)),
             testing::RandomPoints(rng, n, 2, 1.5))
            .values;
    const double gamma = testing::UniformReal(rng, 0.1, 2.0);
    for (double c : {0.5, 3.0}) {
      SequentialTed plain(k, gamma, 1.0);
      SequentialTed scaled(c * k, gamma, c);
      for (int it = 0; it < 30; ++it) {
        plain.Step();
        scaled.Step();
        worst_beta = std::max(
            worst_beta, (plain.beta() - scaled.beta()).cwiseAbs().maxCoeff());
      }
    }
  }
  return {mismatched == 0 && worst_beta <= 1e-10,
          std::to_string(mismatched) + " greedy order mismatches, max beta diff " +
              Num(worst_beta)};
}

Verdict Criterion6() {
  std::mt19937_64 rng(113);
  int instances = 0;
  int wrong = 0;
  for (int n = 2; n <= 10; ++n) {
    for (int rep = 0; rep < 30; ++rep) {
      const KernelSpec spec = testing::KernelForIndex(rep, rng);
      const int m = testing::UniformInt(rng, 1, std::min(3, n));
      const int d =
          spec.family == KernelFamily::kRbf ? 2 : testing::DimensionFor(spec, n);
      const GramMatrix k = Gram(spec, testing::RandomPoints(rng, n, d, 1.5));
      const SelectionResult r = SelectTedGreedy(k, m);
      // Exhaustive argmin; values within rounding of the minimum are ties
      // and resolve to the lowest index.
      std::vector<double> values(n);
      for (int j = 0; j < n; ++j) values[j] = TedObjective(k, SelectionMask({j}));
      const double best = *std::min_element(values.begin(), values.end());
      const double slack = 1e-12 * k.values.trace();
      int argmin = 0;
      while (values[argmin] > best + slack) ++argmin;
      wrong += r.order[0] != argmin;
      ++instances;
    }
  }

  Eigen::MatrixXd line(4, 1);
  line << 0, 1, 2, 3;
  const SelectionResult fl = SelectFacilityLocation(line, 2);
  const std::vector<int> picked = SelectionMask(fl.order).indices();
  double optimum = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      optimum = std::min(optimum, FacilityLocationValue(line, SelectionMask({a, b})));
    }
  }
  const double z = FacilityLocationValue(line, SelectionMask(picked));
  const bool fl_set = picked == std::vector<int>({1, 3});
  const bool fl_value = z == 0.5 && z == optimum;
  return {wrong == 0 && fl_set && fl_value,
          std::to_string(wrong) + "/" + std::to_string(instances) +
              " first-pick mismatches; line instance picked {" +
              std::to_string(picked[0]) + "," + std::to_string(picked[1]) +
              "} with Z = " + Num(z) + " (exhaustive optimum " + Num(optimum) +
              ", expected set {1,3})"};
}

Verdict Criterion7() {
  const auto start = Clock::now();
  const double slope = 4.0;
  const SyntheticData data = MakeLogistic1d(7, 2000, slope, -1.0, 1.0);
  const std::vector<RatioPoint> points = LipschitzRatioCheck(
      data.dataset.features(), data.posterior, {4, 8, 16, 32, 64});
  const double cap =
      LogisticLipschitz(slope) * data.posterior.classes() / 2.0 * 1.1;
  bool z_decreasing = true;
  bool ratio_nonincreasing = true;
  std::string ratios;
  for (size_t i = 0; i < points.size(); ++i) {
    ratios += (i ? "," : "") + Num(points[i].ratio);
    if (i > 0) z_decreasing &= points[i].facility_value < points[i - 1].facility_value;
    if (i > 1) ratio_nonincreasing &= points[i].ratio <= points[i - 1].ratio;
  }
  const double secs = Seconds(start);
  const bool terminal = points.back().ratio <= cap;
  return {terminal && ratio_nonincreasing && z_decreasing && secs < 60.0,
          "ratios [" + ratios + "], cap " + Num(cap) +
              (ratio_nonincreasing ? "" : ", not nonincreasing after the first") +
              (z_decreasing ? "" : ", Z not decreasing") + ", " + Num(secs) +
              " s"};
}

Verdict Criterion8() {
  int masks = 0;
  double worst = -std::numeric_limits<double>::infinity();
  struct Setup {
    MixtureLayout layout;
    int per_class;
    double sigma;
    double gamma;
  };
  const std::vector<Setup> setups = {
      {GridLayout(2, 1, 2, 2.0), 100, 1.0, 0.5},
      {GridLayout(3, 1, 2, 3.0), 80, 1.0, 1.0},
      {GridLayout(2, 4, 2, 2.0), 150, 0.5, 2.0},
      {GridLayout(2, 8, 2, 2.0), 250, 0.5, 2.0},
  };
  std::uint64_t seed = 11;
  for (const Setup& s : setups) {
    const SyntheticData data =
        MakeGaussianMixture(seed++, s.per_class, s.layout, s.sigma);
    const Dataset& ds = data.dataset;
    const int n = ds.size();
    const GramMatrix k = Gram(KernelSpec::Rbf(s.gamma), ds.features());
    const SpectralModel spectrum = ComputeSpectralModel(k);
    const SelectionResult greedy = SelectTedGreedy(k, n / 2);
    for (int m = (n + 9) / 10; m <= n / 2; m += std::max(1, n / 20)) {
      const SweepRecord r = EvaluateSelection(
          ds, k, std::vector<int>(greedy.order.begin(), greedy.order.begin() + m),
          kStrategyTedGreedy, static_cast<double>(m) / n, 5, data.posterior,
          &spectrum);
      worst = std::max(worst, *r.delta_tv - *r.bound_total);
      ++masks;
    }
  }
  return {worst <= 1e-6, std::to_string(masks) +
                             " masks, max (delta_tv - bound) = " + Num(worst)};
}

Verdict Criterion9() {
  const double sigma = 0.5;
  const SyntheticData data =
      MakeGaussianMixture(9, 750, GridLayout(2, 8, 2, 2.0), sigma);
  SweepOptions options;
  for (int i = 1; i <= 10; ++i) options.fractions.push_back(i / 20.0);
  options.strategy.seed = 9;
  options.strategy.knn_k = 5;
  const std::vector<SweepRecord> records = RunMixedSweep(
      data.dataset, KernelSpec::Rbf(1.0 / (2.0 * sigma * sigma)),
      kStrategyTedGreedy, {0.0, 0.25, 0.5, 0.75, 1.0}, options);
  std::vector<double> trace, error;
  for (const SweepRecord& r : records) {
    trace.push_back(r.ted_half_trace);
    error.push_back(r.error_rate);
  }
  const double rho = Spearman(trace, error);
  return {rho >= 0.6 && records.size() >= 20,
          "N = " + std::to_string(data.dataset.size()) + ", " +
              std::to_string(records.size()) + " sweep points, Spearman " +
              Num(rho)};
}

Verdict Criterion10() {
  const std::string root =
      (std::filesystem::temp_directory_path() / "datasel_acceptance_det").string();
  std::filesystem::remove_all(root);
  const std::string csv = root + "/data.csv";
  std::filesystem::create_directories(root);
  WriteCsv(MakeGaussianMixture(3, 30, GridLayout(2, 2, 2, 2.0), 0.5).dataset,
           csv);

  const std::vector<std::string> data = {"--data", csv, "--label-col", "label"};
  std::vector<std::vector<std::string>> commands;
  for (const char* id :
       {kStrategyRandom, kStrategyFacilityLocation,
        kStrategyFacilityLocationWeighted, kStrategyTedGreedy,
        kStrategyTedSequential, kStrategyInverseDiagonal, kStrategyUncertainty}) {
    commands.push_back({"select", "--strategy", id, "--m", "12", "--seed", "5"});
  }
  commands.push_back({"diagnose", "--selection", root + "/sel.txt"});
  commands.push_back({"sweep", "--fraction", "0.1,0.3,0.5", "--mix-ratios",
                      "0,0.5,1"});
  commands.push_back({"gram", "--kernel", "poly", "--degree", "3"});
  WriteFileAtomic(root + "/sel.txt", "0\n5\n17\n33\n");

  int differing = 0;
  int files = 0;
  std::string failures;
  for (size_t c = 0; c < commands.size(); ++c) {
    std::vector<std::string> outputs[2];
    for (int run = 0; run < 2; ++run) {
      const std::string out =
          root + "/cmd" + std::to_string(c) + "_run" + std::to_string(run);
      std::vector<std::string> args = commands[c];
      args.insert(args.end(), data.begin(), data.end());
      args.push_back("--out");
      args.push_back(out);
      std::ostringstream sink, err;
      if (cli::Main(args, sink, err) != cli::kExitOk) {
        failures += " [" + commands[c][0] + ": " + err.str() + "]";
      }
      for (const auto& entry : std::filesystem::directory_iterator(out)) {
        outputs[run].push_back(entry.path().filename().string() + "\n" +
                               ReadFile(entry.path().string()));
      }
      std::sort(outputs[run].begin(), outputs[run].end());
    }
    files += static_cast<int>(outputs[0].size());
    differing += outputs[0] != outputs[1];
  }
  return {differing == 0 && failures.empty() && files > 0,
          std::to_string(commands.size()) + " commands, " +
              std::to_string(files) + " files, " + std::to_string(differing) +
              " differing" + failures};
}

}  // namespace
}  // namespace datasel

int main() {
  const std::vector<std::function<datasel::Verdict()>> criteria = {
      datasel::Criterion1, datasel::Criterion2, datasel::Criterion3,
      datasel::Criterion4, datasel::Criterion5, datasel::Criterion6,
      datasel::Criterion7, datasel::Criterion8, datasel::Criterion9,
      datasel::Criterion10};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    datasel::Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %zu: %s (%s)\n", i + 1, v.pass ? "PASS" : "FAIL",
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
