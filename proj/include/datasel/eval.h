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

// Estimators built from a labelled subset, and the sweep harness relating
// selection objectives to downstream error.

#ifndef DATASEL_EVAL_H_
#define DATASEL_EVAL_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "datasel/dataset.h"
#include "datasel/kernel.h"
#include "datasel/select.h"

namespace datasel {

// Every point copies the row of its nearest selected point. `p_at_selected`
// has one row per selected point, in mask order.
ConditionalDistribution NeighborsEstimate(
    const Eigen::MatrixXd& features, const SelectionMask& mask,
    const ConditionalDistribution& p_at_selected);

struct KnnResult {
  std::vector<int> predictions;
  ConditionalDistribution posterior;  // vote fractions
};

// k nearest selected neighbours vote with the full-length label vector
// (only entries at selected points are read). Distance ties go to the lower
// index, vote ties to the lower class id.
KnnResult KnnClassify(const Eigen::MatrixXd& features, const SelectionMask& mask,
                      const std::vector<int>& labels, int class_count, int k);

struct RatioPoint {
  int m = 0;
  double facility_value = 0.0;
  double delta_tv = 0.0;
  double ratio = 0.0;  // delta_tv / facility_value, 0 when both vanish
};

// Facility-location selections of every size in `sizes` (as prefixes of one
// greedy run), neighbours estimate from the exact posterior at S, and the
// conditional total variation against that posterior.
std::vector<RatioPoint> LipschitzRatioCheck(const Eigen::MatrixXd& features,
                                           const ConditionalDistribution& truth,
                                           const std::vector<int>& sizes);

// Spearman rank correlation with average ranks for ties. Throws on length
// mismatch, fewer than three points, or a constant input.
double Spearman(const std::vector<double>& xs, const std::vector<double>& ys);

struct StrategyOptions {
  double ridge = 0.0;
  double ted_gamma = 1.0;
  double ted_c = 1.0;
  int max_iter = 100;
  double tol = 1e-6;
  int knn_k = 5;
  std::uint64_t seed = 0;
  // Per-point weights for the weighted facility location; unit if absent.
  std::optional<Eigen::VectorXd> weights;
};

// Uncertainty ranking as a one-shot protocol: a seeded random batch of
// ceil(m/2) points is labelled first, a k-NN posterior is fitted on it, and
// the remaining picks are the most uncertain of the other points.
SelectionResult SelectUncertaintyOneShot(const Dataset& dataset, int m,
                                         const StrategyOptions& options);

// Dispatches on a strategy id. `k` is needed by the kernel strategies.
SelectionResult RunStrategy(const std::string& strategy_id,
                            const Dataset& dataset, const GramMatrix& k, int m,
                            const StrategyOptions& options);

bool IsKnownStrategy(const std::string& strategy_id);
// Nested strategies yield smaller selections as prefixes of larger ones.
bool IsNestedStrategy(const std::string& strategy_id);

// round(fraction * N); throws when the result is 0 or fraction is outside
// (0, 1].
int SelectionSizeForFraction(double fraction, int n);

struct SweepRecord {
  std::string strategy_id;
  double fraction = 0.0;
  int m = 0;
  double ted_half_trace = 0.0;
  double facility_value = 0.0;
  double error_rate = 0.0;
  bool empty_unlabelled = false;  // error_rate is 0 by convention
  std::optional<double> delta_tv;
  std::optional<double> bound_total;
};

struct SweepOptions {
  std::vector<std::string> strategies;
  std::vector<double> fractions;
  StrategyOptions strategy;
  double spectral_tol = kDefaultSpectralTolerance;
};

// Records ordered by strategy (as given) then fraction (as given). With a
// ground-truth posterior, delta_tv compares the clamped projection estimate
// built from the observed labels at S, and bound_total is the full bound.
std::vector<SweepRecord> RunSweep(
    const Dataset& dataset, const KernelSpec& kernel,
    const SweepOptions& options,
    const std::optional<ConditionalDistribution>& truth = std::nullopt);

// Mixed selections: for each fraction and ratio r, round(r * m) points
// come from the front of the base strategy's order and the rest are drawn at
// random from the remaining points. Records carry strategy_id "base@r".
std::vector<SweepRecord> RunMixedSweep(
    const Dataset& dataset, const KernelSpec& kernel,
    const std::string& base_strategy, const std::vector<double>& ratios,
    const SweepOptions& options,
    const std::optional<ConditionalDistribution>& truth = std::nullopt);

// Fills a SweepRecord for one selection.
SweepRecord EvaluateSelection(const Dataset& dataset, const GramMatrix& k,
                              const std::vector<int>& order,
                              const std::string& strategy_id, double fraction,
                              int knn_k,
                              const std::optional<ConditionalDistribution>& truth,
                              const SpectralModel* spectrum);

}  // namespace datasel

#endif  // DATASEL_EVAL_H_
