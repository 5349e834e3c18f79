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

#include "datasel/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <utility>

#include "datasel/approx.h"
#include "datasel/error.h"

namespace datasel {

namespace {

Eigen::MatrixXd RowsAt(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
  Eigen::MatrixXd out(rows.size(), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

std::vector<double> AverageRanks(const std::vector<double>& v) {
  const size_t n = v.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[idx[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::string RatioLabel(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", ratio);
  return buf;
}

int MaxSize(const std::vector<double>& fractions, int n) {
  int m_max = 0;
  for (double f : fractions) m_max = std::max(m_max, SelectionSizeForFraction(f, n));
  return m_max;
}

}  // namespace

ConditionalDistribution NeighborsEstimate(
    const Eigen::MatrixXd& features, const SelectionMask& mask,
    const ConditionalDistribution& p_at_selected) {
  if (mask.empty()) {
    throw InvalidArgument("neighbors_estimate: empty selection");
  }
  if (p_at_selected.rows() != mask.size()) {
    throw InvalidArgument("neighbors_estimate: need one row per selected point");
  }
  const std::vector<int> nearest = NearestSelected(features, mask);
  Eigen::MatrixXd probs(features.rows(), p_at_selected.classes());
  for (size_t x = 0; x < nearest.size(); ++x) {
    probs.row(x) = p_at_selected.probs().row(nearest[x]);
  }
  return ConditionalDistribution(std::move(probs));
}

KnnResult KnnClassify(const Eigen::MatrixXd& features, const SelectionMask& mask,
                      const std::vector<int>& labels, int class_count, int k) {
  const int n = static_cast<int>(features.rows());
  if (mask.empty()) throw InvalidArgument("knn_classify: empty selection");
  mask.Validate(n);
  if (static_cast<int>(labels.size()) != n) {
    throw InvalidArgument("knn_classify: label vector length mismatch");
  }
  if (k < 1 || k > mask.size()) {
    throw InvalidArgument("knn_classify: k must lie in [1, M]");
  }
  if (class_count < 1) throw InvalidArgument("knn_classify: no classes");
  const std::vector<int>& sel = mask.indices();
  for (int s : sel) {
    if (labels[s] < 0 || labels[s] >= class_count) {
      throw InvalidArgument("knn_classify: label out of range");
    }
  }

  std::vector<int> predictions(n);
  Eigen::MatrixXd votes = Eigen::MatrixXd::Zero(n, class_count);
  std::vector<std::pair<double, int>> dist(sel.size());
  for (int x = 0; x < n; ++x) {
    for (size_t l = 0; l < sel.size(); ++l) {
      dist[l] = {(features.row(x) - features.row(sel[l])).squaredNorm(), sel[l]};
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (int t = 0; t < k; ++t) votes(x, labels[dist[t].second]) += 1.0;
    Eigen::Index best = 0;
    votes.row(x).maxCoeff(&best);  // first maximum, i.e. the lower class id
    predictions[x] = static_cast<int>(best);
  }
  votes /= static_cast<double>(k);
  return KnnResult{std::move(predictions), ConditionalDistribution(votes)};
}

std::vector<RatioPoint> LipschitzRatioCheck(const Eigen::MatrixXd& features,
                                           const ConditionalDistribution& truth,
                                           const std::vector<int>& sizes) {
  const int n = static_cast<int>(features.rows());
  if (truth.rows() != n) {
    throw InvalidArgument("lipschitz_ratio_check: posterior rows do not match");
  }
  if (sizes.empty()) throw InvalidArgument("lipschitz_ratio_check: no sizes");
  const int m_max = *std::max_element(sizes.begin(), sizes.end());
  const SelectionResult greedy = SelectFacilityLocation(features, m_max);

  std::vector<RatioPoint> points;
  for (int m : sizes) {
    CheckSelectionSize(n, m);
    const SelectionMask mask = greedy.Prefix(m);
    const ConditionalDistribution at_s(RowsAt(truth.probs(), mask.indices()));
    RatioPoint point;
    point.m = m;
    point.facility_value = FacilityLocationValue(features, mask);
    point.delta_tv = ConditionalTotalVariation(
        NeighborsEstimate(features, mask, at_s), truth);
    if (point.delta_tv > 0.0) {
      point.ratio = point.delta_tv / point.facility_value;
    }
    points.push_back(point);
  }
  return points;
}

double Spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) {
    throw InvalidArgument("spearman: length mismatch");
  }
  if (xs.size() < 3) throw InvalidArgument("spearman: need at least 3 points");
  const std::vector<double> rx = AverageRanks(xs);
  const std::vector<double> ry = AverageRanks(ys);
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw InvalidArgument("spearman: undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SelectionResult SelectUncertaintyOneShot(const Dataset& dataset, int m,
                                         const StrategyOptions& options) {
  const int n = dataset.size();
  CheckSelectionSize(n, m);
  if (!dataset.has_labels()) {
    throw InvalidArgument("uncertainty: labels are required");
  }
  const int batch = (m + 1) / 2;
  const SelectionResult seed_batch = SelectRandom(n, batch, options.seed);
  const SelectionMask seed_mask = seed_batch.Mask();
  const KnnResult knn =
      KnnClassify(dataset.features(), seed_mask, dataset.labels(),
                  dataset.class_count(), std::min(options.knn_k, batch));
  const Eigen::VectorXd score =
      (1.0 - knn.posterior.probs().rowwise().maxCoeff().array()).matrix();

  SelectionResult result;
  result.strategy_id = kStrategyUncertainty;
  result.seed = options.seed;
  result.order = seed_batch.order;
  result.objective_trajectory.assign(batch, 0.0);
  result.scores = std::vector<double>(score.data(), score.data() + n);
  if (m > batch) {
    const std::vector<int> rest = SplitIndices(seed_mask, n).unlabelled;
    const ConditionalDistribution rest_posterior(
        RowsAt(knn.posterior.probs(), rest));
    const SelectionResult ranked = SelectUncertainty(rest_posterior, m - batch);
    for (size_t t = 0; t < ranked.order.size(); ++t) {
      result.order.push_back(rest[ranked.order[t]]);
      result.objective_trajectory.push_back(ranked.objective_trajectory[t]);
    }
  }
  return result;
}

bool IsKnownStrategy(const std::string& id) {
  return id == kStrategyRandom || id == kStrategyFacilityLocation ||
         id == kStrategyFacilityLocationWeighted || id == kStrategyTedGreedy ||
         id == kStrategyTedSequential || id == kStrategyInverseDiagonal ||
         id == kStrategyUncertainty;
}

bool IsNestedStrategy(const std::string& id) {
  return IsKnownStrategy(id) && id != kStrategyUncertainty;
}

SelectionResult RunStrategy(const std::string& id, const Dataset& dataset,
                            const GramMatrix& k, int m,
                            const StrategyOptions& options) {
  SelectionResult result;
  if (id == kStrategyRandom) {
    result = SelectRandom(dataset.size(), m, options.seed);
  } else if (id == kStrategyFacilityLocation) {
    result = SelectFacilityLocation(dataset.features(), m);
  } else if (id == kStrategyFacilityLocationWeighted) {
    result = SelectFacilityLocationWeighted(
        dataset.features(), m,
        options.weights.value_or(Eigen::VectorXd::Ones(dataset.size())));
  } else if (id == kStrategyTedGreedy) {
    result = SelectTedGreedy(k, m, options.ridge);
  } else if (id == kStrategyTedSequential) {
    result = SelectTedSequential(k, m, options.ted_gamma, options.ted_c,
                                 options.max_iter, options.tol);
  } else if (id == kStrategyInverseDiagonal) {
    result = SelectInverseDiagonal(k, m);
  } else if (id == kStrategyUncertainty) {
    result = SelectUncertaintyOneShot(dataset, m, options);
  } else {
    throw InvalidArgument("unknown strategy '" + id + "'");
  }
  result.seed = options.seed;
  return result;
}

int SelectionSizeForFraction(double fraction, int n) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw InvalidArgument("fraction must lie in (0, 1]");
  }
  const int m = static_cast<int>(std::llround(fraction * n));
  if (m == 0) {
    throw InvalidArgument("fraction " + RatioLabel(fraction) +
                          " selects no points");
  }
  return m;
}

SweepRecord EvaluateSelection(const Dataset& dataset, const GramMatrix& k,
                              const std::vector<int>& order,
                              const std::string& strategy_id, double fraction,
                              int knn_k,
                              const std::optional<ConditionalDistribution>& truth,
                              const SpectralModel* spectrum) {
  const SelectionMask mask(order);
  SweepRecord record;
  record.strategy_id = strategy_id;
  record.fraction = fraction;
  record.m = mask.size();
  record.facility_value = FacilityLocationValue(dataset.features(), mask);

  if (truth && spectrum) {
    const BoundReport report = ComputeBoundReport(k, mask, *spectrum, *truth);
    record.ted_half_trace = report.ted_half;
    record.bound_total = report.total;
    const Eigen::MatrixXd estimate = ClampUnit(ProjectionEstimate(
        k, mask,
        SelectedOneHot(mask, dataset.labels(), dataset.class_count())));
    record.delta_tv = ConditionalTotalVariation(estimate, truth->probs());
  } else {
    record.ted_half_trace = TedHalf(k, mask);
  }

  const std::vector<int> unlabelled =
      SplitIndices(mask, dataset.size()).unlabelled;
  if (unlabelled.empty()) {
    record.empty_unlabelled = true;
    record.error_rate = 0.0;
  } else {
    const KnnResult knn =
        KnnClassify(dataset.features(), mask, dataset.labels(),
                    dataset.class_count(), std::min(knn_k, mask.size()));
    int wrong = 0;
    for (int u : unlabelled) wrong += knn.predictions[u] != dataset.labels()[u];
    record.error_rate =
        static_cast<double>(wrong) / static_cast<double>(unlabelled.size());
  }
  return record;
}

std::vector<SweepRecord> RunSweep(
    const Dataset& dataset, const KernelSpec& kernel,
    const SweepOptions& options,
    const std::optional<ConditionalDistribution>& truth) {
  if (!dataset.has_labels()) throw InvalidArgument("sweep: labels are required");
  if (options.strategies.empty() || options.fractions.empty()) {
    throw InvalidArgument("sweep: need at least one strategy and one fraction");
  }
  for (const std::string& id : options.strategies) {
    if (!IsKnownStrategy(id)) throw InvalidArgument("unknown strategy '" + id + "'");
  }
  const int n = dataset.size();
  const int m_max = MaxSize(options.fractions, n);
  const GramMatrix k = Gram(kernel, dataset.features());
  std::optional<SpectralModel> spectrum;
  if (truth) spectrum = ComputeSpectralModel(k, options.spectral_tol);
  const SpectralModel* spectrum_ptr = spectrum ? &*spectrum : nullptr;
  const int knn_k = options.strategy.knn_k;

  std::vector<SweepRecord> records;
  for (const std::string& id : options.strategies) {
    std::optional<SelectionResult> nested;
    if (IsNestedStrategy(id)) {
      nested = RunStrategy(id, dataset, k, m_max, options.strategy);
    }
    for (double fraction : options.fractions) {
      const int m = SelectionSizeForFraction(fraction, n);
      const std::vector<int> order =
          nested ? std::vector<int>(nested->order.begin(),
                                    nested->order.begin() + m)
                 : RunStrategy(id, dataset, k, m, options.strategy).order;
      records.push_back(EvaluateSelection(dataset, k, order, id, fraction,
                                          knn_k, truth, spectrum_ptr));
    }
  }
  return records;
}

std::vector<SweepRecord> RunMixedSweep(
    const Dataset& dataset, const KernelSpec& kernel,
    const std::string& base_strategy, const std::vector<double>& ratios,
    const SweepOptions& options,
    const std::optional<ConditionalDistribution>& truth) {
  if (!dataset.has_labels()) throw InvalidArgument("sweep: labels are required");
  if (!IsNestedStrategy(base_strategy)) {
    throw InvalidArgument("mixed sweep: base strategy '" + base_strategy +
                          "' does not produce nested selections");
  }
  if (ratios.empty() || options.fractions.empty()) {
    throw InvalidArgument("mixed sweep: need ratios and fractions");
  }
  for (double r : ratios) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw InvalidArgument("mixed sweep: ratios must lie in [0, 1]");
    }
  }
  const int n = dataset.size();
  const int m_max = MaxSize(options.fractions, n);
  const GramMatrix k = Gram(kernel, dataset.features());
  std::optional<SpectralModel> spectrum;
  if (truth) spectrum = ComputeSpectralModel(k, options.spectral_tol);
  const SelectionResult base =
      RunStrategy(base_strategy, dataset, k, m_max, options.strategy);

  std::vector<SweepRecord> records;
  for (double ratio : ratios) {
    const std::string id = base_strategy + "@" + RatioLabel(ratio);
    for (double fraction : options.fractions) {
      const int m = SelectionSizeForFraction(fraction, n);
      const int from_base = static_cast<int>(std::llround(ratio * m));
      std::vector<int> order(base.order.begin(), base.order.begin() + from_base);
      if (from_base < m) {
        std::vector<int> rest =
            SplitIndices(SelectionMask(order), n).unlabelled;
        std::mt19937_64 rng(options.strategy.seed);
        for (int i = 0; i < m - from_base; ++i) {
          std::uniform_int_distribution<int> pick(
              i, static_cast<int>(rest.size()) - 1);
          std::swap(rest[i], rest[pick(rng)]);
          order.push_back(rest[i]);
        }
      }
      records.push_back(EvaluateSelection(dataset, k, order, id, fraction,
                                          options.strategy.knn_k, truth,
                                          spectrum ? &*spectrum : nullptr));
    }
  }
  return records;
}

}  // namespace datasel
