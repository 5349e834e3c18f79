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

#include "datasel/select.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "datasel/error.h"

namespace datasel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Candidate scores closer than this (relative to the objective's current
// scale) are rounding-level ties and fall to the lower index.
constexpr double kTieTolerance = 1e-12;

bool Improves(double value, double best_value, int best, double scale) {
  if (best < 0) return value < kInf;
  return value < best_value - kTieTolerance * scale;
}

Eigen::MatrixXd PairwiseDistances(const Eigen::MatrixXd& features) {
  const Eigen::Index n = features.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = (features.row(i) - features.row(j)).norm();
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

void CheckWeights(const Eigen::VectorXd& weights, Eigen::Index n) {
  if (weights.size() != n) {
    throw InvalidArgument("facility_location_weighted: weights length " +
                          std::to_string(weights.size()) +
                          " does not match dataset size " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights(i) >= 0.0) || !std::isfinite(weights(i))) {
      throw InvalidArgument("facility_location_weighted: negative weight at " +
                            std::to_string(i));
    }
  }
}

// Shared greedy for Z and Z~. Unit weights multiply every distance by 1.0,
// which is exact, so both entry points agree bit for bit.
SelectionResult GreedyFacilityLocation(const Eigen::MatrixXd& features, int m,
                                       const Eigen::VectorXd& weights,
                                       const char* strategy_id) {
  const int n = static_cast<int>(features.rows());
  CheckSelectionSize(n, m);
  const Eigen::MatrixXd dist = PairwiseDistances(features);

  std::vector<double> cur_dist(n, kInf);
  std::vector<double> cur_cost(n, 0.0);
  std::vector<int> cur_nn(n, -1);
  std::vector<bool> chosen(n, false);

  SelectionResult result;
  result.strategy_id = strategy_id;
  for (int step = 0; step < m; ++step) {
    double best_value = kInf;
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (chosen[j]) continue;
      double total = 0.0;
      for (int x = 0; x < n; ++x) {
        const double d = dist(x, j);
        const bool takes =
            d < cur_dist[x] || (d == cur_dist[x] && j < cur_nn[x]);
        total += takes ? weights(j) * d : cur_cost[x];
      }
      const double value = total / n;
      if (Improves(value, best_value, best, std::abs(best_value))) {
        best_value = value;
        best = j;
      }
    }
    chosen[best] = true;
    for (int x = 0; x < n; ++x) {
      const double d = dist(x, best);
      if (d < cur_dist[x] || (d == cur_dist[x] && best < cur_nn[x])) {
        cur_dist[x] = d;
        cur_nn[x] = best;
        cur_cost[x] = weights(best) * d;
      }
    }
    result.order.push_back(best);
    result.objective_trajectory.push_back(best_value);
  }
  return result;
}

// Residual kernel R = K - K_.S (K_SS + ridge I)^{-1} K_S. maintained under
// rank-one updates as points join S.
class TedResidual {
 public:
  TedResidual(const Eigen::MatrixXd& k, double ridge)
      : r_(k), ridge_(ridge), in_u_(k.rows(), true) {
    const Eigen::Index n = k.rows();
    const double mean_diag = n > 0 ? k.diagonal().mean() : 0.0;
    floor_ = static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
             std::max(mean_diag, 0.0);
    RecomputeTotal();
  }

  double total() const { return total_; }

  // Objective after adding j.
  double Score(int j) const {
    const double r_jj = std::max(r_(j, j), 0.0);
    const double den = r_(j, j) + ridge_;
    if (den <= floor_) return total_ - r_jj;
    double col_sq = 0.0;
    for (Eigen::Index u = 0; u < r_.rows(); ++u) {
      if (in_u_[u]) col_sq += r_(u, j) * r_(u, j);
    }
    return (total_ - r_jj) - (col_sq - r_(j, j) * r_(j, j)) / den;
  }

  void Add(int j) {
    const double den = r_(j, j) + ridge_;
    in_u_[j] = false;
    if (den > floor_) {
      const Eigen::VectorXd v = r_.col(j) / std::sqrt(den);
      const Eigen::Index n = r_.rows();
      for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) r_(i, c) -= v(i) * v(c);
      }
    }
    RecomputeTotal();
  }

  bool unlabelled(int j) const { return in_u_[j]; }

 private:
  void RecomputeTotal() {
    total_ = 0.0;
    for (Eigen::Index u = 0; u < r_.rows(); ++u) {
      if (in_u_[u]) total_ += std::max(r_(u, u), 0.0);
    }
  }

  Eigen::MatrixXd r_;
  double ridge_;
  std::vector<bool> in_u_;
  double floor_ = 0.0;
  double total_ = 0.0;
};

void CheckGram(const GramMatrix& k, const char* what) {
  if (k.values.rows() != k.values.cols()) {
    throw InvalidArgument(std::string(what) + ": Gram matrix is not square");
  }
}

std::vector<int> TopPrefix(const std::vector<int>& ranked, int m) {
  return std::vector<int>(ranked.begin(), ranked.begin() + m);
}

}  // namespace

SelectionMask SelectionResult::Prefix(int m) const {
  if (m < 0 || m > static_cast<int>(order.size())) {
    throw InvalidArgument("selection prefix longer than the selection");
  }
  return SelectionMask(std::vector<int>(order.begin(), order.begin() + m));
}

void CheckSelectionSize(int n, int m) {
  if (m > n) {
    throw InvalidArgument("m exceeds dataset size (m = " + std::to_string(m) +
                          ", N = " + std::to_string(n) + ")");
  }
  if (m <= 0) throw InvalidArgument("m must be positive");
}

std::vector<int> RankIndices(const Eigen::VectorXd& values, bool descending) {
  std::vector<int> idx(values.size());
  std::iota(idx.begin(), idx.end(), 0);
  if (descending) {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values(a) > values(b); });
  } else {
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values(a) < values(b); });
  }
  return idx;
}

SelectionResult SelectRandom(int n, int m, std::uint64_t seed) {
  CheckSelectionSize(n, m);
  std::mt19937_64 rng(seed);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(perm[i], perm[pick(rng)]);
  }
  SelectionResult result;
  result.strategy_id = kStrategyRandom;
  result.seed = seed;
  result.order.assign(perm.begin(), perm.begin() + m);
  result.objective_trajectory.assign(m, 0.0);
  return result;
}

std::vector<int> NearestSelected(const Eigen::MatrixXd& features,
                                 const SelectionMask& mask) {
  if (mask.empty()) throw InvalidArgument("nearest selected: empty selection");
  const int n = static_cast<int>(features.rows());
  mask.Validate(n);
  const std::vector<int>& sel = mask.indices();
  std::vector<int> nearest(n, 0);
  for (int x = 0; x < n; ++x) {
    double best = kInf;
    for (int l = 0; l < mask.size(); ++l) {
      const double d = (features.row(x) - features.row(sel[l])).norm();
      if (d < best) {
        best = d;
        nearest[x] = l;
      }
    }
  }
  return nearest;
}

double WeightedFacilityLocationValue(const Eigen::MatrixXd& features,
                                     const SelectionMask& mask,
                                     const Eigen::VectorXd& weights) {
  if (mask.empty()) {
    throw InvalidArgument("facility_location_value: empty selection");
  }
  const int n = static_cast<int>(features.rows());
  CheckWeights(weights, n);
  const std::vector<int> nearest = NearestSelected(features, mask);
  double total = 0.0;
  for (int x = 0; x < n; ++x) {
    const int s = mask.indices()[nearest[x]];
    total += weights(s) * (features.row(x) - features.row(s)).norm();
  }
  return total / n;
}

double FacilityLocationValue(const Eigen::MatrixXd& features,
                             const SelectionMask& mask) {
  return WeightedFacilityLocationValue(
      features, mask, Eigen::VectorXd::Ones(features.rows()));
}

SelectionResult SelectFacilityLocation(const Eigen::MatrixXd& features, int m) {
  return GreedyFacilityLocation(features, m,
                                Eigen::VectorXd::Ones(features.rows()),
                                kStrategyFacilityLocation);
}

SelectionResult SelectFacilityLocationWeighted(const Eigen::MatrixXd& features,
                                               int m,
                                               const Eigen::VectorXd& weights) {
  CheckWeights(weights, features.rows());
  return GreedyFacilityLocation(features, m, weights,
                                kStrategyFacilityLocationWeighted);
}

SelectionResult SelectTedGreedy(const GramMatrix& k, int m, double ridge) {
  CheckGram(k, "ted_greedy");
  const int n = static_cast<int>(k.size());
  CheckSelectionSize(n, m);
  if (!(ridge >= 0.0)) throw InvalidArgument("ted_greedy: ridge must be >= 0");
  TedResidual residual(k.values, ridge);
  SelectionResult result;
  result.strategy_id = kStrategyTedGreedy;
  for (int step = 0; step < m; ++step) {
    const double scale = std::abs(residual.total());
    double best_value = kInf;
    int best = -1;
    for (int j = 0; j < n; ++j) {
      if (!residual.unlabelled(j)) continue;
      const double value = residual.Score(j);
      if (Improves(value, best_value, best, scale)) {
        best_value = value;
        best = j;
      }
    }
    if (best < 0) throw NumericalError("ted_greedy: non-finite candidate scores");
    residual.Add(best);
    result.order.push_back(best);
    result.objective_trajectory.push_back(residual.total());
  }
  return result;
}

std::vector<double> TedPathObjective(const Eigen::MatrixXd& k,
                                     const std::vector<int>& order,
                                     double ridge) {
  TedResidual residual(k, ridge);
  std::vector<double> path;
  path.reserve(order.size());
  for (int j : order) {
    if (j < 0 || j >= k.rows() || !residual.unlabelled(j)) {
      throw InvalidArgument("ted path: invalid or repeated index");
    }
    residual.Add(j);
    path.push_back(residual.total());
  }
  return path;
}

SequentialTed::SequentialTed(Eigen::MatrixXd k, double gamma, double c)
    : k_(std::move(k)), gamma_(gamma), c_(c) {
  if (k_.rows() != k_.cols() || k_.rows() == 0) {
    throw InvalidArgument("ted_sequential: need a non-empty square kernel");
  }
  if (!(gamma > 0.0) || !(c > 0.0)) {
    throw InvalidArgument("ted_sequential: gamma and c must be positive");
  }
  beta_ = Eigen::VectorXd::Ones(k_.rows());
  a_ = Eigen::MatrixXd::Zero(k_.rows(), k_.cols());
}

double SequentialTed::Step() {
  Eigen::MatrixXd system = k_;
  system.diagonal().array() += c_ * beta_.array().inverse();
  // K and the system matrix are symmetric, so K M^{-1} = (M^{-1} K)^T.
  CholeskySolver solver(system, "ted_sequential");
  a_ = solver.Solve(k_).transpose();
  if (!a_.allFinite()) throw NumericalError("ted_sequential: A is not finite");

  double change = 0.0;
  for (Eigen::Index j = 0; j < beta_.size(); ++j) {
    double next = std::sqrt(a_.col(j).squaredNorm() / gamma_);
    if (next < kBetaFloor) {
      next = kBetaFloor;
      floor_engaged_ = true;
    }
    change = std::max(change, std::abs(next - beta_(j)) / beta_(j));
    beta_(j) = next;
  }
  ++iteration_;
  return change;
}

SelectionResult SelectTedSequential(const GramMatrix& k, int m, double gamma,
                                    double c, int max_iter, double tol) {
  CheckGram(k, "ted_sequential");
  const int n = static_cast<int>(k.size());
  CheckSelectionSize(n, m);
  if (max_iter < 1) throw InvalidArgument("ted_sequential: max_iter must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("ted_sequential: tol must be positive");
  SequentialTed state(k.values, gamma, c);
  SelectionResult result;
  result.strategy_id = kStrategyTedSequential;
  result.converged = false;
  while (state.iteration() < max_iter) {
    if (state.Step() < tol) {
      result.converged = true;
      break;
    }
  }
  result.iterations = state.iteration();
  result.beta_floor_engaged = state.floor_engaged();
  result.order = TopPrefix(RankIndices(state.beta(), /*descending=*/true), m);
  result.scores = std::vector<double>(state.beta().data(),
                                      state.beta().data() + n);
  result.objective_trajectory = TedPathObjective(k.values, result.order);
  return result;
}

SelectionResult SelectInverseDiagonal(const GramMatrix& k, int m) {
  CheckGram(k, "inverse_diagonal");
  const int n = static_cast<int>(k.size());
  CheckSelectionSize(n, m);
  const Eigen::VectorXd diag = InverseDiagonal(k.values);
  SelectionResult result;
  result.strategy_id = kStrategyInverseDiagonal;
  result.order = TopPrefix(RankIndices(diag, /*descending=*/false), m);
  result.scores = std::vector<double>(diag.data(), diag.data() + n);
  result.objective_trajectory = TedPathObjective(k.values, result.order);
  return result;
}

SelectionResult SelectUncertainty(const ConditionalDistribution& posterior,
                                  int m) {
  const int n = posterior.rows();
  CheckSelectionSize(n, m);
  const Eigen::VectorXd score =
      (1.0 - posterior.probs().rowwise().maxCoeff().array()).matrix();
  SelectionResult result;
  result.strategy_id = kStrategyUncertainty;
  result.order = TopPrefix(RankIndices(score, /*descending=*/true), m);
  result.scores = std::vector<double>(score.data(), score.data() + n);
  for (int j : result.order) result.objective_trajectory.push_back(score(j));
  return result;
}

}  // namespace datasel
