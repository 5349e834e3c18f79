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

// Training-data selection strategies. All ties are broken towards the lowest
// index, so every strategy is a deterministic function of its inputs (and
// seed, for the random one).

#ifndef DATASEL_SELECT_H_
#define DATASEL_SELECT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "datasel/dataset.h"
#include "datasel/kernel.h"

namespace datasel {

inline constexpr const char* kStrategyRandom = "random";
inline constexpr const char* kStrategyFacilityLocation = "facility-location";
inline constexpr const char* kStrategyFacilityLocationWeighted =
    "facility-location-weighted";
inline constexpr const char* kStrategyTedGreedy = "ted-greedy";
inline constexpr const char* kStrategyTedSequential = "ted-sequential";
inline constexpr const char* kStrategyInverseDiagonal = "inverse-diagonal";
inline constexpr const char* kStrategyUncertainty = "uncertainty";

struct SelectionResult {
  std::vector<int> order;
  // Strategy objective after each pick; same length as `order`.
  std::vector<double> objective_trajectory;
  std::optional<std::vector<double>> scores;
  std::string strategy_id;
  std::uint64_t seed = 0;
  // Only meaningful for iterative strategies.
  bool converged = true;
  int iterations = 0;
  bool beta_floor_engaged = false;

  SelectionMask Mask() const { return SelectionMask(order); }
  // The first m picks.
  SelectionMask Prefix(int m) const;
};

// Uniform sample without replacement (partial Fisher-Yates on mt19937_64).
// A run with smaller m returns a prefix of a run with larger m.
SelectionResult SelectRandom(int n, int m, std::uint64_t seed);

// Position (within mask.indices()) of the nearest selected point for every
// row; equal distances resolve to the lower selected index.
std::vector<int> NearestSelected(const Eigen::MatrixXd& features,
                                 const SelectionMask& mask);

// Z(S): mean Euclidean distance to the nearest selected point.
double FacilityLocationValue(const Eigen::MatrixXd& features,
                             const SelectionMask& mask);
// (1/N) sum_x w(nn(x)) ||x - nn(x)||.
double WeightedFacilityLocationValue(const Eigen::MatrixXd& features,
                                     const SelectionMask& mask,
                                     const Eigen::VectorXd& weights);

SelectionResult SelectFacilityLocation(const Eigen::MatrixXd& features, int m);
SelectionResult SelectFacilityLocationWeighted(const Eigen::MatrixXd& features,
                                               int m,
                                               const Eigen::VectorXd& weights);

// Greedy minimization of Tr(K_UU - K_US (K_SS + ridge I)^{-1} K_SU) using
// rank-one updates of the residual kernel.
SelectionResult SelectTedGreedy(const GramMatrix& k, int m, double ridge = 0.0);

// TED objective after each prefix of `order`, via the same rank-one updates.
// Points whose residual variance has vanished are skipped as already
// explained instead of raising.
std::vector<double> TedPathObjective(const Eigen::MatrixXd& k,
                                     const std::vector<int>& order,
                                     double ridge = 0.0);

inline constexpr double kBetaFloor = 1e-12;

// Alternating updates
//   A <- K (c diag(beta)^{-1} + K)^{-1}
//   beta_j <- sqrt(||A_{:,j}||^2 / gamma)
// starting from beta = 1.
class SequentialTed {
 public:
  SequentialTed(Eigen::MatrixXd k, double gamma, double c);

  // One A update followed by one beta update. Returns the largest relative
  // change of beta.
  double Step();

  const Eigen::MatrixXd& a() const { return a_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double c() const { return c_; }
  int iteration() const { return iteration_; }
  bool floor_engaged() const { return floor_engaged_; }

 private:
  Eigen::MatrixXd k_;
  Eigen::MatrixXd a_;
  Eigen::VectorXd beta_;
  double gamma_;
  double c_;
  int iteration_ = 0;
  bool floor_engaged_ = false;
};

// Runs SequentialTed until the relative beta change drops below tol or
// max_iter steps; order = top-m by beta, scores = beta.
SelectionResult SelectTedSequential(const GramMatrix& k, int m, double gamma,
                                    double c, int max_iter, double tol);

// m smallest entries of diag(K^{-1}).
SelectionResult SelectInverseDiagonal(const GramMatrix& k, int m);

// m largest values of 1 - max_c p(c|x).
SelectionResult SelectUncertainty(const ConditionalDistribution& posterior,
                                  int m);

// Indices sorted by value (ascending or descending), ties by lower index.
std::vector<int> RankIndices(const Eigen::VectorXd& values, bool descending);

// Throws InvalidArgument unless 0 < m <= n.
void CheckSelectionSize(int n, int m);

}  // namespace datasel

#endif  // DATASEL_SELECT_H_
