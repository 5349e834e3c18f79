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

// Datasets, selections and conditional class distributions.
//
// Every quantity in this library is taken under the empirical measure of a
// fixed dataset: each of the N rows carries mass 1/N.

#ifndef DATASEL_DATASET_H_
#define DATASEL_DATASET_H_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace datasel {

// Feature matrix (N x d) with optional integer class labels.
class Dataset {
 public:
  // Throws InvalidArgument when N < 1, d < 1, a feature is non-finite, or a
  // label is out of [0, class_count). With labels present class_count must
  // be >= 2; without labels it is ignored and reported as 0.
  explicit Dataset(Eigen::MatrixXd features,
                   std::optional<std::vector<int>> labels = std::nullopt,
                   int class_count = 0,
                   std::vector<std::string> label_names = {},
                   std::vector<std::string> feature_names = {});

  int size() const { return static_cast<int>(features_.rows()); }
  int dim() const { return static_cast<int>(features_.cols()); }
  const Eigen::MatrixXd& features() const { return features_; }

  bool has_labels() const { return labels_.has_value(); }
  // Requires has_labels().
  const std::vector<int>& labels() const;
  int class_count() const { return class_count_; }

  // Original label strings, indexed by label id. May be shorter than
  // class_count when some classes never occur.
  const std::vector<std::string>& label_names() const { return label_names_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

 private:
  Eigen::MatrixXd features_;
  std::optional<std::vector<int>> labels_;
  int class_count_ = 0;
  std::vector<std::string> label_names_;
  std::vector<std::string> feature_names_;
};

// A set of selected (labelled) row indices, kept sorted and distinct.
class SelectionMask {
 public:
  SelectionMask() = default;
  // Sorts the indices; throws InvalidArgument on duplicates or negatives.
  explicit SelectionMask(std::vector<int> indices);

  static SelectionMask All(int n);

  const std::vector<int>& indices() const { return indices_; }
  int size() const { return static_cast<int>(indices_.size()); }
  bool empty() const { return indices_.empty(); }

  // Throws InvalidArgument if any index is >= n.
  void Validate(int n) const;
  // Membership flags over [0, n).
  std::vector<bool> Membership(int n) const;

 private:
  std::vector<int> indices_;
};

// Rows of p(y|x) evaluated on a dataset; every row lies on the simplex.
class ConditionalDistribution {
 public:
  static constexpr double kRowSumTolerance = 1e-9;

  // Throws InvalidArgument on negative entries or rows not summing to 1.
  explicit ConditionalDistribution(Eigen::MatrixXd probs);

  // One-hot rows for integer labels in [0, class_count).
  static ConditionalDistribution OneHot(std::span<const int> labels,
                                        int class_count);

  const Eigen::MatrixXd& probs() const { return probs_; }
  int rows() const { return static_cast<int>(probs_.rows()); }
  int classes() const { return static_cast<int>(probs_.cols()); }

 private:
  Eigen::MatrixXd probs_;
};

// A generated dataset together with its exact class posterior.
struct SyntheticData {
  Dataset dataset;
  ConditionalDistribution posterior;
};

// CSV ingestion. A header row is required. When label_column is given, that
// column becomes the label vector: if every cell is a non-negative integer
// the values are used directly, otherwise strings are coded by first
// appearance. All other columns must be numeric and finite.
Dataset LoadCsv(const std::string& path,
                const std::optional<std::string>& label_column = std::nullopt);

// Writes features (17 significant digits) and, when present, the label
// column under `label_column` using the original label strings.
void WriteCsv(const Dataset& dataset, const std::string& path,
              const std::string& label_column = "label");
std::string FormatCsv(const Dataset& dataset,
                      const std::string& label_column = "label");

// Mixture components and the class each one belongs to.
struct MixtureLayout {
  Eigen::MatrixXd centers;  // one row per component
  std::vector<int> component_class;
  int classes = 0;
};

// Isotropic Gaussian mixture with n_per_class samples around each row of
// `centers` (C x d). Rows are emitted class by class. The posterior is the
// exact p(y=c|x) under a uniform class prior.
SyntheticData MakeGaussianMixture(std::uint64_t seed, int n_per_class,
                                  const Eigen::MatrixXd& centers,
                                  double sigma);

// General form: each sample of class c comes from one of c's components,
// chosen uniformly. With one component per class this draws the same
// stream as the overload above.
SyntheticData MakeGaussianMixture(std::uint64_t seed, int n_per_class,
                                  const MixtureLayout& layout, double sigma);

// Exact posterior of an isotropic mixture with uniform prior, evaluated at
// each row of `points`.
Eigen::MatrixXd GaussianMixturePosterior(const Eigen::MatrixXd& points,
                                         const Eigen::MatrixXd& centers,
                                         double sigma);
Eigen::MatrixXd GaussianMixturePosterior(const Eigen::MatrixXd& points,
                                         const MixtureLayout& layout,
                                         double sigma);

// `classes` centers spaced evenly on a circle of radius `radius` in the first
// two coordinates of R^dim (dim >= 2; first coordinate only when dim == 1).
Eigen::MatrixXd CircleCenters(int classes, int dim, double radius);

// components_per_class components per class on a square grid with the given
// spacing in the first two coordinates; cell (r, c) goes to class
// (r + c) mod classes, so two classes form a checkerboard. With dim == 1 the
// cells lie on a line.
MixtureLayout GridLayout(int classes, int components_per_class, int dim,
                         double spacing);

// Two classes on x ~ U[lo, hi] with p(y=1|x) = 1 / (1 + exp(-slope * x)).
// Labels are drawn from the posterior.
SyntheticData MakeLogistic1d(std::uint64_t seed, int n, double slope,
                             double lo, double hi);

// Lipschitz constant of x -> sigmoid(slope * x), shared by both classes.
inline double LogisticLipschitz(double slope) { return std::abs(slope) / 4.0; }

// (1/N) sum_x (1/2) sum_c |p(c|x) - q(c|x)|.
double ConditionalTotalVariation(const ConditionalDistribution& p,
                                 const ConditionalDistribution& q);
// Same formula on raw N x C matrices (rows need not be normalized).
double ConditionalTotalVariation(const Eigen::MatrixXd& p,
                                 const Eigen::MatrixXd& q);

struct IndexSplit {
  std::vector<int> train;
  std::vector<int> unlabelled;
};

IndexSplit SplitIndices(const SelectionMask& mask, int n);

}  // namespace datasel

#endif  // DATASEL_DATASET_H_
