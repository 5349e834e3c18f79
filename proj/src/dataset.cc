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

#include "datasel/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "datasel/error.h"
#include "datasel/format.h"

namespace datasel {

namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r')) {
    s.remove_suffix(1);
  }
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

std::vector<std::string> SplitRow(std::string_view line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    size_t comma = line.find(',', start);
    std::string_view cell = line.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    cells.emplace_back(Trim(cell));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool IsBlank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r';
  });
}

// Parses a full cell as a double; '.' decimal regardless of locale.
std::optional<double> ParseDouble(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    return std::nullopt;
  }
  return value;
}

std::optional<int> ParseNonNegativeInt(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  int value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(),
                                   value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || value < 0) {
    return std::nullopt;
  }
  return value;
}

void CheckSameShape(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw InvalidArgument(
        "conditional_total_variation: shape mismatch (" +
        std::to_string(p.rows()) + "x" + std::to_string(p.cols()) + " vs " +
        std::to_string(q.rows()) + "x" + std::to_string(q.cols()) + ")");
  }
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd features,
                 std::optional<std::vector<int>> labels, int class_count,
                 std::vector<std::string> label_names,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      class_count_(class_count),
      label_names_(std::move(label_names)),
      feature_names_(std::move(feature_names)) {
  if (features_.rows() < 1 || features_.cols() < 1) {
    throw InvalidArgument("dataset: need at least one row and one column");
  }
  if (!features_.allFinite()) {
    throw InvalidArgument("dataset: non-finite feature");
  }
  if (labels_) {
    if (static_cast<Eigen::Index>(labels_->size()) != features_.rows()) {
      throw InvalidArgument("dataset: label count does not match row count");
    }
    if (class_count_ < 2) {
      throw InvalidArgument("dataset: class_count must be at least 2");
    }
    for (int label : *labels_) {
      if (label < 0 || label >= class_count_) {
        throw InvalidArgument("dataset: label " + std::to_string(label) +
                              " outside [0, " + std::to_string(class_count_) +
                              ")");
      }
    }
    if (label_names_.empty()) {
      for (int c = 0; c < class_count_; ++c) {
        label_names_.push_back(std::to_string(c));
      }
    }
  } else {
    class_count_ = 0;
    label_names_.clear();
  }
  if (feature_names_.empty()) {
    for (Eigen::Index j = 0; j < features_.cols(); ++j) {
      feature_names_.push_back("x" + std::to_string(j));
    }
  } else if (static_cast<Eigen::Index>(feature_names_.size()) !=
             features_.cols()) {
    throw InvalidArgument("dataset: feature name count mismatch");
  }
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw InvalidArgument("dataset: labels are not present");
  return *labels_;
}

SelectionMask::SelectionMask(std::vector<int> indices)
    : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  if (!indices_.empty() && indices_.front() < 0) {
    throw InvalidArgument("selection: negative index");
  }
  if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end()) {
    throw InvalidArgument("selection: duplicate index");
  }
}

SelectionMask SelectionMask::All(int n) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return SelectionMask(std::move(all));
}

void SelectionMask::Validate(int n) const {
  if (!indices_.empty() && indices_.back() >= n) {
    throw InvalidArgument("selection: index " +
                          std::to_string(indices_.back()) +
                          " out of range for dataset of size " +
                          std::to_string(n));
  }
}

std::vector<bool> SelectionMask::Membership(int n) const {
  Validate(n);
  std::vector<bool> member(n, false);
  for (int i : indices_) member[i] = true;
  return member;
}

ConditionalDistribution::ConditionalDistribution(Eigen::MatrixXd probs)
    : probs_(std::move(probs)) {
  if (probs_.cols() < 1) {
    throw InvalidArgument("conditional distribution: no classes");
  }
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    if (!probs_.row(i).allFinite() || probs_.row(i).minCoeff() < 0.0) {
      throw InvalidArgument("conditional distribution: row " +
                            std::to_string(i) +
                            " has a negative or non-finite entry");
    }
    if (std::abs(probs_.row(i).sum() - 1.0) > kRowSumTolerance) {
      throw InvalidArgument("conditional distribution: row " +
                            std::to_string(i) + " does not sum to 1");
    }
  }
}

ConditionalDistribution ConditionalDistribution::OneHot(
    std::span<const int> labels, int class_count) {
  Eigen::MatrixXd probs =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(labels.size()),
                            class_count);
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) {
      throw InvalidArgument("one-hot: label out of range");
    }
    probs(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return ConditionalDistribution(std::move(probs));
}

Dataset LoadCsv(const std::string& path,
                const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("load_csv: cannot open " + path);

  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!IsBlank(line)) {
      header = SplitRow(line);
      break;
    }
  }
  if (header.empty()) throw InvalidArgument("load_csv: missing header in " + path);

  int label_index = -1;
  if (label_column) {
    auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw InvalidArgument("load_csv: label column '" + *label_column +
                            "' not found");
    }
    label_index = static_cast<int>(it - header.begin());
  }
  std::vector<std::string> feature_names;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (j != label_index) feature_names.push_back(header[j]);
  }

  std::vector<double> values;
  std::vector<std::string> label_cells;
  int row = 0;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (IsBlank(line)) continue;
    std::vector<std::string> cells = SplitRow(line);
    if (cells.size() != header.size()) {
      throw InvalidArgument("load_csv: ragged row at line " +
                            std::to_string(line_number) + " (" +
                            std::to_string(cells.size()) + " cells, expected " +
                            std::to_string(header.size()) + ")");
    }
    for (int j = 0; j < static_cast<int>(cells.size()); ++j) {
      if (j == label_index) {
        label_cells.push_back(cells[j]);
        continue;
      }
      std::optional<double> value = ParseDouble(cells[j]);
      if (!value) {
        throw InvalidArgument("load_csv: non-numeric feature '" + cells[j] +
                              "' at line " + std::to_string(line_number));
      }
      if (!std::isfinite(*value)) {
        throw InvalidArgument("load_csv: non-finite feature at line " +
                              std::to_string(line_number));
      }
      values.push_back(*value);
    }
    ++row;
  }
  if (row == 0) throw InvalidArgument("load_csv: no data rows in " + path);
  if (feature_names.empty()) {
    throw InvalidArgument("load_csv: no feature columns in " + path);
  }

  const int d = static_cast<int>(feature_names.size());
  Eigen::MatrixXd features(row, d);
  for (int i = 0; i < row; ++i) {
    for (int j = 0; j < d; ++j) features(i, j) = values[i * d + j];
  }

  if (label_index < 0) {
    return Dataset(std::move(features), std::nullopt, 0, {},
                   std::move(feature_names));
  }

  std::vector<int> labels;
  labels.reserve(label_cells.size());
  bool integer_coded = true;
  for (const std::string& cell : label_cells) {
    std::optional<int> v = ParseNonNegativeInt(cell);
    if (!v) {
      integer_coded = false;
      break;
    }
    labels.push_back(*v);
  }
  std::vector<std::string> names;
  int class_count = 0;
  if (integer_coded) {
    int max_label = *std::max_element(labels.begin(), labels.end());
    class_count = std::max(2, max_label + 1);
  } else {
    labels.clear();
    std::unordered_map<std::string, int> codes;
    for (const std::string& cell : label_cells) {
      auto [it, inserted] =
          codes.emplace(cell, static_cast<int>(names.size()));
      if (inserted) names.push_back(cell);
      labels.push_back(it->second);
    }
    class_count = std::max(2, static_cast<int>(names.size()));
  }
  return Dataset(std::move(features), std::move(labels), class_count,
                 std::move(names), std::move(feature_names));
}

std::string FormatCsv(const Dataset& dataset, const std::string& label_column) {
  std::string out;
  const auto& names = dataset.feature_names();
  for (size_t j = 0; j < names.size(); ++j) {
    if (j > 0) out += ',';
    out += names[j];
  }
  if (dataset.has_labels()) out += "," + label_column;
  out += '\n';
  for (int i = 0; i < dataset.size(); ++i) {
    for (int j = 0; j < dataset.dim(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(dataset.features()(i, j));
    }
    if (dataset.has_labels()) {
      int label = dataset.labels()[i];
      out += ',';
      out += label < static_cast<int>(dataset.label_names().size())
                 ? dataset.label_names()[label]
                 : std::to_string(label);
    }
    out += '\n';
  }
  return out;
}

void WriteCsv(const Dataset& dataset, const std::string& path,
              const std::string& label_column) {
  WriteFileAtomic(path, FormatCsv(dataset, label_column));
}

namespace {

MixtureLayout IdentityLayout(const Eigen::MatrixXd& centers) {
  MixtureLayout layout;
  layout.centers = centers;
  layout.classes = static_cast<int>(centers.rows());
  for (int c = 0; c < layout.classes; ++c) layout.component_class.push_back(c);
  return layout;
}

// Components of each class, in component order.
std::vector<std::vector<int>> ComponentsByClass(const MixtureLayout& layout) {
  if (layout.classes < 1 ||
      static_cast<Eigen::Index>(layout.component_class.size()) !=
          layout.centers.rows()) {
    throw InvalidArgument("mixture layout: one class per component required");
  }
  std::vector<std::vector<int>> members(layout.classes);
  for (size_t k = 0; k < layout.component_class.size(); ++k) {
    const int c = layout.component_class[k];
    if (c < 0 || c >= layout.classes) {
      throw InvalidArgument("mixture layout: component class out of range");
    }
    members[c].push_back(static_cast<int>(k));
  }
  for (const auto& m : members) {
    if (m.empty()) throw InvalidArgument("mixture layout: class without components");
  }
  return members;
}

}  // namespace

Eigen::MatrixXd GaussianMixturePosterior(const Eigen::MatrixXd& points,
                                         const MixtureLayout& layout,
                                         double sigma) {
  if (points.cols() != layout.centers.cols()) {
    throw InvalidArgument("mixture posterior: dimension mismatch");
  }
  const std::vector<std::vector<int>> members = ComponentsByClass(layout);
  const Eigen::Index n = points.rows();
  const Eigen::Index k_total = layout.centers.rows();
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(n, layout.classes);
  Eigen::VectorXd logits(k_total);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < k_total; ++k) {
      const int c = layout.component_class[k];
      // Component prior is 1 / (classes * |components of c|).
      logits(k) = -(points.row(i) - layout.centers.row(k)).squaredNorm() /
                      (2.0 * sigma * sigma) -
                  std::log(static_cast<double>(members[c].size()));
    }
    // log-sum-exp shift keeps the largest weight at exactly exp(0).
    logits.array() -= logits.maxCoeff();
    for (Eigen::Index k = 0; k < k_total; ++k) {
      probs(i, layout.component_class[k]) += std::exp(logits(k));
    }
    probs.row(i) /= probs.row(i).sum();
  }
  return probs;
}

Eigen::MatrixXd GaussianMixturePosterior(const Eigen::MatrixXd& points,
                                         const Eigen::MatrixXd& centers,
                                         double sigma) {
  return GaussianMixturePosterior(points, IdentityLayout(centers), sigma);
}

SyntheticData MakeGaussianMixture(std::uint64_t seed, int n_per_class,
                                  const MixtureLayout& layout, double sigma) {
  if (layout.classes < 2) {
    throw InvalidArgument("make_gaussian_mixture: need at least 2 classes");
  }
  if (layout.centers.cols() < 1) {
    throw InvalidArgument("make_gaussian_mixture: centers have no columns");
  }
  if (!(sigma > 0.0)) {
    throw InvalidArgument("make_gaussian_mixture: sigma must be positive");
  }
  if (n_per_class < 1) {
    throw InvalidArgument("make_gaussian_mixture: n_per_class must be >= 1");
  }
  const std::vector<std::vector<int>> members = ComponentsByClass(layout);
  const int classes = layout.classes;
  const int d = static_cast<int>(layout.centers.cols());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);

  Eigen::MatrixXd features(classes * n_per_class, d);
  std::vector<int> labels(classes * n_per_class);
  for (int c = 0; c < classes; ++c) {
    const int count = static_cast<int>(members[c].size());
    std::uniform_int_distribution<int> pick(0, count - 1);
    for (int s = 0; s < n_per_class; ++s) {
      const int row = c * n_per_class + s;
      const int k = count == 1 ? members[c][0] : members[c][pick(rng)];
      for (int j = 0; j < d; ++j) {
        features(row, j) = layout.centers(k, j) + normal(rng);
      }
      labels[row] = c;
    }
  }
  Eigen::MatrixXd posterior = GaussianMixturePosterior(features, layout, sigma);
  return SyntheticData{Dataset(std::move(features), std::move(labels), classes),
                       ConditionalDistribution(std::move(posterior))};
}

SyntheticData MakeGaussianMixture(std::uint64_t seed, int n_per_class,
                                  const Eigen::MatrixXd& centers,
                                  double sigma) {
  if (centers.rows() < 2) {
    throw InvalidArgument("make_gaussian_mixture: need at least 2 centers");
  }
  return MakeGaussianMixture(seed, n_per_class, IdentityLayout(centers), sigma);
}

Eigen::MatrixXd CircleCenters(int classes, int dim, double radius) {
  if (classes < 2 || dim < 1) {
    throw InvalidArgument("circle centers: need classes >= 2 and dim >= 1");
  }
  Eigen::MatrixXd centers = Eigen::MatrixXd::Zero(classes, dim);
  for (int c = 0; c < classes; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / classes;
    centers(c, 0) = radius * std::cos(angle);
    if (dim >= 2) centers(c, 1) = radius * std::sin(angle);
  }
  return centers;
}

MixtureLayout GridLayout(int classes, int components_per_class, int dim,
                         double spacing) {
  if (classes < 2 || components_per_class < 1 || dim < 1 ||
      !(spacing > 0.0)) {
    throw InvalidArgument("grid layout: need classes >= 2, components >= 1, "
                          "dim >= 1, spacing > 0");
  }
  const int total = classes * components_per_class;
  const int side =
      dim >= 2 ? static_cast<int>(std::ceil(std::sqrt(static_cast<double>(total))))
               : total;
  MixtureLayout layout;
  layout.classes = classes;
  std::vector<int> filled(classes, 0);
  std::vector<std::pair<int, int>> cells;
  // Row-major scan; a class that already has its components skips the cell,
  // so a few extra rows may be used when the grid does not split evenly.
  for (int cell = 0; static_cast<int>(cells.size()) < total; ++cell) {
    const int r = cell / side;
    const int col = cell % side;
    const int c = (r + col) % classes;
    if (filled[c] == components_per_class) continue;
    ++filled[c];
    cells.emplace_back(r, col);
    layout.component_class.push_back(c);
  }
  layout.centers = Eigen::MatrixXd::Zero(total, dim);
  for (int k = 0; k < total; ++k) {
    if (dim >= 2) {
      layout.centers(k, 0) = spacing * cells[k].first;
      layout.centers(k, 1) = spacing * cells[k].second;
    } else {
      layout.centers(k, 0) = spacing * cells[k].second;
    }
  }
  return layout;
}

SyntheticData MakeLogistic1d(std::uint64_t seed, int n, double slope,
                             double lo, double hi) {
  if (n < 1 || !(hi > lo)) {
    throw InvalidArgument("make_logistic_1d: need n >= 1 and hi > lo");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(lo, hi);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Eigen::MatrixXd features(n, 1);
  Eigen::MatrixXd posterior(n, 2);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    const double x = uniform(rng);
    const double p1 = 1.0 / (1.0 + std::exp(-slope * x));
    features(i, 0) = x;
    posterior(i, 0) = 1.0 - p1;
    posterior(i, 1) = p1;
    labels[i] = coin(rng) < p1 ? 1 : 0;
  }
  return SyntheticData{Dataset(std::move(features), std::move(labels), 2),
                       ConditionalDistribution(std::move(posterior))};
}

double ConditionalTotalVariation(const Eigen::MatrixXd& p,
                                 const Eigen::MatrixXd& q) {
  CheckSameShape(p, q);
  if (p.rows() == 0) {
    throw InvalidArgument("conditional_total_variation: empty distributions");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    total += 0.5 * (p.row(i) - q.row(i)).cwiseAbs().sum();
  }
  return total / static_cast<double>(p.rows());
}

double ConditionalTotalVariation(const ConditionalDistribution& p,
                                 const ConditionalDistribution& q) {
  return ConditionalTotalVariation(p.probs(), q.probs());
}

IndexSplit SplitIndices(const SelectionMask& mask, int n) {
  std::vector<bool> member = mask.Membership(n);
  IndexSplit split;
  split.train = mask.indices();
  split.unlabelled.reserve(n - mask.size());
  for (int i = 0; i < n; ++i) {
    if (!member[i]) split.unlabelled.push_back(i);
  }
  return split;
}

}  // namespace datasel
