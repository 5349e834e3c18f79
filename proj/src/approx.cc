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

#include <algorithm>
#include <cmath>
#include <string>

#include "datasel/error.h"

namespace datasel {

namespace {

void CheckSelection(const GramMatrix& k, const SelectionMask& mask,
                    const char* what) {
  if (k.values.rows() != k.values.cols()) {
    throw InvalidArgument(std::string(what) + ": Gram matrix is not square");
  }
  if (mask.empty()) {
    throw InvalidArgument(std::string(what) + ": empty selection");
  }
  mask.Validate(static_cast<int>(k.size()));
}

std::vector<int> AllIndices(int n) {
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  return all;
}

}  // namespace

PowerProfile ComputePowerProfile(const GramMatrix& k,
                                 const SelectionMask& mask) {
  CheckSelection(k, mask, "power_profile");
  const int n = static_cast<int>(k.size());
  const std::vector<int>& selected = mask.indices();
  CholeskySolver solver(Submatrix(k.values, selected, selected),
                        "power_profile");
  const Eigen::VectorXd explained =
      solver.QuadraticForms(Submatrix(k.values, selected, AllIndices(n)));
  const std::vector<bool> member = mask.Membership(n);

  PowerProfile profile;
  profile.values = Eigen::VectorXd::Zero(n);
  profile.jitter = solver.jitter();
  for (int x = 0; x < n; ++x) {
    if (member[x]) continue;
    const double radicand = k.values(x, x) - explained(x);
    if (radicand < 0.0) {
      ++profile.clamped_count;
      continue;
    }
    profile.values(x) = std::sqrt(radicand);
  }
  return profile;
}

Eigen::MatrixXd SchurComplement(const GramMatrix& k, const SelectionMask& mask) {
  CheckSelection(k, mask, "schur_complement");
  const IndexSplit split = SplitIndices(mask, static_cast<int>(k.size()));
  if (split.unlabelled.empty()) return Eigen::MatrixXd(0, 0);
  const Eigen::MatrixXd k_su = Submatrix(k.values, split.train, split.unlabelled);
  CholeskySolver solver(Submatrix(k.values, split.train, split.train),
                        "schur_complement");
  return Submatrix(k.values, split.unlabelled, split.unlabelled) -
         k_su.transpose() * solver.Solve(k_su);
}

double TedObjective(const GramMatrix& k, const SelectionMask& mask,
                    double ridge) {
  CheckSelection(k, mask, "ted_objective");
  if (!(ridge >= 0.0)) {
    throw InvalidArgument("ted_objective: ridge must be non-negative");
  }
  const IndexSplit split = SplitIndices(mask, static_cast<int>(k.size()));
  if (split.unlabelled.empty()) return 0.0;
  Eigen::MatrixXd regularized = Submatrix(k.values, split.train, split.train);
  regularized.diagonal().array() += ridge;
  CholeskySolver solver(regularized, "ted_objective");
  const Eigen::VectorXd explained = solver.QuadraticForms(
      Submatrix(k.values, split.train, split.unlabelled));
  double total = 0.0;
  for (size_t u = 0; u < split.unlabelled.size(); ++u) {
    total += k.values(split.unlabelled[u], split.unlabelled[u]) -
             explained(static_cast<Eigen::Index>(u));
  }
  return total;
}

double TedHalf(const PowerProfile& profile) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < profile.values.size(); ++i) {
    total += profile.values(i);
  }
  return total;
}

double TedHalf(const GramMatrix& k, const SelectionMask& mask) {
  return TedHalf(ComputePowerProfile(k, mask));
}

Eigen::MatrixXd ProjectionEstimate(const GramMatrix& k,
                                   const SelectionMask& mask,
                                   const Eigen::MatrixXd& targets) {
  CheckSelection(k, mask, "projection_estimate");
  if (targets.rows() != mask.size()) {
    throw InvalidArgument("projection_estimate: need one target row per "
                          "selected point");
  }
  const int n = static_cast<int>(k.size());
  const std::vector<int>& selected = mask.indices();
  CholeskySolver solver(Submatrix(k.values, selected, selected),
                        "projection_estimate");
  const Eigen::MatrixXd coefficients = solver.Solve(targets);
  Eigen::MatrixXd estimate =
      Submatrix(k.values, AllIndices(n), selected) * coefficients;
  for (int l = 0; l < mask.size(); ++l) {
    estimate.row(selected[l]) = targets.row(l);
  }
  return estimate;
}

Eigen::MatrixXd SelectedOneHot(const SelectionMask& mask,
                               const std::vector<int>& labels,
                               int class_count) {
  mask.Validate(static_cast<int>(labels.size()));
  Eigen::MatrixXd one_hot = Eigen::MatrixXd::Zero(mask.size(), class_count);
  for (int l = 0; l < mask.size(); ++l) {
    const int label = labels[mask.indices()[l]];
    if (label < 0 || label >= class_count) {
      throw InvalidArgument("one-hot: label out of range");
    }
    one_hot(l, label) = 1.0;
  }
  return one_hot;
}

Eigen::MatrixXd ClampUnit(const Eigen::MatrixXd& m) {
  return m.cwiseMax(0.0).cwiseMin(1.0);
}

double EpsHFromCoefficients(const Eigen::VectorXd& coefficients,
                            const Eigen::VectorXd& eigenvalues,
                            double null_mass) {
  if (coefficients.size() != eigenvalues.size()) {
    throw InvalidArgument("eps_h: coefficient/eigenvalue count mismatch");
  }
  double sum = std::max(null_mass, 0.0);
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    const double shrink = 1.0 - eigenvalues(i);
    sum += coefficients(i) * coefficients(i) * shrink * shrink;
  }
  return std::sqrt(sum);
}

EpsHTerms DecomposeEpsH(const SpectralModel& spectrum,
                        const ConditionalDistribution& p, int class_index) {
  if (p.rows() != spectrum.points()) {
    throw InvalidArgument("eps_h: distribution rows do not match spectrum");
  }
  if (class_index < 0 || class_index >= p.classes()) {
    throw InvalidArgument("eps_h: class index out of range");
  }
  const double inv_n = 1.0 / static_cast<double>(p.rows());
  const Eigen::VectorXd p_c = p.probs().col(class_index);
  EpsHTerms terms;
  terms.coefficients = inv_n * (spectrum.eigenfunctions.transpose() * p_c);
  // Parseval residual: the part of p_c outside the retained eigenfunctions.
  const double energy = inv_n * p_c.squaredNorm();
  terms.null_mass = std::max(0.0, energy - terms.coefficients.squaredNorm());
  terms.value = EpsHFromCoefficients(terms.coefficients, spectrum.eigenvalues,
                                     terms.null_mass);
  return terms;
}

double EpsH(const SpectralModel& spectrum, const ConditionalDistribution& p,
            int class_index) {
  return DecomposeEpsH(spectrum, p, class_index).value;
}

BoundReport ComputeBoundReport(const GramMatrix& k, const SelectionMask& mask,
                               const SpectralModel& spectrum,
                               const ConditionalDistribution& p) {
  CheckSelection(k, mask, "bound_report");
  const int n = static_cast<int>(k.size());
  if (spectrum.points() != n || p.rows() != n) {
    throw InvalidArgument("bound_report: spectrum, distribution and Gram "
                          "matrix disagree on N");
  }
  const PowerProfile profile = ComputePowerProfile(k, mask);
  BoundReport report;
  report.ted_half = TedHalf(profile);
  report.trace_k = spectrum.Trace();
  report.clamped_count = profile.clamped_count;
  report.jitter = profile.jitter;
  const double scale_factor =
      std::sqrt(report.trace_k) / (2.0 * static_cast<double>(n));
  report.first_term = report.ted_half * scale_factor;

  double eps_sum = 0.0;
  double rkhs_norm_sum = 0.0;
  bool in_rkhs = true;
  for (int c = 0; c < p.classes(); ++c) {
    const EpsHTerms terms = DecomposeEpsH(spectrum, p, c);
    report.eps_h_per_class.push_back(terms.value);
    report.null_mass_per_class.push_back(terms.null_mass);
    eps_sum += terms.value;
    in_rkhs = in_rkhs && terms.null_mass <= kRkhsNullMassTolerance;
    rkhs_norm_sum +=
        std::sqrt((terms.coefficients.array() / spectrum.eigenvalues.array())
                      .square()
                      .sum());
  }
  report.total = report.first_term + 0.5 * eps_sum;
  if (in_rkhs) report.rkhs_variant = report.first_term * rkhs_norm_sum;
  return report;
}

double PointwiseProjectionBoundCheck(const GramMatrix& k,
                                     const SelectionMask& mask,
                                     const SpectralModel& spectrum,
                                     const ConditionalDistribution& p,
                                     int class_index) {
  CheckSelection(k, mask, "pointwise_projection_bound_check");
  const int n = static_cast<int>(k.size());
  if (spectrum.points() != n || p.rows() != n) {
    throw InvalidArgument("pointwise_projection_bound_check: shape mismatch");
  }
  if (class_index < 0 || class_index >= p.classes()) {
    throw InvalidArgument("pointwise_projection_bound_check: bad class index");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd p_c = p.probs().col(class_index);
  const Eigen::VectorXd tp = inv_n * (k.values * p_c);

  const std::vector<int>& selected = mask.indices();
  Eigen::VectorXd tp_at_s(mask.size());
  for (int l = 0; l < mask.size(); ++l) tp_at_s(l) = tp(selected[l]);
  CholeskySolver solver(Submatrix(k.values, selected, selected),
                        "pointwise_projection_bound_check");
  const Eigen::VectorXd projected =
      Submatrix(k.values, AllIndices(n), selected) * solver.Solve(tp_at_s);

  const PowerProfile profile = ComputePowerProfile(k, mask);
  const double class_mass = inv_n * p_c.sum();
  const double factor = std::sqrt(spectrum.Trace()) * class_mass;
  double worst = -std::numeric_limits<double>::infinity();
  for (int x = 0; x < n; ++x) {
    const double lhs = std::abs(tp(x) - projected(x));
    const double rhs = profile.values(x) * factor;
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace datasel
