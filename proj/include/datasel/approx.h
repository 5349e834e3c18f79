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

// RKHS approximation quantities for a selection S of a dataset D:
//
//   power function   P(x)^2 = k(x,x) - K_xS K_SS^{-1} K_Sx
//   TED objective    Tr(K_UU - K_US (K_SS + ridge I)^{-1} K_SU),  U = D \ S
//   TED^1/2          sum_{u in U} P(u)   (trace of the element-wise root)
//
// and the information-loss bound assembled from them:
//
//   delta_TV <= TED^1/2 / (2N) * sqrt(Tr k) + 1/2 sum_c eps_H^c.

#ifndef DATASEL_APPROX_H_
#define DATASEL_APPROX_H_

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "datasel/dataset.h"
#include "datasel/kernel.h"

namespace datasel {

struct PowerProfile {
  Eigen::VectorXd values;  // |P_{V_S}(x)| for every dataset point
  int clamped_count = 0;   // unlabelled points whose radicand was < 0
  double jitter = 0.0;     // jitter used for K_SS
};

// Selected points are set to exactly 0; negative radicands clamp to 0.
PowerProfile ComputePowerProfile(const GramMatrix& k, const SelectionMask& mask);

// Explicit Schur complement K/K_SS over the unlabelled points, in ascending
// index order.
Eigen::MatrixXd SchurComplement(const GramMatrix& k, const SelectionMask& mask);

double TedObjective(const GramMatrix& k, const SelectionMask& mask,
                    double ridge = 0.0);

// Sum of the power profile over the dataset.
double TedHalf(const GramMatrix& k, const SelectionMask& mask);
double TedHalf(const PowerProfile& profile);

// K_{.S} K_SS^{-1} targets for an M x C matrix of values at the selected
// points (in mask order). Rows at selected points reproduce `targets`
// exactly. Rows are not renormalized.
Eigen::MatrixXd ProjectionEstimate(const GramMatrix& k,
                                   const SelectionMask& mask,
                                   const Eigen::MatrixXd& targets);

// One-hot rows for the labels of the selected points, in mask order.
Eigen::MatrixXd SelectedOneHot(const SelectionMask& mask,
                               const std::vector<int>& labels, int class_count);

// Clamps every entry into [0, 1].
Eigen::MatrixXd ClampUnit(const Eigen::MatrixXd& m);

struct EpsHTerms {
  Eigen::VectorXd coefficients;  // <p_c, phi_i> under the empirical measure
  double null_mass = 0.0;        // ||p_c||^2 - sum_i <p_c, phi_i>^2, >= 0
  double value = 0.0;
};

EpsHTerms DecomposeEpsH(const SpectralModel& spectrum,
                        const ConditionalDistribution& p, int class_index);

// sqrt(sum_i a_i^2 (1 - lambda_i)^2 + null_mass).
double EpsHFromCoefficients(const Eigen::VectorXd& coefficients,
                            const Eigen::VectorXd& eigenvalues,
                            double null_mass);

double EpsH(const SpectralModel& spectrum, const ConditionalDistribution& p,
            int class_index);

struct BoundReport {
  double ted_half = 0.0;
  double trace_k = 0.0;
  std::vector<double> eps_h_per_class;
  std::vector<double> null_mass_per_class;
  double first_term = 0.0;  // ted_half / (2N) * sqrt(trace_k)
  double total = 0.0;       // first_term + 1/2 sum_c eps_h
  // Variant for posteriors inside the RKHS; set only when every class has
  // null mass <= kRkhsNullMassTolerance.
  std::optional<double> rkhs_variant;
  int clamped_count = 0;
  double jitter = 0.0;
};

inline constexpr double kRkhsNullMassTolerance = 1e-6;

BoundReport ComputeBoundReport(const GramMatrix& k, const SelectionMask& mask,
                               const SpectralModel& spectrum,
                               const ConditionalDistribution& p);

// Checks |Tp(x) - proj Tp(x)| <= |P(x)| sqrt(Tr k) p(y=c) at every point,
// with Tp = K p_c / N. Returns max_x (lhs - rhs).
double PointwiseProjectionBoundCheck(const GramMatrix& k,
                                     const SelectionMask& mask,
                                     const SpectralModel& spectrum,
                                     const ConditionalDistribution& p,
                                     int class_index);

}  // namespace datasel

#endif  // DATASEL_APPROX_H_
