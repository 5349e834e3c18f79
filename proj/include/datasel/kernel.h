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

// Kernel functions, Gram matrices, and the guarded Cholesky machinery every
// K_SS inversion goes through.

#ifndef DATASEL_KERNEL_H_
#define DATASEL_KERNEL_H_

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace datasel {

enum class KernelFamily { kLinear, kRbf, kCosine, kPolynomial };

std::string KernelFamilyName(KernelFamily family);
// Accepts "linear", "rbf", "cosine", "poly"/"polynomial".
KernelFamily ParseKernelFamily(std::string_view name);

struct KernelSpec {
  KernelFamily family = KernelFamily::kRbf;
  double gamma = 1.0;   // rbf only
  int degree = 2;       // polynomial only
  double coef0 = 1.0;   // polynomial only
  double scale = 1.0;   // multiplies every kernel value

  static KernelSpec Linear();
  static KernelSpec Rbf(double gamma);
  static KernelSpec Cosine();
  static KernelSpec Polynomial(int degree, double coef0);

  void Validate() const;
  // scale * k_base(x, y).
  double Evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                  const Eigen::Ref<const Eigen::RowVectorXd>& y) const;
};

// 1 / (d * Var(features)), the variance taken over all entries.
double DefaultRbfGamma(const Eigen::MatrixXd& features);

// Multiplies the scale by c > 0.
KernelSpec Rescale(const KernelSpec& spec, double c);

struct GramMatrix {
  Eigen::MatrixXd values;
  // Smallest rung of the jitter ladder at which values + jitter * I admits a
  // Cholesky factorization. The stored values never include it.
  double jitter = 0.0;

  Eigen::Index size() const { return values.rows(); }
};

// Square Gram matrix over the rows of `points`, exactly symmetric. Throws
// NumericalError if it is not PSD even at the top of the jitter ladder.
GramMatrix Gram(const KernelSpec& spec, const Eigen::MatrixXd& points);
// Cross block K(a, b), rows of a against rows of b.
Eigen::MatrixXd CrossGram(const KernelSpec& spec, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& b);

// Principal submatrix K(rows, cols).
Eigen::MatrixXd Submatrix(const Eigen::MatrixXd& k, const std::vector<int>& rows,
                          const std::vector<int>& cols);

// {0, 1e-10, 1e-8, 1e-6} times mean(diag(k)).
std::vector<double> JitterLadder(const Eigen::MatrixXd& k);

// Cholesky factorization of a symmetric PSD matrix that walks the jitter
// ladder until the factorization succeeds.
class CholeskySolver {
 public:
  // Throws NumericalError("... numerically singular ...") when every rung
  // fails. `what` names the caller in the message.
  explicit CholeskySolver(const Eigen::MatrixXd& matrix,
                          std::string_view what = "stable_inverse_apply");

  double jitter() const { return jitter_; }
  Eigen::Index size() const { return llt_.rows(); }

  // A^{-1} rhs. When jitter was needed, the jittered solve is followed by
  // iterative refinement against the unshifted A (until the residual stops
  // shrinking, at most 20 steps), which for rhs
  // in the range of a singular A converges to the pseudo-inverse solution.
  Eigen::MatrixXd Solve(const Eigen::MatrixXd& rhs) const;
  // rhs_j^T A^{-1} rhs_j for every column j.
  Eigen::VectorXd QuadraticForms(const Eigen::MatrixXd& rhs) const;
  // L^{-1} rhs where A + jitter I = L L^T, so that
  // rhs^T (A + jitter I)^{-1} rhs = ||L^{-1} rhs||^2 column-wise.
  Eigen::MatrixXd HalfSolve(const Eigen::MatrixXd& rhs) const;
  // diag((A + jitter I)^{-1}).
  Eigen::VectorXd InverseDiagonal() const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::MatrixXd matrix_;  // kept only when jitter_ > 0
  double jitter_ = 0.0;
};

struct InverseApplyResult {
  Eigen::MatrixXd solution;
  double jitter = 0.0;
  double residual = 0.0;  // ||K x - rhs||_inf against the unjittered K
};

// K_SS^{-1} rhs through the jitter ladder.
InverseApplyResult StableInverseApply(const Eigen::MatrixXd& k_ss,
                                      const Eigen::MatrixXd& rhs);

// diag(K^{-1}) through the jitter ladder.
Eigen::VectorXd InverseDiagonal(const Eigen::MatrixXd& k);

// Empirical Mercer system of the integral operator under the empirical
// measure: eigenvalues of K/N (descending), eigenfunction values sqrt(N) * U
// at the data points, so that (1/N) sum_x phi_i(x) phi_j(x) = delta_ij.
struct SpectralModel {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenfunctions;  // N x r

  int rank() const { return static_cast<int>(eigenvalues.size()); }
  int points() const { return static_cast<int>(eigenfunctions.rows()); }
  // Empirical Tr(k) = sum of retained eigenvalues.
  double Trace() const { return eigenvalues.sum(); }
};

inline constexpr double kDefaultSpectralTolerance = 1e-12;

// Keeps components with lambda_i > tol * lambda_1 (and lambda_i > 0).
SpectralModel ComputeSpectralModel(const GramMatrix& k,
                                   double tol = kDefaultSpectralTolerance);

// Row-major CSV of the matrix entries with 17 significant digits.
std::string FormatMatrixCsv(const Eigen::MatrixXd& m);

}  // namespace datasel

#endif  // DATASEL_KERNEL_H_
