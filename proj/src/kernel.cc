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

#include "datasel/kernel.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "datasel/error.h"
#include "datasel/format.h"

namespace datasel {

namespace {

void CheckCosineRows(const Eigen::MatrixXd& points) {
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    if (points.row(i).squaredNorm() == 0.0) {
      throw InvalidArgument("gram: cosine kernel undefined for zero-norm row " +
                            std::to_string(i));
    }
  }
}

double BaseKernel(const KernelSpec& spec,
                  const Eigen::Ref<const Eigen::RowVectorXd>& x,
                  const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  switch (spec.family) {
    case KernelFamily::kLinear:
      return x.dot(y);
    case KernelFamily::kRbf:
      return std::exp(-spec.gamma * (x - y).squaredNorm());
    case KernelFamily::kCosine: {
      const double norms = x.norm() * y.norm();
      if (norms == 0.0) {
        throw InvalidArgument("gram: cosine kernel undefined for zero vector");
      }
      return x.dot(y) / norms;
    }
    case KernelFamily::kPolynomial:
      return std::pow(x.dot(y) + spec.coef0, spec.degree);
  }
  return 0.0;
}

constexpr int kMaxRefinementSteps = 20;

}  // namespace

std::string KernelFamilyName(KernelFamily family) {
  switch (family) {
    case KernelFamily::kLinear:
      return "linear";
    case KernelFamily::kRbf:
      return "rbf";
    case KernelFamily::kCosine:
      return "cosine";
    case KernelFamily::kPolynomial:
      return "poly";
  }
  return "unknown";
}

KernelFamily ParseKernelFamily(std::string_view name) {
  if (name == "linear") return KernelFamily::kLinear;
  if (name == "rbf") return KernelFamily::kRbf;
  if (name == "cosine") return KernelFamily::kCosine;
  if (name == "poly" || name == "polynomial") return KernelFamily::kPolynomial;
  throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
}

KernelSpec KernelSpec::Linear() {
  KernelSpec spec;
  spec.family = KernelFamily::kLinear;
  return spec;
}

KernelSpec KernelSpec::Rbf(double gamma) {
  KernelSpec spec;
  spec.family = KernelFamily::kRbf;
  spec.gamma = gamma;
  spec.Validate();
  return spec;
}

KernelSpec KernelSpec::Cosine() {
  KernelSpec spec;
  spec.family = KernelFamily::kCosine;
  return spec;
}

KernelSpec KernelSpec::Polynomial(int degree, double coef0) {
  KernelSpec spec;
  spec.family = KernelFamily::kPolynomial;
  spec.degree = degree;
  spec.coef0 = coef0;
  spec.Validate();
  return spec;
}

void KernelSpec::Validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("kernel: scale must be positive");
  }
  if (family == KernelFamily::kRbf && (!(gamma > 0.0) || !std::isfinite(gamma))) {
    throw InvalidArgument("kernel: rbf gamma must be positive");
  }
  if (family == KernelFamily::kPolynomial) {
    if (degree < 1) throw InvalidArgument("kernel: polynomial degree must be >= 1");
    if (!(coef0 >= 0.0)) throw InvalidArgument("kernel: polynomial coef0 must be >= 0");
  }
}

double KernelSpec::Evaluate(const Eigen::Ref<const Eigen::RowVectorXd>& x,
                            const Eigen::Ref<const Eigen::RowVectorXd>& y) const {
  return scale * BaseKernel(*this, x, y);
}

double DefaultRbfGamma(const Eigen::MatrixXd& features) {
  const double mean = features.mean();
  const double variance =
      (features.array() - mean).square().sum() / static_cast<double>(features.size());
  if (!(variance > 0.0)) return 1.0;
  return 1.0 / (static_cast<double>(features.cols()) * variance);
}

KernelSpec Rescale(const KernelSpec& spec, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("rescale: factor must be positive");
  }
  KernelSpec out = spec;
  out.scale = spec.scale * c;
  return out;
}

GramMatrix Gram(const KernelSpec& spec, const Eigen::MatrixXd& points) {
  spec.Validate();
  if (spec.family == KernelFamily::kCosine) CheckCosineRows(points);
  const Eigen::Index n = points.rows();
  GramMatrix gram;
  gram.values.resize(n, n);
  // Upper triangle then mirror: k is symmetric in its arguments, so this is
  // exactly (K + K^T) / 2 of the full evaluation.
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double v = spec.Evaluate(points.row(i), points.row(j));
      gram.values(i, j) = v;
      gram.values(j, i) = v;
    }
  }
  if (!gram.values.allFinite()) {
    throw NumericalError("gram: non-finite kernel entry");
  }
  if (n > 0) gram.jitter = CholeskySolver(gram.values, "gram").jitter();
  return gram;
}

Eigen::MatrixXd CrossGram(const KernelSpec& spec, const Eigen::MatrixXd& a,
                          const Eigen::MatrixXd& b) {
  spec.Validate();
  if (a.cols() != b.cols()) {
    throw InvalidArgument("gram: dimension mismatch (" +
                          std::to_string(a.cols()) + " vs " +
                          std::to_string(b.cols()) + ")");
  }
  if (spec.family == KernelFamily::kCosine) {
    CheckCosineRows(a);
    CheckCosineRows(b);
  }
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      k(i, j) = spec.Evaluate(a.row(i), b.row(j));
    }
  }
  if (!k.allFinite()) throw NumericalError("gram: non-finite kernel entry");
  return k;
}

Eigen::MatrixXd Submatrix(const Eigen::MatrixXd& k, const std::vector<int>& rows,
                          const std::vector<int>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j) {
    for (size_t i = 0; i < rows.size(); ++i) {
      out(i, j) = k(rows[i], cols[j]);
    }
  }
  return out;
}

std::vector<double> JitterLadder(const Eigen::MatrixXd& k) {
  std::vector<double> ladder = {0.0};
  if (k.rows() == 0) return ladder;
  const double mean_diag = k.diagonal().mean();
  if (!(mean_diag > 0.0) || !std::isfinite(mean_diag)) return ladder;
  for (double rel : {1e-10, 1e-8, 1e-6}) ladder.push_back(rel * mean_diag);
  return ladder;
}

CholeskySolver::CholeskySolver(const Eigen::MatrixXd& matrix,
                               std::string_view what) {
  if (matrix.rows() != matrix.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix is not square");
  }
  const Eigen::Index n = matrix.rows();
  const double mean_diag = n > 0 ? matrix.diagonal().mean() : 0.0;
  // Squared pivots below the accumulated rounding level of the elimination
  // carry no information; such a factorization counts as a failure.
  const double pivot_floor = static_cast<double>(n) *
                             std::numeric_limits<double>::epsilon() *
                             std::max(mean_diag, 0.0);
  for (double jitter : JitterLadder(matrix)) {
    Eigen::MatrixXd shifted = matrix;
    shifted.diagonal().array() += jitter;
    llt_.compute(shifted);
    if (llt_.info() == Eigen::Success) {
      const Eigen::MatrixXd& l = llt_.matrixLLT();
      bool ok = true;
      for (Eigen::Index i = 0; i < n && ok; ++i) {
        ok = l(i, i) * l(i, i) > pivot_floor;
      }
      if (ok) {
        jitter_ = jitter;
        if (jitter > 0.0) matrix_ = matrix;
        return;
      }
    }
  }
  throw NumericalError(std::string(what) +
                       ": numerically singular K_SS (Cholesky failed at max "
                       "jitter)");
}

Eigen::MatrixXd CholeskySolver::Solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != llt_.rows()) {
    throw InvalidArgument("stable_inverse_apply: rhs row count mismatch");
  }
  Eigen::MatrixXd x = llt_.solve(rhs);
  if (jitter_ > 0.0) {
    Eigen::MatrixXd residual = rhs - matrix_ * x;
    double norm = residual.norm();
    for (int step = 0; step < kMaxRefinementSteps && norm > 0.0; ++step) {
      const Eigen::MatrixXd next = x + llt_.solve(residual);
      Eigen::MatrixXd next_residual = rhs - matrix_ * next;
      const double next_norm = next_residual.norm();
      if (!(next_norm < norm)) break;
      x = next;
      residual = std::move(next_residual);
      norm = next_norm;
    }
  }
  return x;
}

Eigen::VectorXd CholeskySolver::QuadraticForms(const Eigen::MatrixXd& rhs) const {
  if (jitter_ == 0.0) return HalfSolve(rhs).colwise().squaredNorm().transpose();
  return (rhs.array() * Solve(rhs).array()).colwise().sum().transpose();
}

Eigen::MatrixXd CholeskySolver::HalfSolve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != llt_.rows()) {
    throw InvalidArgument("stable_inverse_apply: rhs row count mismatch");
  }
  return llt_.matrixL().solve(rhs);
}

Eigen::VectorXd CholeskySolver::InverseDiagonal() const {
  const Eigen::Index n = llt_.rows();
  // diag(A^{-1})_i = ||L^{-1} e_i||^2.
  Eigen::MatrixXd l_inv = llt_.matrixL().solve(Eigen::MatrixXd::Identity(n, n));
  return l_inv.colwise().squaredNorm().transpose();
}

InverseApplyResult StableInverseApply(const Eigen::MatrixXd& k_ss,
                                      const Eigen::MatrixXd& rhs) {
  CholeskySolver solver(k_ss, "stable_inverse_apply");
  InverseApplyResult result;
  result.solution = solver.Solve(rhs);
  result.jitter = solver.jitter();
  result.residual =
      rhs.size() == 0 ? 0.0
                      : (k_ss * result.solution - rhs).cwiseAbs().maxCoeff();
  return result;
}

Eigen::VectorXd InverseDiagonal(const Eigen::MatrixXd& k) {
  return CholeskySolver(k, "inverse_diagonal").InverseDiagonal();
}

SpectralModel ComputeSpectralModel(const GramMatrix& k, double tol) {
  const Eigen::Index n = k.size();
  if (n == 0 || k.values.cols() != n) {
    throw InvalidArgument("spectral_model: need a non-empty square Gram matrix");
  }
  if (!(tol >= 0.0)) throw InvalidArgument("spectral_model: tol must be >= 0");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.values);
  if (eig.info() != Eigen::Success) {
    throw NumericalError("spectral_model: eigensolver did not converge");
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::VectorXd& ascending = eig.eigenvalues();
  const double top = ascending(n - 1) * inv_n;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const double lambda = ascending(i) * inv_n;
    if (lambda > 0.0 && lambda > tol * top) kept.push_back(i);
  }
  SpectralModel model;
  model.eigenvalues.resize(kept.size());
  model.eigenfunctions.resize(n, kept.size());
  const double root_n = std::sqrt(static_cast<double>(n));
  for (size_t r = 0; r < kept.size(); ++r) {
    model.eigenvalues(r) = ascending(kept[r]) * inv_n;
    model.eigenfunctions.col(r) = root_n * eig.eigenvectors().col(kept[r]);
  }
  return model;
}

std::string FormatMatrixCsv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += FormatDouble(m(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace datasel
