// Copyright 2026 The darklab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "darklab/errors.hpp"

namespace darklab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();

// Relative singular-value threshold: max(2n, 2M) * eps. Absolute thresholds
// are this times the spectral scale of the operator being factored.
inline double default_rank_tol(Index ambient_dim, Index channel_dim = 0) {
  return static_cast<double>(std::max<Index>({ambient_dim, channel_dim, 1})) *
         kEps;
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

inline Index numerical_rank(const Matrix& a, double abs_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(a);
  const Vector& s = svd.singularValues();
  return static_cast<Index>((s.array() > abs_tol).count());
}

/// Orthonormal basis of the right null space of `a`; singular values at or
/// below `abs_tol` count as zero.
inline Matrix null_space(const Matrix& a, double abs_tol) {
  const Index cols = a.cols();
  if (a.rows() == 0 || cols == 0) return Matrix::Identity(cols, cols);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Index rank = static_cast<Index>((s.array() > abs_tol).count());
  return svd.matrixV().rightCols(cols - rank);
}

/// Orthonormal basis of the column space of `a`.
inline Matrix column_space(const Matrix& a, double abs_tol) {
  const Index rows = a.rows();
  if (a.cols() == 0 || rows == 0) return Matrix(rows, 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU);
  const Vector& s = svd.singularValues();
  const Index rank = static_cast<Index>((s.array() > abs_tol).count());
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal columns completing `q` (orthonormal) to a basis of the
/// ambient space, via Householder QR so the result is deterministic.
inline Matrix orthonormal_completion(const Matrix& q) {
  const Index n = q.rows();
  const Index d = q.cols();
  if (d == 0) return Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(q);
  Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  return full.rightCols(n - d);
}

/// A linear subspace of R^m stored as orthonormal columns together with the
/// relative rank tolerance used to build it. Equality of subspaces is always
/// decided through projection residuals, never by comparing bases.
class SubspaceBasis {
 public:
  SubspaceBasis() = default;

  static SubspaceBasis zero(Index ambient, double tol = -1.0) {
    return SubspaceBasis(Matrix(ambient, 0), resolve_tol(tol, ambient));
  }

  static SubspaceBasis whole(Index ambient, double tol = -1.0) {
    return SubspaceBasis(Matrix::Identity(ambient, ambient),
                         resolve_tol(tol, ambient));
  }

  /// Column space of `vectors` at relative tolerance `tol` (scaled by the
  /// largest singular value of `vectors`).
  static SubspaceBasis span(const Matrix& vectors, double tol = -1.0) {
    const double rel = resolve_tol(tol, vectors.rows());
    const double scale = spectral_norm(vectors);
    return SubspaceBasis(column_space(vectors, rel * scale), rel);
  }

  /// Wraps columns that are already orthonormal. No check beyond shape.
  static SubspaceBasis from_orthonormal(Matrix q, double tol = -1.0) {
    const double rel = resolve_tol(tol, q.rows());
    return SubspaceBasis(std::move(q), rel);
  }

  const Matrix& columns() const { return q_; }
  Index dim() const { return q_.cols(); }
  Index ambient() const { return q_.rows(); }
  double tol() const { return tol_; }
  bool empty() const { return q_.cols() == 0; }

  Matrix projector() const { return q_ * q_.transpose(); }

  /// Frobenius norm of the component of `x` outside this subspace.
  double containment_residual(const Matrix& x) const {
    require(x.rows() == ambient(), ErrorKind::DimensionMismatch,
            "vector length does not match subspace ambient dimension");
    return (x - q_ * (q_.transpose() * x)).norm();
  }

  bool contains(const Matrix& x, double abs_tol) const {
    return containment_residual(x) <= abs_tol;
  }

  bool contains(const SubspaceBasis& other, double abs_tol) const {
    return other.empty() || contains(other.columns(), abs_tol);
  }

  bool same_as(const SubspaceBasis& other, double abs_tol) const {
    return dim() == other.dim() && contains(other, abs_tol) &&
           other.contains(*this, abs_tol);
  }

  SubspaceBasis with_tol(double tol) const { return SubspaceBasis(q_, tol); }

 private:
  SubspaceBasis(Matrix q, double tol) : q_(std::move(q)), tol_(tol) {}

  static double resolve_tol(double tol, Index ambient) {
    return tol >= 0.0 ? tol : default_rank_tol(ambient);
  }

  Matrix q_;
  double tol_ = 0.0;
};

/// Intersection via the kernel of the stacked constraint [Qa, -Qb].
inline SubspaceBasis intersect(const SubspaceBasis& a, const SubspaceBasis& b) {
  require(a.ambient() == b.ambient(), ErrorKind::DimensionMismatch,
          "intersecting subspaces of different ambient spaces");
  const double tol = std::max(a.tol(), b.tol());
  if (a.empty() || b.empty()) return SubspaceBasis::zero(a.ambient(), tol);
  Matrix stacked(a.ambient(), a.dim() + b.dim());
  stacked << a.columns(), -b.columns();
  const Matrix coeffs = null_space(stacked, tol);
  return SubspaceBasis::span(a.columns() * coeffs.topRows(a.dim()), tol);
}

/// Sum of two subspaces.
inline SubspaceBasis join(const SubspaceBasis& a, const SubspaceBasis& b) {
  require(a.ambient() == b.ambient(), ErrorKind::DimensionMismatch,
          "joining subspaces of different ambient spaces");
  Matrix stacked(a.ambient(), a.dim() + b.dim());
  stacked << a.columns(), b.columns();
  return SubspaceBasis::span(stacked, std::max(a.tol(), b.tol()));
}

/// Euclidean orthogonal complement.
inline SubspaceBasis orthogonal_complement(const SubspaceBasis& w) {
  return SubspaceBasis::from_orthonormal(orthonormal_completion(w.columns()),
                                         w.tol());
}

}  // namespace darklab
