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

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "darklab/errors.hpp"
#include "darklab/subspace.hpp"

namespace darklab {

/// Half-dimension n of the phase space R^{2n}.
class SymplecticDim {
 public:
  explicit SymplecticDim(Index n) : n_(n) {
    require(n >= 1, ErrorKind::InvalidArgument, "symplectic dimension n must be >= 1");
  }
  Index n() const { return n_; }
  Index ambient() const { return 2 * n_; }

 private:
  Index n_;
};

/// J_n = I_n (x) [[0, 1], [-1, 0]].
inline Matrix j_matrix(SymplecticDim dim) {
  Matrix j = Matrix::Zero(dim.ambient(), dim.ambient());
  for (Index i = 0; i < dim.n(); ++i) {
    j(2 * i, 2 * i + 1) = 1.0;
    j(2 * i + 1, 2 * i) = -1.0;
  }
  return j;
}

inline Matrix j_matrix(Index n) { return j_matrix(SymplecticDim(n)); }

/// Applies J_n to the columns of `x` without forming J_n.
inline Matrix apply_j(const Matrix& x) {
  require(x.rows() % 2 == 0, ErrorKind::DimensionMismatch,
          "J_n acts on even-dimensional vectors");
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); i += 2) {
    out.row(i) = x.row(i + 1);
    out.row(i + 1) = -x.row(i);
  }
  return out;
}

/// omega_n(x, y) = x^T J_n y.
inline double sympl_form(const Vector& x, const Vector& y) {
  require(x.size() == y.size(), ErrorKind::DimensionMismatch,
          "symplectic form arguments differ in length");
  require(x.size() % 2 == 0 && x.size() > 0, ErrorKind::DimensionMismatch,
          "symplectic form needs even-length vectors");
  return x.dot(apply_j(y).col(0));
}

/// Gram matrix of the symplectic form on the columns of `b`: B^T J_n B.
inline Matrix symplectic_gram(const Matrix& b) { return b.transpose() * apply_j(b); }

/// Symplectic orthogonal complement {v : omega(u, v) = 0 for all u in W},
/// computed as Ker(W^T J_n).
inline SubspaceBasis symplectic_complement(const SubspaceBasis& w) {
  require(w.ambient() % 2 == 0, ErrorKind::DimensionMismatch,
          "symplectic complement needs an even ambient dimension");
  if (w.empty()) return SubspaceBasis::whole(w.ambient(), w.tol());
  const Matrix constraint = apply_j(w.columns()).transpose() * -1.0;  // W^T J
  return SubspaceBasis::from_orthonormal(null_space(constraint, w.tol()),
                                         w.tol());
}

/// W intersected with its symplectic complement. Computed from the null space
/// of the Gram matrix W^T J_n W, which is the same subspace.
inline SubspaceBasis radical(const SubspaceBasis& w) {
  if (w.empty()) return w;
  const Matrix coeffs = null_space(symplectic_gram(w.columns()), w.tol());
  return SubspaceBasis::span(w.columns() * coeffs, w.tol());
}

inline bool is_symplectic_subspace(const SubspaceBasis& w) {
  return radical(w).empty();
}

/// Columns (e_1, f_1, ..., e_l, f_l) with T^T J_n T = J_l.
struct SymplecticBasis {
  Matrix pairs;

  Index l() const { return pairs.cols() / 2; }
  Vector e(Index i) const { return pairs.col(2 * i); }
  Vector f(Index i) const { return pairs.col(2 * i + 1); }
  /// Rows of the basis as a 2l x 2n matrix, the layout used for S_D / S_B.
  Matrix rows() const { return pairs.transpose(); }
};

/// Symplectic Gram-Schmidt with pivoting. At each step the pair of remaining
/// candidates with the largest |omega| is taken, scaled to omega(e, f) = 1
/// with |e| = |f|, and removed symplectically from the other candidates,
/// which are then re-orthonormalized.
inline SymplecticBasis symplectic_gram_schmidt(const SubspaceBasis& w) {
  require(w.dim() > 0, ErrorKind::DegenerateSubspace,
          "symplectic basis of the zero subspace requested");
  require(w.dim() % 2 == 0, ErrorKind::OddDimension,
          "symplectic subspaces have even dimension");
  require(radical(w).empty(), ErrorKind::DegenerateSubspace,
          "subspace has a nontrivial radical");

  const Index d = w.dim();
  Matrix cand = w.columns();
  Matrix out(w.ambient(), d);
  const double tol = std::max(w.tol(), 1e3 * kEps);

  for (Index step = 0; step < d / 2; ++step) {
    const Matrix gram = symplectic_gram(cand);
    Index bi = 0, bj = 1;
    double best = -1.0;
    for (Index i = 0; i < gram.rows(); ++i) {
      for (Index j = i + 1; j < gram.cols(); ++j) {
        if (std::abs(gram(i, j)) > best) {
          best = std::abs(gram(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    require(best > tol, ErrorKind::DegenerateSubspace,
            "no symplectically paired vectors remain");

    const double g = gram(bi, bj);
    Vector e = cand.col(bi) / std::sqrt(std::abs(g));
    Vector f = cand.col(bj) * (g > 0 ? 1.0 : -1.0) / std::sqrt(std::abs(g));

    // Remaining candidates, made symplectically orthogonal to e and f:
    // c' = c + omega(f, c) e - omega(e, c) f.
    Matrix rest(cand.rows(), cand.cols() - 2);
    for (Index k = 0, r = 0; k < cand.cols(); ++k) {
      if (k == bi || k == bj) continue;
      const Vector c = cand.col(k);
      rest.col(r++) = c + sympl_form(f, c) * e - sympl_form(e, c) * f;
    }
    if (rest.cols() > 0) {
      // Two passes of symplectic orthogonalization, then a Euclidean QR to
      // keep the candidates well conditioned.
      for (Index k = 0; k < rest.cols(); ++k) {
        const Vector c = rest.col(k);
        rest.col(k) = c + sympl_form(f, c) * e - sympl_form(e, c) * f;
      }
      Eigen::HouseholderQR<Matrix> qr(rest);
      rest = qr.householderQ() * Matrix::Identity(rest.rows(), rest.cols());
    }
    out.col(2 * step) = e;
    out.col(2 * step + 1) = f;
    cand = std::move(rest);
  }
  return SymplecticBasis{std::move(out)};
}

/// Frobenius residual |S J_n S^T - J_n|.
inline double is_symplectic_matrix(const Matrix& s) {
  require(s.rows() == s.cols() && s.rows() % 2 == 0 && s.rows() > 0,
          ErrorKind::DimensionMismatch, "symplectic test needs a square even matrix");
  const Matrix j = j_matrix(s.rows() / 2);
  return (s * j * s.transpose() - j).norm();
}

/// S^{-1} = -J_n S^T J_n for symplectic S.
inline Matrix symplectic_inverse(const Matrix& s, double tol = 1e-9) {
  const double residual = is_symplectic_matrix(s);
  require(residual <= tol * std::max(1.0, s.squaredNorm()), ErrorKind::NotSymplectic,
          "matrix is not symplectic (residual " + std::to_string(residual) + ")");
  const Matrix j = j_matrix(s.rows() / 2);
  return -j * s.transpose() * j;
}

/// Orthonormal basis (v_1, J v_1, ..., v_l, J v_l) of a J_n-invariant subspace.
/// Each v_i is the normalized projection of the standard basis vector with
/// the largest projection onto what remains; ties go to the lowest index.
inline Matrix orthonormal_jn_adapted_basis(const SubspaceBasis& h, double tol = 1e-9) {
  require(h.dim() % 2 == 0, ErrorKind::OddDimension,
          "J_n-invariant subspaces have even dimension");
  const Matrix& q = h.columns();
  if (h.dim() > 0) {
    const double leak = (apply_j(q) - q * (q.transpose() * apply_j(q))).norm();
    require(leak <= tol, ErrorKind::NotInvariant, "subspace is not J_n-invariant");
  }

  const Index m = h.ambient();
  Matrix remaining = q;
  Matrix out(m, h.dim());
  for (Index step = 0; step < h.dim() / 2; ++step) {
    // Projections of e_i onto the remaining subspace are the rows of
    // `remaining`, so their norms pick the pivot.
    const Vector norms = remaining.rowwise().norm();
    const double top = norms.maxCoeff();
    Index pivot = 0;
    while (norms(pivot) < top - 1e-12) ++pivot;

    Vector v = remaining * remaining.row(pivot).transpose();
    v.normalize();
    Vector jv = apply_j(v);
    out.col(2 * step) = v;
    out.col(2 * step + 1) = jv;

    Matrix deflated = remaining - v * (v.transpose() * remaining) -
                      jv * (jv.transpose() * remaining);
    remaining = column_space(deflated, 1e-8);
    require(remaining.cols() == h.dim() - 2 * (step + 1), ErrorKind::NotInvariant,
            "lost dimensions while deflating a J_n-invariant subspace");
  }
  return out;
}

}  // namespace darklab
