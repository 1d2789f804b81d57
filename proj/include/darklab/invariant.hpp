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

#include "darklab/errors.hpp"
#include "darklab/subspace.hpp"

namespace darklab {

/// Largest A-invariant subspace contained in K, by the fixed-point iteration
///   V_0 = K,  V_{k+1} = V_k intersected with A^{-1}(V_k).
/// The sequence is nested and strictly shrinks until it stops, so it ends
/// after at most dim K steps. Singular values of the leak (I - P) A Q below
/// max(K.tol(), floor) * |A| count as zero. The floor absorbs the rounding in
/// A Q, which grows with the conditioning of A's eigenbasis.
inline constexpr double kInvarianceFloor = 1e-10;

inline SubspaceBasis largest_invariant_subspace_in(const SubspaceBasis& k, const Matrix& a,
                                                   double floor = kInvarianceFloor) {
  require(a.rows() == a.cols() && a.rows() == k.ambient(), ErrorKind::DimensionMismatch,
          "operator and subspace dimensions disagree");
  const double abs_tol = std::max(k.tol(), floor) * spectral_norm(a);
  Matrix q = k.columns();
  while (q.cols() > 0) {
    const Matrix image = a * q;
    const Matrix leak = image - q * (q.transpose() * image);
    const Matrix keep = null_space(leak, abs_tol);
    if (keep.cols() == q.cols()) break;
    // q and keep are orthonormal, so q * keep is too; re-orthonormalize
    // anyway to stop drift over iterations.
    q = column_space(q * keep, 0.5);
  }
  return SubspaceBasis::from_orthonormal(std::move(q), k.tol());
}

/// |(I - P_W) A W|: how far W is from being A-invariant.
inline double invariance_residual(const SubspaceBasis& w, const Matrix& a) {
  if (w.empty()) return 0.0;
  return w.containment_residual(a * w.columns());
}

}  // namespace darklab
