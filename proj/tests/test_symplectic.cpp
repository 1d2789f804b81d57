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

#include <gtest/gtest.h>

#include "darklab/section5.hpp"
#include "darklab/symplectic.hpp"
#include "oracles.hpp"

namespace darklab {
namespace {

TEST(JMatrix, MatchesEntrywiseDefinition) {
  for (Index n = 1; n <= 5; ++n) EXPECT_EQ(j_matrix(n), oracle::j(n));
}

TEST(JMatrix, SquaresToMinusIdentityAndIsOrthogonal) {
  const Matrix j = j_matrix(3);
  EXPECT_LE((j * j + Matrix::Identity(6, 6)).norm(), 0.0);
  EXPECT_LE((j.transpose() * j - Matrix::Identity(6, 6)).norm(), 0.0);
  EXPECT_LE((j.transpose() + j).norm(), 0.0);
}

TEST(JMatrix, RejectsZeroModes) { EXPECT_THROW(j_matrix(0), Error); }

TEST(ApplyJ, AgreesWithMultiplication) {
  oracle::Rng rng(1);
  const Matrix x = oracle::gaussian(rng, 6, 4);
  EXPECT_LE((apply_j(x) - oracle::j(3) * x).norm(), 1e-15);
  EXPECT_THROW(apply_j(Matrix::Zero(3, 1)), Error);
}

TEST(SymplecticForm, IsAntisymmetricAndMatchesDefinition) {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector x = oracle::gaussian(rng, 4, 1), y = oracle::gaussian(rng, 4, 1);
    EXPECT_NEAR(sympl_form(x, y), -sympl_form(y, x), 1e-14);
    EXPECT_NEAR(sympl_form(x, y), x.dot(oracle::j(2) * y), 1e-14);
    EXPECT_EQ(sympl_form(x, x), 0.0);
  }
  EXPECT_THROW(sympl_form(Vector::Zero(4), Vector::Zero(2)), Error);
}

TEST(SymplecticComplement, DimensionsAddUp) {
  oracle::Rng rng(3);
  for (Index n = 1; n <= 3; ++n) {
    for (Index d = 0; d <= 2 * n; ++d) {
      const SubspaceBasis w = SubspaceBasis::span(oracle::gaussian(rng, 2 * n, d));
      const SubspaceBasis c = symplectic_complement(w);
      EXPECT_EQ(w.dim() + c.dim(), 2 * n);
      // Every complement vector is omega-orthogonal to W.
      if (!c.empty() && !w.empty()) {
        EXPECT_LE((w.columns().transpose() * oracle::j(n) * c.columns()).norm(), 1e-12);
      }
    }
  }
}

TEST(Radical, LagrangianIsItsOwnRadical) {
  // span(x_1, x_2) is isotropic of maximal dimension.
  Matrix b = Matrix::Zero(4, 2);
  b(0, 0) = 1.0;
  b(2, 1) = 1.0;
  const SubspaceBasis w = SubspaceBasis::span(b);
  EXPECT_TRUE(radical(w).same_as(w, 1e-12));
  EXPECT_FALSE(is_symplectic_subspace(w));
}

TEST(Radical, SymplecticSubspaceHasNone) {
  Matrix b = Matrix::Zero(4, 2);
  b(0, 0) = 1.0;
  b(1, 1) = 1.0;
  const SubspaceBasis w = SubspaceBasis::span(b);
  EXPECT_TRUE(radical(w).empty());
  EXPECT_TRUE(is_symplectic_subspace(w));
}

TEST(Radical, MixedSubspace) {
  // span(x_1, p_1, x_2): radical is span(x_2).
  Matrix b = Matrix::Zero(4, 3);
  b(0, 0) = b(1, 1) = b(2, 2) = 1.0;
  const SubspaceBasis rad = radical(SubspaceBasis::span(b));
  ASSERT_EQ(rad.dim(), 1);
  EXPECT_NEAR(std::abs(rad.columns()(2, 0)), 1.0, 1e-12);
}

TEST(GramSchmidt, ProducesSymplecticBasisOfRandomSubspaces) {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 4;
    const Index d = 2 * (1 + trial % n);
    const SubspaceBasis w = SubspaceBasis::span(oracle::gaussian(rng, 2 * n, d));
    const SymplecticBasis basis = symplectic_gram_schmidt(w);
    ASSERT_EQ(basis.pairs.cols(), d);
    const Matrix gram = basis.pairs.transpose() * oracle::j(n) * basis.pairs;
    EXPECT_LE((gram - oracle::j(d / 2)).norm(), 1e-10);
    EXPECT_TRUE(w.contains(basis.pairs, 1e-10));
    EXPECT_NEAR(sympl_form(basis.e(0), basis.f(0)), 1.0, 1e-12);
  }
}

TEST(GramSchmidt, RejectsOddAndDegenerateInput) {
  oracle::Rng rng(5);
  EXPECT_THROW(symplectic_gram_schmidt(SubspaceBasis::span(oracle::gaussian(rng, 4, 3))), Error);
  Matrix iso = Matrix::Zero(4, 2);
  iso(0, 0) = iso(2, 1) = 1.0;
  try {
    symplectic_gram_schmidt(SubspaceBasis::span(iso));
    FAIL() << "expected DegenerateSubspace";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSubspace);
  }
  try {
    symplectic_gram_schmidt(SubspaceBasis::span(oracle::gaussian(rng, 6, 3)));
    FAIL() << "expected OddDimension";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OddDimension);
  }
}

TEST(SymplecticMatrix, RandomExponentialsAreSymplecticAndInvertible) {
  oracle::Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + trial % 3;
    const Matrix s = oracle::symplectic(rng, n);
    EXPECT_LE(is_symplectic_matrix(s), 1e-11);
    const Matrix inv = symplectic_inverse(s);
    EXPECT_LE((inv * s - Matrix::Identity(2 * n, 2 * n)).norm(), 1e-10);
    EXPECT_LE((inv - s.inverse()).norm(), 1e-9 * std::max(1.0, s.inverse().norm()));
  }
}

TEST(SymplecticMatrix, InverseRejectsNonSymplectic) {
  Matrix s = Matrix::Identity(4, 4);
  s(0, 0) = 2.0;
  try {
    symplectic_inverse(s);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotSymplectic);
  }
}

TEST(SymplecticMatrix, BenchmarkTransformIsOrthogonalAndSymplectic) {
  const Matrix s = section5::reference_s();
  EXPECT_LE(is_symplectic_matrix(s), 1e-15);
  EXPECT_LE((s * s.transpose() - Matrix::Identity(6, 6)).norm(), 1e-15);
}

TEST(AdaptedBasis, OrthonormalAndPairedByJ) {
  oracle::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 2 + trial % 2;
    const Matrix q = oracle::orthosymplectic(rng, n);
    const SubspaceBasis h = SubspaceBasis::span(q.leftCols(2 * (n - 1)));
    const Matrix b = orthonormal_jn_adapted_basis(h);
    EXPECT_LE((b.transpose() * b - Matrix::Identity(b.cols(), b.cols())).norm(), 1e-12);
    for (Index i = 0; i < b.cols() / 2; ++i) {
      EXPECT_LE((oracle::j(n) * b.col(2 * i) - b.col(2 * i + 1)).norm(), 1e-12);
    }
    EXPECT_TRUE(h.same_as(SubspaceBasis::span(b), 1e-10));
  }
}

TEST(AdaptedBasis, BenchmarkCapacityPicksFirstCoordinate) {
  // H_D = span(u_1, u_2) with u_1 = (1,0,-1,0,1,0), u_2 = (0,1,0,-1,0,1).
  Matrix u = Matrix::Zero(6, 2);
  u.col(0) << 1, 0, -1, 0, 1, 0;
  u.col(1) << 0, 1, 0, -1, 0, 1;
  const Matrix b = orthonormal_jn_adapted_basis(SubspaceBasis::span(u));
  EXPECT_LE((b.col(0) - u.col(0) / std::sqrt(3.0)).norm(), 1e-14);
}

TEST(AdaptedBasis, RejectsNonInvariant) {
  Matrix x = Matrix::Zero(4, 2);
  x(0, 0) = x(2, 1) = 1.0;
  try {
    orthonormal_jn_adapted_basis(SubspaceBasis::span(x));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotInvariant);
  }
}

}  // namespace
}  // namespace darklab
