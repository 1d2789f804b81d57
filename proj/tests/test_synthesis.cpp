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

#include "darklab/analysis.hpp"
#include "darklab/section5.hpp"
#include "darklab/synthesis.hpp"
#include "oracles.hpp"

namespace darklab {
namespace {

TEST(Synthesis, BenchmarkReproducesClosedFormHamiltonian) {
  for (const auto& [m, w] : std::vector<std::pair<double, double>>{{1.0, 2.0}, {1.0, 1.0}, {0.5, 3.0}}) {
    const SynthesisResult r =
        synthesize_omega(section5::coupling(), section5::kernels(), section5::target(m, w));
    EXPECT_EQ(r.h_d_dim, 2);
    EXPECT_EQ(r.k(), 1);
    EXPECT_LE((r.omega - section5::closed_form_omega(m, w)).cwiseAbs().maxCoeff(),
              1e-12 * std::max(1.0, m * w * w));
    EXPECT_LE((r.s_d - section5::reference_s_d()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_TRUE(r.certificate.verified);
  }
}

TEST(Synthesis, UnitParametersGiveThirds) {
  const SynthesisResult r =
      synthesize_omega(section5::coupling(), section5::kernels(), section5::target(1.0, 1.0));
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) {
      const double x = std::abs(r.omega(i, j));
      EXPECT_TRUE(x < 1e-14 || std::abs(x - 1.0 / 3.0) < 1e-14) << i << "," << j << " = " << x;
    }
}

TEST(Synthesis, TransformIsOrthogonalAndSymplectic) {
  const SynthesisResult r =
      synthesize_omega(section5::coupling(), section5::kernels(), section5::target(1.0, 2.0));
  const Matrix s = r.certificate.s();
  EXPECT_LE((s * s.transpose() - Matrix::Identity(6, 6)).norm(), 1e-13);
  EXPECT_LE(is_symplectic_matrix(s), 1e-13);
}

TEST(Synthesis, ResidualsVanish) {
  const SynthesisResult r =
      synthesize_omega(section5::coupling(), section5::kernels(), section5::target(2.0, 0.7));
  const SynthesisResiduals res = verify_synthesis(r, section5::coupling(), section5::kernels());
  EXPECT_LE(res.max(), 1e-12);
}

TEST(Synthesis, CapacityIsEnforced) {
  try {
    synthesize_omega(section5::coupling(), section5::kernels(),
                     SynthesisTarget{Matrix::Identity(4, 4), {}, {}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientDarkCapacity);
  }
}

TEST(Synthesis, TargetValidation) {
  auto kind_of = [](const SynthesisTarget& t) {
    try {
      synthesize_omega(section5::coupling(), section5::kernels(), t);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;  // sentinel: no error
  };
  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 1.0;
  EXPECT_EQ(kind_of({asym, {}, {}}), ErrorKind::NonSymmetricTarget);
  EXPECT_EQ(kind_of({Matrix::Identity(3, 3), {}, {}}), ErrorKind::InvalidTarget);
  EXPECT_EQ(kind_of({Matrix::Identity(2, 2), {1, 2, 3, 4, 5}, {}}), ErrorKind::InvalidTarget);
  Matrix bad_alpha = Matrix::Zero(6, 1);
  bad_alpha(0, 0) = 1.0;  // has a component along the dark rows
  EXPECT_EQ(kind_of({Matrix::Identity(2, 2), {1.0}, bad_alpha}), ErrorKind::InvalidTarget);
}

TEST(Synthesis, CapacityIsJInvariant) {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::FeasibleInstance f = oracle::feasible_instance(rng, 3, 1, 1 + trial % 2);
    const SubspaceBasis h = compute_h_d(f.v);
    EXPECT_EQ(h.dim(), 2 * f.k);
    EXPECT_TRUE(h.contains(oracle::j(3) * h.columns(), 1e-10));
    EXPECT_LE((f.v * h.columns()).norm(), 1e-10);
  }
}

TEST(Synthesis, RoundTripThroughDetection) {
  oracle::Rng rng(42);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 2 + trial % 2;
    const Index k = (n == 3 && trial % 4 == 1) ? 2 : 1;
    const Index m = k == 2 ? 1 : 1 + (trial / 2) % 2;
    const oracle::FeasibleInstance f = oracle::feasible_instance(rng, n, m, k, trial % 5 != 0);
    const SynthesisResult r = synthesize_omega(f.v, f.kernels, {f.omega_dark, f.mu, {}});
    ASSERT_TRUE(r.certificate.verified) << "trial " << trial;
    const Verdict verdict = detect_dark_modes(synthesized_system(r, f.v, f.kernels));
    ASSERT_TRUE(verdict.exists()) << "trial " << trial;
    const Matrix target = oracle::j(k) * f.omega_dark;
    EXPECT_LE(oracle::spectrum_distance(oracle::eigenvalues(verdict.certificate().a_d),
                                        oracle::eigenvalues(target)),
              1e-8 * std::max(1.0, target.norm()))
        << "trial " << trial;
  }
}

TEST(Synthesis, FreeParametersDoNotMoveTheDarkMode) {
  oracle::Rng rng(43);
  const oracle::FeasibleInstance f = oracle::feasible_instance(rng, 3, 1, 1);
  const SynthesisResult base = synthesize_omega(f.v, f.kernels, {f.omega_dark, {}, {}});
  const Matrix alpha = orthonormal_completion(base.s_d.transpose());
  // A rotated orthonormal alpha spanning the same complement.
  const Matrix rot = Eigen::HouseholderQR<Matrix>(oracle::gaussian(rng, 4, 4)).householderQ();
  const Matrix alpha2 = alpha * rot;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> mu;
    for (int i = 0; i < 4; ++i) mu.push_back(oracle::uniform(rng, -3.0, 3.0));
    for (const Matrix& a : {alpha, alpha2}) {
      const SynthesisResult r = synthesize_omega(f.v, f.kernels, {f.omega_dark, mu, a});
      EXPECT_LE((r.s_d - base.s_d).norm(), 1e-10);
      EXPECT_LE((r.certificate.a_d - base.certificate.a_d).norm(), 1e-10);
      EXPECT_TRUE(r.certificate.verified);
      EXPECT_GT((r.omega - base.omega).norm(), 1e-3);
    }
  }
}

}  // namespace
}  // namespace darklab
