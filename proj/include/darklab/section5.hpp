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

// Three-mode benchmark: modes a_1, a_2, a_3 coupled to two channels through
// L_1 = a_1 + a_2 and L_2 = a_2 + a_3, with a single target dark oscillator
// of mass m and frequency w. The literal matrices below are the published
// closed forms used as golden values.

#include <cmath>
#include <complex>
#include <vector>

#include "darklab/kernel.hpp"
#include "darklab/synthesis.hpp"
#include "darklab/system.hpp"

namespace darklab::section5 {

/// Complex coupling vectors: L_j = v_j^T x with a_k = (x_k + i p_k) / sqrt(2).
inline std::vector<ComplexVector> coupling_vectors() {
  const std::complex<double> one(1.0, 0.0), i(0.0, 1.0);
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v1 = ComplexVector::Zero(6), v2 = ComplexVector::Zero(6);
  v1 << s * one, s * i, s * one, s * i, 0.0, 0.0;
  v2 << 0.0, 0.0, s * one, s * i, s * one, s * i;
  return {v1, v2};
}

inline Matrix coupling() { return build_v(coupling_vectors()); }

/// gamma_1(t) = exp(-t), gamma_2(t) = exp(-2t) / 2.
inline std::vector<Kernel> kernels() {
  return {ExponentialKernel{1.0, 1.0}, ExponentialKernel{0.5, 2.0}};
}

inline Matrix omega_dark(double m, double w) {
  require(m > 0.0 && w > 0.0, ErrorKind::InvalidArgument, "m and omega must be positive");
  Matrix od = Matrix::Zero(2, 2);
  od(0, 0) = m * w * w;
  od(1, 1) = 1.0 / m;
  return od;
}

inline SynthesisTarget target(double m, double w) { return SynthesisTarget{omega_dark(m, w), {}, {}}; }

/// Closed-form Hamiltonian: entries +-1/(3m) on the x-x block pattern and
/// +-m w^2/3 on the p-p block pattern.
inline Matrix closed_form_omega(double m, double w) {
  const double a = 1.0 / (3.0 * m);
  const double b = m * w * w / 3.0;
  Matrix o(6, 6);
  // clang-format off
  o <<  a, 0, -a,  0,  a,  0,
        0, b,  0, -b,  0,  b,
       -a, 0,  a,  0, -a,  0,
        0,-b,  0,  b,  0, -b,
        a, 0, -a,  0,  a,  0,
        0, b,  0, -b,  0,  b;
  // clang-format on
  return o;
}

inline SystemSpec system(double m, double w) {
  return make_system(closed_form_omega(m, w), coupling(), kernels());
}

inline Matrix reference_s_d() {
  const double r = 1.0 / std::sqrt(3.0);
  Matrix s(2, 6);
  // clang-format off
  s << 0, -r, 0,  r, 0, -r,
       r,  0, -r, 0, r,  0;
  // clang-format on
  return s;
}

inline Matrix reference_s_b() {
  const double p = 1.0 / std::sqrt(6.0), q = 1.0 / std::sqrt(2.0);
  Matrix s(4, 6);
  // clang-format off
  s <<  p, 0, 2 * p, 0,     p, 0,
        0, p, 0,     2 * p, 0, p,
       -q, 0, 0,     0,     q, 0,
        0,-q, 0,     0,     0, q;
  // clang-format on
  return s;
}

inline Matrix reference_s() {
  Matrix s(6, 6);
  s << reference_s_d(), reference_s_b();
  return s;
}

inline Matrix a_h_dark(double m, double w) {
  Matrix a(2, 2);
  a << 0.0, 1.0 / m, -m * w * w, 0.0;
  return a;
}

inline Matrix b2() {
  const double p = 3.0 / std::sqrt(6.0), q = 1.0 / std::sqrt(2.0);
  Matrix b(4, 4);
  // clang-format off
  b << -p, 0, -p, 0,
        0,-p,  0,-p,
        q, 0, -q, 0,
        0, q,  0,-q;
  // clang-format on
  return b;
}

inline Matrix v2() {
  const double p = 3.0 / std::sqrt(6.0), q = 1.0 / std::sqrt(2.0);
  Matrix v(4, 4);
  // clang-format off
  v << p, 0, -q, 0,
       0, p,  0,-q,
       p, 0,  q, 0,
       0, p,  0, q;
  // clang-format on
  return v;
}

/// Bright block of S A_Gamma(t) S^{-1} for real gamma_1, gamma_2.
inline Matrix a_gamma_bright(double g1, double g2) {
  const double f1 = -1.5 * (g1 + g2);
  const double f2 = 0.5 * std::sqrt(3.0) * (g1 - g2);
  const double f3 = -0.5 * (g1 + g2);
  Matrix a(4, 4);
  // clang-format off
  a << f1, 0, f2, 0,
       0, f1, 0, f2,
       f2, 0, f3, 0,
       0, f2, 0, f3;
  // clang-format on
  return a;
}

}  // namespace darklab::section5
