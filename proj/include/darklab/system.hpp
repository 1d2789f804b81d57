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
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "darklab/errors.hpp"
#include "darklab/kernel.hpp"
#include "darklab/subspace.hpp"
#include "darklab/symplectic.hpp"

namespace darklab {

using ComplexVector = Eigen::VectorXcd;

/// The data (Omega, V, Gamma(t)) that fixes a non-Markovian linear system.
struct SystemSpec {
  Index n = 0;
  Index M = 0;
  Matrix omega;  // 2n x 2n, symmetric
  Matrix v;      // 2M x 2n
  std::vector<Kernel> kernels;
  std::optional<double> tol;  // relative rank tolerance override

  Index dim() const { return 2 * n; }
  Index channels() const { return 2 * M; }

  /// Relative rank tolerance in effect for this system.
  double rank_tol() const { return tol.value_or(default_rank_tol(2 * n, 2 * M)); }
};

/// V = sqrt(2) (Re v_1, Im v_1, ..., Re v_M, Im v_M)^T.
inline Matrix build_v(const std::vector<ComplexVector>& coupling) {
  require(!coupling.empty(), ErrorKind::DimensionMismatch, "no coupling vectors");
  const Index cols = coupling.front().size();
  require(cols > 0 && cols % 2 == 0, ErrorKind::DimensionMismatch,
          "coupling vectors must have even positive length 2n");
  Matrix v(2 * static_cast<Index>(coupling.size()), cols);
  for (std::size_t j = 0; j < coupling.size(); ++j) {
    require(coupling[j].size() == cols, ErrorKind::DimensionMismatch,
            "coupling vectors differ in length");
    const Index r = 2 * static_cast<Index>(j);
    v.row(r) = std::sqrt(2.0) * coupling[j].real().transpose();
    v.row(r + 1) = std::sqrt(2.0) * coupling[j].imag().transpose();
  }
  return v;
}

/// Validates shapes and symmetrizes Omega. An asymmetry above the rank
/// tolerance is reported through `warnings` when given.
inline SystemSpec make_system(Matrix omega, Matrix v, std::vector<Kernel> kernels,
                              std::optional<double> tol = std::nullopt,
                              std::vector<std::string>* warnings = nullptr) {
  require(omega.rows() == omega.cols() && omega.rows() > 0 && omega.rows() % 2 == 0,
          ErrorKind::DimensionMismatch, "omega must be a nonempty 2n x 2n matrix");
  const Index n = omega.rows() / 2;
  require(v.cols() == 2 * n, ErrorKind::DimensionMismatch, "V must have 2n columns");
  require(v.rows() > 0 && v.rows() % 2 == 0, ErrorKind::DimensionMismatch,
          "V must have 2M rows with M >= 1");
  const Index M = v.rows() / 2;
  require(static_cast<Index>(kernels.size()) == M, ErrorKind::DimensionMismatch,
          "expected one memory kernel per channel");
  require(omega.allFinite() && v.allFinite(), ErrorKind::InvalidArgument,
          "omega and V must be finite");
  if (tol) {
    require(*tol >= 0.0 && std::isfinite(*tol), ErrorKind::InvalidArgument,
            "tolerance must be a nonnegative number");
  }

  SystemSpec spec{n, M, std::move(omega), std::move(v), std::move(kernels), tol};
  const double asym = (spec.omega - spec.omega.transpose()).norm();
  const double scale = std::max(1.0, spec.omega.norm());
  if (asym > spec.rank_tol() * scale && warnings != nullptr) {
    warnings->push_back("omega is not symmetric (|omega - omega^T| = " +
                        std::to_string(asym) + "); using (omega + omega^T) / 2");
  }
  spec.omega = 0.5 * (spec.omega + spec.omega.transpose()).eval();
  return spec;
}

/// |A^T J_n + J_n A|; zero exactly when A is a Hamiltonian matrix.
inline double hamiltonian_residual(const Matrix& a) {
  const Matrix j = j_matrix(a.rows() / 2);
  return (a.transpose() * j + j * a).norm();
}

/// A_H, B, V and the kernel-dependent evaluators A_Gamma(t), Gamma_o(t),
/// Gamma_K(t).
class DerivedMatrices {
 public:
  explicit DerivedMatrices(const SystemSpec& spec)
      : n_(spec.n), M_(spec.M), v_(spec.v), kernels_(spec.kernels) {
    const Matrix jn = j_matrix(n_);
    a_h_ = jn * spec.omega;
    b_ = jn * v_.transpose() * j_matrix(M_);
  }

  const Matrix& a_h() const { return a_h_; }
  const Matrix& b() const { return b_; }
  const Matrix& v() const { return v_; }

  /// Gamma_K(t) = Im Gamma (x) I_2 + Re Gamma (x) J.
  Matrix gamma_k(double t) const {
    Matrix g = Matrix::Zero(2 * M_, 2 * M_);
    for (Index j = 0; j < M_; ++j) {
      const std::complex<double> gj = kernels_[static_cast<std::size_t>(j)](t);
      g(2 * j, 2 * j) = gj.imag();
      g(2 * j + 1, 2 * j + 1) = gj.imag();
      g(2 * j, 2 * j + 1) = gj.real();
      g(2 * j + 1, 2 * j) = -gj.real();
    }
    return g;
  }

  /// Gamma_o(t) = Re Gamma (x) I_2 - Im Gamma (x) J.
  Matrix gamma_o(double t) const {
    Matrix g = Matrix::Zero(2 * M_, 2 * M_);
    for (Index j = 0; j < M_; ++j) {
      const std::complex<double> gj = kernels_[static_cast<std::size_t>(j)](t);
      g(2 * j, 2 * j) = gj.real();
      g(2 * j + 1, 2 * j + 1) = gj.real();
      g(2 * j, 2 * j + 1) = -gj.imag();
      g(2 * j + 1, 2 * j) = gj.imag();
    }
    return g;
  }

  /// A_Gamma(t) = J_n V^T Gamma_K(t) V.
  Matrix a_gamma(double t) const { return apply_j(v_.transpose() * gamma_k(t) * v_); }

 private:
  Index n_;
  Index M_;
  Matrix v_;
  std::vector<Kernel> kernels_;
  Matrix a_h_;
  Matrix b_;
};

inline DerivedMatrices derived_matrices(const SystemSpec& spec) { return DerivedMatrices(spec); }

struct ChannelReport {
  double t1 = 0.0;
  double value = 0.0;  // |gamma_j(t1)|
  bool flagged = false;
};

struct Assumption1Report {
  std::vector<ChannelReport> channels;
  /// First sample maximizing min_j |gamma_j(t)|, if that minimum clears tol.
  std::optional<double> common_t1;

  bool satisfied() const { return common_t1.has_value(); }
};

/// Samples every kernel on a uniform grid over [0, horizon]. For each channel
/// records the first sample of largest |gamma_j|, flagging channels that never
/// exceed `tol`.
inline Assumption1Report assumption1_check(const SystemSpec& spec, double horizon,
                                           Index samples, double tol = 1e-12) {
  require(horizon > 0.0, ErrorKind::InvalidArgument, "horizon must be positive");
  require(samples >= 1, ErrorKind::InvalidArgument, "need at least one sample");
  Assumption1Report report;
  report.channels.resize(static_cast<std::size_t>(spec.M));
  double best_common = -1.0;
  for (Index i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : horizon * static_cast<double>(i) /
                                              static_cast<double>(samples - 1);
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < report.channels.size(); ++j) {
      const double mag = std::abs(spec.kernels[j](t));
      auto& ch = report.channels[j];
      if (i == 0 || mag > ch.value) {
        ch.t1 = t;
        ch.value = mag;
      }
      smallest = std::min(smallest, mag);
    }
    if (smallest > best_common) {
      best_common = smallest;
      if (smallest > tol) report.common_t1 = t;
    }
  }
  for (auto& ch : report.channels) ch.flagged = !(ch.value > tol);
  return report;
}

/// |S J_n S^T - J_l| for a 2l x 2n matrix S: the matrix form of the CCR for
/// the variables S x.
inline double ccr_matrix_check(const Matrix& s) {
  require(s.rows() % 2 == 0 && s.cols() % 2 == 0 && s.cols() > 0,
          ErrorKind::DimensionMismatch, "CCR check needs a 2l x 2n matrix");
  if (s.rows() == 0) return 0.0;
  return (s * apply_j(s.transpose()) - j_matrix(s.rows() / 2)).norm();
}

}  // namespace darklab
