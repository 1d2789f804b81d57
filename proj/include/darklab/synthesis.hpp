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
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "darklab/analysis.hpp"
#include "darklab/errors.hpp"
#include "darklab/kernel.hpp"
#include "darklab/subspace.hpp"
#include "darklab/symplectic.hpp"
#include "darklab/system.hpp"

namespace darklab {

/// Desired closed dynamics dx_D = J_k omega_dark x_D dt, plus the free
/// spectrum mu_j on directions alpha_j orthogonal to the dark rows.
struct SynthesisTarget {
  Matrix omega_dark;
  std::vector<double> mu;       // empty: all zero
  std::optional<Matrix> alpha;  // columns; default: orthonormal completion
};

struct SynthesisResult {
  Matrix omega;
  Matrix s_d;
  Matrix omega_dark;
  Matrix alpha;
  std::vector<double> mu;
  DarkModeCertificate certificate;
  Index h_d_dim = 0;

  Index k() const { return s_d.rows() / 2; }
};

/// H_D = Ker(V J_n) cap Ker(V). The result is J_n-invariant, so its
/// dimension is even.
inline SubspaceBasis compute_h_d(const Matrix& v, std::optional<double> rel_tol = std::nullopt) {
  return dark_capacity(v, rel_tol.value_or(default_rank_tol(v.cols(), v.rows())));
}

namespace detail {

/// Eigenpairs of a symmetric matrix, eigenvalues descending, each eigenvector
/// signed so that its first nonzero entry is positive.
inline std::pair<Vector, Matrix> sorted_spectrum(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Index d = sym.rows();
  Vector values(d);
  Matrix vectors(d, d);
  for (Index i = 0; i < d; ++i) {
    values(i) = es.eigenvalues()(d - 1 - i);
    Vector vec = es.eigenvectors().col(d - 1 - i);
    for (Index c = 0; c < d; ++c) {
      if (std::abs(vec(c)) > 1e-12) {
        if (vec(c) < 0) vec = -vec;
        break;
      }
    }
    vectors.col(i) = vec;
  }
  return {values, vectors};
}

}  // namespace detail

/// Builds a symmetric Omega whose system (Omega, V, kernels) carries a dark
/// mode x_D = S_D x evolving as dx_D = J_k omega_dark x_D dt.
///
/// S_D = (J v_1, v_1, ..., J v_k, v_k)^T from the J_n-adapted orthonormal
/// basis of H_D, and
///   Omega = sum_j lambda_j S_D^T beta_j beta_j^T S_D + sum_j mu_j alpha_j alpha_j^T
/// with (lambda_j, beta_j) the spectrum of omega_dark.
inline SynthesisResult synthesize_omega(const Matrix& v, const std::vector<Kernel>& kernels,
                                        const SynthesisTarget& target,
                                        const AnalysisOptions& opts = {}) {
  const Matrix& od = target.omega_dark;
  require(od.rows() == od.cols() && od.rows() >= 2 && od.rows() % 2 == 0,
          ErrorKind::InvalidTarget, "omega_dark must be 2k x 2k with k >= 1");
  require(od.allFinite(), ErrorKind::InvalidTarget, "omega_dark must be finite");
  require((od - od.transpose()).norm() <= 1e-12 * std::max(1.0, od.norm()),
          ErrorKind::NonSymmetricTarget, "omega_dark is not symmetric");
  require(v.cols() > 0 && v.cols() % 2 == 0 && v.rows() % 2 == 0 && v.rows() > 0,
          ErrorKind::DimensionMismatch, "V must be 2M x 2n");

  const Index dim = v.cols();
  const Index k = od.rows() / 2;
  const SubspaceBasis h_d = compute_h_d(v, opts.rank_tol);
  require(2 * k <= h_d.dim(), ErrorKind::InsufficientDarkCapacity,
          "target needs " + std::to_string(2 * k) + " dark dimensions but dim H_D = " +
              std::to_string(h_d.dim()));

  const Matrix basis = orthonormal_jn_adapted_basis(h_d);
  Matrix s_d(2 * k, dim);
  for (Index i = 0; i < k; ++i) {
    s_d.row(2 * i) = basis.col(2 * i + 1).transpose();  // J v_i
    s_d.row(2 * i + 1) = basis.col(2 * i).transpose();  // v_i
  }

  const Index free_dims = dim - 2 * k;
  Matrix alpha;
  if (target.alpha) {
    alpha = *target.alpha;
    require(alpha.rows() == dim && alpha.cols() <= free_dims, ErrorKind::InvalidTarget,
            "alpha must hold at most 2n - 2k vectors of length 2n");
    const double scale = std::max(1.0, alpha.norm());
    require((s_d * alpha).norm() <= 1e-9 * scale, ErrorKind::InvalidTarget,
            "alpha vectors must be orthogonal to the dark rows");
    Matrix gram = alpha.transpose() * alpha;
    gram.diagonal().setZero();
    require(gram.norm() <= 1e-9 * scale * scale, ErrorKind::InvalidTarget,
            "alpha vectors must be mutually orthogonal");
  } else {
    alpha = orthonormal_completion(s_d.transpose());
  }
  std::vector<double> mu = target.mu;
  require(static_cast<Index>(mu.size()) <= alpha.cols(), ErrorKind::InvalidTarget,
          "more mu values than free directions");
  if (target.alpha) {
    require(mu.empty() || static_cast<Index>(mu.size()) == alpha.cols(),
            ErrorKind::InvalidTarget, "mu and alpha differ in length");
  }
  mu.resize(static_cast<std::size_t>(alpha.cols()), 0.0);

  const Matrix od_sym = 0.5 * (od + od.transpose());
  const auto [lambda, beta] = detail::sorted_spectrum(od_sym);
  Matrix omega = Matrix::Zero(dim, dim);
  for (Index j = 0; j < 2 * k; ++j) {
    const Vector hat = s_d.transpose() * beta.col(j);
    omega += lambda(j) * (hat * hat.transpose());
  }
  for (Index j = 0; j < alpha.cols(); ++j) {
    omega += mu[static_cast<std::size_t>(j)] * (alpha.col(j) * alpha.col(j).transpose());
  }

  // S_B from the J_n-adapted orthonormal basis of the Euclidean complement,
  // with the same (J w, w) row order, so S = [S_D; S_B] is orthogonal and
  // symplectic.
  Matrix s_b(dim - 2 * k, dim);
  if (free_dims > 0) {
    const Matrix comp = orthonormal_jn_adapted_basis(
        SubspaceBasis::from_orthonormal(orthonormal_completion(s_d.transpose())));
    for (Index i = 0; i < free_dims / 2; ++i) {
      s_b.row(2 * i) = comp.col(2 * i + 1).transpose();
      s_b.row(2 * i + 1) = comp.col(2 * i).transpose();
    }
  }

  SynthesisResult result;
  const SystemSpec spec = make_system(omega, v, kernels, opts.rank_tol);
  result.certificate = certificate_from_rows(spec, s_d, s_b, opts);
  result.omega = spec.omega;
  result.s_d = std::move(s_d);
  result.omega_dark = od_sym;
  result.alpha = std::move(alpha);
  result.mu = std::move(mu);
  result.h_d_dim = h_d.dim();
  return result;
}

struct SynthesisResiduals {
  CertificateResiduals certificate;
  double dark_generator = 0.0;  // |A_D - J_k omega_dark|
  double intertwining = 0.0;    // |S_D J_n - J_k S_D|

  double max() const { return std::max({certificate.max(), dark_generator, intertwining}); }
  bool within(double tol) const { return max() <= tol; }
};

inline SynthesisResiduals verify_synthesis(const SynthesisResult& result, const Matrix& v,
                                           const std::vector<Kernel>& kernels,
                                           const AnalysisOptions& opts = {}) {
  const SystemSpec spec = make_system(result.omega, v, kernels, opts.rank_tol);
  SynthesisResiduals r;
  r.certificate = verify_certificate(spec, result.s_d, output_check_time(spec, opts));
  const Index k = result.s_d.rows() / 2;
  const Matrix jk = j_matrix(k);
  r.dark_generator = (dark_generator(spec, result.s_d) - jk * result.omega_dark).norm();
  r.intertwining = (apply_j(result.s_d.transpose()).transpose() * -1.0 - jk * result.s_d).norm();
  return r;
}

/// The system spec (Omega, V, kernels) produced by a synthesis.
inline SystemSpec synthesized_system(const SynthesisResult& result, const Matrix& v,
                                     const std::vector<Kernel>& kernels) {
  return make_system(result.omega, v, kernels);
}

}  // namespace darklab
