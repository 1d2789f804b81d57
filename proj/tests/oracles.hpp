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

// Independent reference computations for the test suites. Nothing here calls
// the library's subspace, symplectic or analysis algorithms; matrices are
// built from their defining formulas.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "darklab/kernel.hpp"
#include "darklab/subspace.hpp"

namespace oracle {

using darklab::Index;
using darklab::Matrix;
using darklab::Vector;
using CMatrix = Eigen::MatrixXcd;

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Matrix gaussian(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

inline Matrix symmetric(Rng& rng, Index d) {
  const Matrix g = gaussian(rng, d, d);
  return 0.5 * (g + g.transpose());
}

/// J_n written out entry by entry.
inline Matrix j(Index n) {
  Matrix out = Matrix::Zero(2 * n, 2 * n);
  for (Index k = 0; k < n; ++k) {
    out(2 * k, 2 * k + 1) = 1.0;
    out(2 * k + 1, 2 * k) = -1.0;
  }
  return out;
}

/// exp(J H) with H symmetric is symplectic.
inline Matrix symplectic(Rng& rng, Index n, double scale = 0.5) {
  const Matrix h = scale * symmetric(rng, 2 * n);
  const Matrix gen = j(n) * h;
  return gen.exp();
}

/// Real form of a random unitary: orthogonal and symplectic.
inline Matrix orthosymplectic(Rng& rng, Index n) {
  CMatrix z(n, n);
  const Matrix re = gaussian(rng, n, n), im = gaussian(rng, n, n);
  z.real() = re;
  z.imag() = im;
  const CMatrix q = Eigen::HouseholderQR<CMatrix>(z).householderQ() * CMatrix::Identity(n, n);
  Matrix out(2 * n, 2 * n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) {
      const auto u = q(r, c);
      out.block(2 * r, 2 * c, 2, 2) << u.real(), -u.imag(), u.imag(), u.real();
    }
  return out;
}

inline Matrix orthonormalize(const Matrix& a, double tol = 1e-10) {
  if (a.cols() == 0) return Matrix(a.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Index r = 0;
  while (r < s.size() && s(r) > tol * std::max(1.0, s(0))) ++r;
  return svd.matrixU().leftCols(r);
}

inline double min_singular(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

/// Gamma_o(t) V for real kernel values g_j: rows 2j, 2j+1 of V scaled by g_j.
inline Matrix output_map(const Matrix& v, const std::vector<double>& g) {
  Matrix out = v;
  for (std::size_t k = 0; k < g.size(); ++k) out.middleRows(2 * static_cast<Index>(k), 2) *= g[k];
  return out;
}

struct Residuals {
  double ccr, noise, invariance, output;
  double max() const { return std::max({ccr, noise, invariance, output}); }
};

/// Dark-mode residuals straight from their definitions, with the projector
/// onto col(S_D^T) formed from normal equations.
inline Residuals residuals(const Matrix& omega, const Matrix& v, const std::vector<double>& g_t1,
                           const Matrix& s_d) {
  const Index n = omega.rows() / 2;
  const Index l = s_d.rows() / 2;
  const Matrix jn = j(n);
  const Matrix w = s_d.transpose();
  const Matrix p = w * (w.transpose() * w).inverse() * w.transpose();
  Residuals r;
  r.ccr = (s_d * jn * s_d.transpose() - j(l)).norm();
  r.noise = (v * jn * w).norm();
  r.invariance = ((Matrix::Identity(2 * n, 2 * n) - p) * omega * jn * w).norm();
  r.output = (output_map(v, g_t1) * jn * w).norm();
  return r;
}

/// Largest dark subspace found by enumerating sums of real eigenspaces of
/// Omega J_n (one block per real eigenvalue or conjugate pair). Returns its
/// dimension, or nullopt when no admissible subspace exists.
inline std::optional<Index> brute_force_dark(const Matrix& omega, const Matrix& v, double tol = 1e-7) {
  const Index dim = omega.rows();
  const Index n = dim / 2;
  const Matrix a = omega * j(n);
  Eigen::EigenSolver<Matrix> es(a);
  const Eigen::VectorXcd lam = es.eigenvalues();
  const CMatrix vecs = es.eigenvectors();
  const double scale = std::max(1.0, a.norm());

  std::vector<Matrix> blocks;
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  for (Index i = 0; i < dim; ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = true;
    if (std::abs(lam(i).imag()) <= 1e-9 * scale) {
      blocks.push_back(vecs.col(i).real());
      // Eigenvectors of real eigenvalues may come back with a complex phase.
      if (vecs.col(i).real().norm() < 1e-6) blocks.back() = vecs.col(i).imag();
      continue;
    }
    Index partner = -1;
    double best = 1e300;
    for (Index k = 0; k < dim; ++k) {
      if (used[static_cast<std::size_t>(k)]) continue;
      const double d = std::abs(lam(k) - std::conj(lam(i)));
      if (d < best) best = d, partner = k;
    }
    if (partner >= 0) used[static_cast<std::size_t>(partner)] = true;
    Matrix pair(dim, 2);
    pair << vecs.col(i).real(), vecs.col(i).imag();
    blocks.push_back(pair);
  }

  const Matrix vj = v * j(n);
  std::optional<Index> best_dim;
  const std::size_t nb = blocks.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << nb); ++mask) {
    Matrix cols(dim, 0);
    for (std::size_t b = 0; b < nb; ++b) {
      if (!(mask & (std::uint64_t{1} << b))) continue;
      Matrix next(dim, cols.cols() + blocks[b].cols());
      next << cols, blocks[b];
      cols = next;
    }
    const Matrix w = orthonormalize(cols);
    if (w.cols() == 0 || w.cols() % 2 != 0) continue;
    if ((vj * w).norm() > tol * std::max(1.0, vj.norm())) continue;
    if (min_singular(w.transpose() * j(n) * w) <= tol) continue;
    const Matrix leak = a * w - w * (w.transpose() * a * w);
    if (leak.norm() > tol * scale) continue;
    if (!best_dim || w.cols() > *best_dim) best_dim = w.cols();
  }
  return best_dim;
}

/// Exact mean dynamics for exponential kernels a_j exp(-lambda_j t): the
/// system augmented with z_j(t) = int_0^t exp(-lambda_j (t - s)) x(s) ds is
/// linear and time invariant, so its flow is a matrix exponential.
struct Augmented {
  Matrix f;        // generator of [x; z_1; ...; z_M]
  Matrix out_map;  // y = out_map * [x; z]
};

inline Augmented augmented(const Matrix& omega, const Matrix& v, const std::vector<double>& a,
                           const std::vector<double>& lambda) {
  const Index dim = omega.rows();
  const Index n = dim / 2;
  const Index m = static_cast<Index>(a.size());
  const Matrix jn = j(n);
  Augmented aug;
  aug.f = Matrix::Zero(dim * (m + 1), dim * (m + 1));
  aug.out_map = Matrix::Zero(2 * m, dim * (m + 1));
  aug.f.topLeftCorner(dim, dim) = jn * omega;
  for (Index k = 0; k < m; ++k) {
    // Gamma_K for channel k alone with unit real weight: E_kk (x) J_1.
    Matrix gk = Matrix::Zero(2 * m, 2 * m);
    gk(2 * k, 2 * k + 1) = 1.0;
    gk(2 * k + 1, 2 * k) = -1.0;
    Matrix ek = Matrix::Zero(2 * m, 2 * m);
    ek(2 * k, 2 * k) = ek(2 * k + 1, 2 * k + 1) = 1.0;
    const Index at = dim * (k + 1);
    aug.f.block(0, at, dim, dim) = a[static_cast<std::size_t>(k)] * jn * v.transpose() * gk * v;
    aug.f.block(at, 0, dim, dim) = Matrix::Identity(dim, dim);
    aug.f.block(at, at, dim, dim) = -lambda[static_cast<std::size_t>(k)] * Matrix::Identity(dim, dim);
    aug.out_map.block(0, at, 2 * m, dim) = a[static_cast<std::size_t>(k)] * ek * v;
  }
  return aug;
}

/// States (columns) at the given times from x0 with zero drive.
inline Matrix exact_states(const Augmented& aug, const Vector& x0, const std::vector<double>& times,
                           Matrix* outputs = nullptr) {
  const Index dim = x0.size();
  Vector z0 = Vector::Zero(aug.f.rows());
  z0.head(dim) = x0;
  Matrix states(dim, static_cast<Index>(times.size()));
  if (outputs) outputs->resize(aug.out_map.rows(), static_cast<Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix ft = aug.f * times[i];
    const Vector z = ft.exp() * z0;
    states.col(static_cast<Index>(i)) = z.head(dim);
    if (outputs) outputs->col(static_cast<Index>(i)) = aug.out_map * z;
  }
  return states;
}

/// Pairs eigenvalues of x and y by minimum total distance (small sizes) and
/// returns the largest pairwise gap.
inline double spectrum_distance(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) {
  if (x.size() != y.size()) return 1e300;
  std::vector<Index> perm(static_cast<std::size_t>(y.size()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
  double best = 1e300;
  do {
    double worst = 0.0;
    for (Index i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::abs(x(i) - y(perm[static_cast<std::size_t>(i)])));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline Eigen::VectorXcd eigenvalues(const Matrix& a) { return Eigen::EigenSolver<Matrix>(a, false).eigenvalues(); }

/// Complex coupling vectors with random entries.
inline Matrix random_v(Rng& rng, Index n, Index m) {
  Matrix v(2 * m, 2 * n);
  const Matrix re = gaussian(rng, m, 2 * n), im = gaussian(rng, m, 2 * n);
  for (Index k = 0; k < m; ++k) {
    v.row(2 * k) = re.row(k);
    v.row(2 * k + 1) = im.row(k);
  }
  return v;
}

/// Random V whose first `dark_modes` modes (after rotating by the
/// orthosymplectic q) are untouched: V = V' q^T with V' zero on those modes.
inline Matrix v_with_dark_capacity(Rng& rng, Index n, Index m, Index dark_modes, const Matrix& q) {
  Matrix vp = random_v(rng, n, m);
  vp.leftCols(2 * dark_modes).setZero();
  return vp * q.transpose();
}

inline std::vector<darklab::Kernel> random_exp_kernels(Rng& rng, Index m, std::vector<double>* a = nullptr,
                                                       std::vector<double>* lambda = nullptr) {
  std::vector<darklab::Kernel> out;
  for (Index k = 0; k < m; ++k) {
    const double ak = uniform(rng, 0.2, 1.5), lk = uniform(rng, 0.5, 3.0);
    out.emplace_back(darklab::ExponentialKernel{ak, lk});
    if (a) a->push_back(ak);
    if (lambda) lambda->push_back(lk);
  }
  return out;
}

/// A synthesis instance with guaranteed capacity: V untouched on the first k
/// modes after a random orthosymplectic rotation, and a random target.
struct FeasibleInstance {
  Index n, m, k;
  Matrix v;
  std::vector<darklab::Kernel> kernels;
  Matrix omega_dark;
  std::vector<double> mu;
};

inline FeasibleInstance feasible_instance(Rng& rng, Index n, Index m, Index k, bool definite = true) {
  FeasibleInstance f{n, m, k, {}, {}, {}, {}};
  const Matrix q = orthosymplectic(rng, n);
  f.v = v_with_dark_capacity(rng, n, m, k, q);
  f.kernels = random_exp_kernels(rng, m);
  if (definite) {
    const Matrix g = gaussian(rng, 2 * k, 2 * k);
    f.omega_dark = g * g.transpose() + 0.5 * Matrix::Identity(2 * k, 2 * k);
  } else {
    f.omega_dark = symmetric(rng, 2 * k);
  }
  for (Index i = 0; i < 2 * (n - k); ++i) {
    const double mag = uniform(rng, 0.5, 2.0);
    f.mu.push_back(uniform(rng, 0.0, 1.0) < 0.5 ? -mag : mag);
  }
  return f;
}

}  // namespace oracle
