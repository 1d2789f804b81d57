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
#include <complex>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "darklab/errors.hpp"
#include "darklab/invariant.hpp"
#include "darklab/subspace.hpp"
#include "darklab/symplectic.hpp"
#include "darklab/system.hpp"

namespace darklab {

inline constexpr double kDefaultCertificateTol = 1e-9;

struct CertificateResiduals {
  double ccr = 0.0;                // |S_D J_n S_D^T - J_l|
  double noise_decoupling = 0.0;   // |V J_n S_D^T|
  double invariance = 0.0;         // |(I - P) Omega J_n S_D^T|
  double output_decoupling = 0.0;  // |Gamma_o(t1) V J_n S_D^T|

  double max() const { return std::max({ccr, noise_decoupling, invariance, output_decoupling}); }
  bool within(double tol) const { return max() <= tol; }
};

/// Witness for a dark mode x_D = S_D x: the symplectic rows S_D, a
/// symplectic basis S_B of the symplectic complement, and the generator A_D
/// of dx_D = A_D x_D dt.
struct DarkModeCertificate {
  Matrix s_d;
  Matrix s_b;
  Matrix a_d;
  CertificateResiduals residuals;
  bool verified = false;
  double tol = kDefaultCertificateTol;

  Index l() const { return s_d.rows() / 2; }
  /// The stacked symplectic matrix [S_D; S_B].
  Matrix s() const {
    Matrix out(s_d.rows() + s_b.rows(), s_d.cols());
    out << s_d, s_b;
    return out;
  }
};

enum class NoneReason { FullRowRank, EmptyInvariant, TotallyIsotropic };

constexpr std::string_view to_string(NoneReason r) {
  switch (r) {
    case NoneReason::FullRowRank: return "FullRowRank";
    case NoneReason::EmptyInvariant: return "EmptyInvariant";
    case NoneReason::TotallyIsotropic: return "TotallyIsotropic";
  }
  return "Unknown";
}

struct AnalysisOptions {
  double certificate_tol = kDefaultCertificateTol;
  std::optional<double> rank_tol;  // relative; defaults to SystemSpec::rank_tol()
  double cluster_tol = 1e-8;       // eigenvalue grouping in the candidate search
  double horizon = 10.0;           // Assumption 1 sampling window
  Index samples = 1001;
};

/// Sampling time used for the output-decoupling residual. Falls back to 0
/// when no common t1 exists.
inline double output_check_time(const SystemSpec& spec, const AnalysisOptions& opts = {}) {
  return assumption1_check(spec, opts.horizon, opts.samples).common_t1.value_or(0.0);
}

/// Residuals of the dark-mode conditions for candidate rows S_D.
inline CertificateResiduals verify_certificate(const SystemSpec& spec, const Matrix& s_d,
                                               double t1) {
  require(s_d.cols() == spec.dim() && s_d.rows() > 0 && s_d.rows() % 2 == 0,
          ErrorKind::DimensionMismatch, "S_D must be 2l x 2n with l >= 1");
  CertificateResiduals r;
  const Matrix s_dt = s_d.transpose();
  const Matrix j_sdt = apply_j(s_dt);
  r.ccr = ccr_matrix_check(s_d);
  const Matrix coupled = spec.v * j_sdt;
  r.noise_decoupling = coupled.norm();
  const SubspaceBasis w = SubspaceBasis::span(s_dt, spec.rank_tol());
  r.invariance = w.containment_residual(spec.omega * j_sdt);
  r.output_decoupling = (derived_matrices(spec).gamma_o(t1) * coupled).norm();
  return r;
}

inline CertificateResiduals verify_certificate(const SystemSpec& spec,
                                               const DarkModeCertificate& cert,
                                               const AnalysisOptions& opts = {}) {
  return verify_certificate(spec, cert.s_d, output_check_time(spec, opts));
}

/// A_D = -S_D J_n Omega J_n S_D^T J_l.
inline Matrix dark_generator(const SystemSpec& spec, const Matrix& s_d) {
  const Matrix jl = j_matrix(s_d.rows() / 2);
  return -s_d * apply_j(spec.omega * apply_j(s_d.transpose())) * jl;
}

/// Certificate for given symplectic rows S_D. S_B, when not supplied, is a
/// symplectic Gram-Schmidt basis of the symplectic complement of col(S_D^T).
inline DarkModeCertificate certificate_from_rows(const SystemSpec& spec, Matrix s_d,
                                                 std::optional<Matrix> s_b = std::nullopt,
                                                 const AnalysisOptions& opts = {}) {
  DarkModeCertificate cert;
  cert.tol = opts.certificate_tol;
  const double rel = opts.rank_tol.value_or(spec.rank_tol());
  if (s_b) {
    require(s_b->cols() == spec.dim() && s_b->rows() + s_d.rows() == spec.dim(),
            ErrorKind::DimensionMismatch, "S_B must complete S_D to a 2n x 2n matrix");
    cert.s_b = std::move(*s_b);
  } else {
    const SubspaceBasis comp =
        symplectic_complement(SubspaceBasis::span(s_d.transpose(), rel));
    cert.s_b = comp.empty() ? Matrix(0, spec.dim()) : symplectic_gram_schmidt(comp).rows();
  }
  cert.s_d = std::move(s_d);
  cert.a_d = dark_generator(spec, cert.s_d);
  cert.residuals = verify_certificate(spec, cert.s_d, output_check_time(spec, opts));
  cert.verified = cert.residuals.within(cert.tol);
  return cert;
}

/// Certificate for a symplectic, Omega J_n-invariant subspace W_D of Ker(V J_n).
inline DarkModeCertificate build_certificate(const SystemSpec& spec, const SubspaceBasis& w_d,
                                             const AnalysisOptions& opts = {}) {
  return certificate_from_rows(spec, symplectic_gram_schmidt(w_d).rows(), std::nullopt, opts);
}

struct DarkModesExist {
  DarkModeCertificate certificate;
  SubspaceBasis w_d;
};

struct NoDarkModes {
  NoneReason reason;
};

struct Inconclusive {
  std::string note;
};

struct AnalysisDiagnostics {
  int tier = 0;
  Index dim_kernel = 0;     // dim Ker(V J_n)
  Index dim_invariant = 0;  // dim U
  Index dim_radical = 0;    // dim rad(U)
  Index dim_h_d = 0;        // dim Ker(V J_n) cap Ker(V)
  Index candidates_tried = 0;
};

struct Verdict {
  std::variant<DarkModesExist, NoDarkModes, Inconclusive> outcome;
  AnalysisDiagnostics diagnostics;

  bool exists() const { return std::holds_alternative<DarkModesExist>(outcome); }
  bool none() const { return std::holds_alternative<NoDarkModes>(outcome); }
  bool inconclusive() const { return std::holds_alternative<Inconclusive>(outcome); }
  const DarkModeCertificate& certificate() const {
    return std::get<DarkModesExist>(outcome).certificate;
  }
  NoneReason reason() const { return std::get<NoDarkModes>(outcome).reason; }
};

/// Ker(V J_n) at the system's rank tolerance.
inline SubspaceBasis noise_kernel(const SystemSpec& spec, double rel_tol) {
  const Matrix vj = -apply_j(spec.v.transpose()).transpose();  // V J_n
  return SubspaceBasis::from_orthonormal(null_space(vj, rel_tol * spectral_norm(vj)), rel_tol);
}

/// H_D = Ker(V J_n) cap Ker(V).
inline SubspaceBasis dark_capacity(const Matrix& v, double rel_tol) {
  require(v.cols() % 2 == 0 && v.cols() > 0, ErrorKind::DimensionMismatch,
          "V must have 2n columns");
  Matrix stacked(2 * v.rows(), v.cols());
  stacked << -apply_j(v.transpose()).transpose(), v;
  return SubspaceBasis::from_orthonormal(null_space(stacked, rel_tol * spectral_norm(stacked)),
                                         rel_tol);
}

namespace detail {

/// Real generalized eigenspaces of `a`, with eigenvalues grouped when they
/// are close up to the Hamiltonian symmetries lambda -> -lambda, conj(lambda).
/// Each group's subspace is the range of the product of (a - mu I) over the
/// eigenvalues mu outside the group, truncated to the group's size.
inline std::vector<Matrix> spectral_groups(const Matrix& a, double cluster_tol) {
  const Index d = a.rows();
  if (d == 0) return {};
  Eigen::EigenSolver<Matrix> es(a, false);
  Eigen::VectorXcd lam = es.eigenvalues();

  std::vector<Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index x, Index y) {
    if (lam(x).real() != lam(y).real()) return lam(x).real() < lam(y).real();
    return lam(x).imag() < lam(y).imag();
  });

  const double scale = std::max(1.0, spectral_norm(a));
  std::vector<Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)];
    return x;
  };
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      const auto li = lam(i), lj = lam(j);
      const double gap = std::min({std::abs(li - lj), std::abs(li + lj),
                                   std::abs(li - std::conj(lj)), std::abs(li + std::conj(lj))});
      if (gap <= cluster_tol * scale) parent[static_cast<std::size_t>(find(i))] = find(j);
    }
  }

  std::vector<std::vector<Index>> groups;
  std::vector<Index> root_of_group;
  for (Index idx : order) {
    const Index root = find(idx);
    auto it = std::find(root_of_group.begin(), root_of_group.end(), root);
    if (it == root_of_group.end()) {
      root_of_group.push_back(root);
      groups.push_back({idx});
    } else {
      groups[static_cast<std::size_t>(it - root_of_group.begin())].push_back(idx);
    }
  }

  std::vector<Matrix> out;
  const Eigen::MatrixXcd ac = a.cast<std::complex<double>>();
  for (const auto& g : groups) {
    Eigen::MatrixXcd prod = Eigen::MatrixXcd::Identity(d, d);
    for (Index i = 0; i < d; ++i) {
      if (std::find(g.begin(), g.end(), i) != g.end()) continue;
      prod = (ac - lam(i) * Eigen::MatrixXcd::Identity(d, d)) * prod;
    }
    const Matrix re = prod.real();
    Eigen::JacobiSVD<Matrix> svd(re, Eigen::ComputeFullU);
    out.push_back(svd.matrixU().leftCols(static_cast<Index>(g.size())));
  }
  return out;
}

}  // namespace detail

/// Decides whether the system admits dark modes.
///
/// Tier 0: Ker(V J_n) = {0} leaves no room for a dark subspace.
/// Tier 1: U, the largest Omega J_n-invariant subspace of Ker(V J_n). Every
///         admissible W_D is invariant and inside Ker(V J_n), hence inside U.
///         U = {0} rules dark modes out.
/// Tier 2: rad(U) = {0} makes U itself admissible. rad(U) = U means U is
///         isotropic and so is every subspace of it, ruling dark modes out.
/// Tier 3: otherwise sums of spectral subspaces of Omega J_n restricted to U
///         (and their radical-free parts) are tried in a fixed order; the first
///         verified one wins, else the verdict is Inconclusive.
/// An Exists verdict always carries a certificate that passed verification.
inline Verdict detect_dark_modes(const SystemSpec& spec, const AnalysisOptions& opts = {}) {
  const double rel = opts.rank_tol.value_or(spec.rank_tol());
  Verdict verdict{Inconclusive{""}, {}};
  auto& diag = verdict.diagnostics;

  const SubspaceBasis kernel = noise_kernel(spec, rel);
  diag.dim_kernel = kernel.dim();
  diag.dim_h_d = dark_capacity(spec.v, rel).dim();
  if (kernel.empty()) {
    verdict.outcome = NoDarkModes{NoneReason::FullRowRank};
    return verdict;
  }

  diag.tier = 1;
  const Matrix a = apply_j(spec.omega.transpose()).transpose();  // Omega J_n
  const SubspaceBasis u = largest_invariant_subspace_in(kernel, a);
  diag.dim_invariant = u.dim();
  if (u.empty()) {
    verdict.outcome = NoDarkModes{NoneReason::EmptyInvariant};
    return verdict;
  }

  diag.tier = 2;
  const SubspaceBasis rad = radical(u);
  diag.dim_radical = rad.dim();
  auto try_candidate = [&](const SubspaceBasis& w) -> bool {
    ++diag.candidates_tried;
    if (w.empty() || w.dim() % 2 != 0 || !is_symplectic_subspace(w)) return false;
    try {
      DarkModeCertificate cert = build_certificate(spec, w, opts);
      if (!cert.verified) return false;
      verdict.outcome = DarkModesExist{std::move(cert), w};
      return true;
    } catch (const Error&) {
      return false;
    }
  };

  if (rad.empty()) {
    if (!try_candidate(u)) {
      verdict.outcome = Inconclusive{"invariant subspace is symplectic but its certificate "
                                     "failed verification"};
    }
    return verdict;
  }
  if (rad.dim() == u.dim()) {
    verdict.outcome = NoDarkModes{NoneReason::TotallyIsotropic};
    return verdict;
  }

  diag.tier = 3;
  const Matrix& uq = u.columns();
  const Matrix restricted = uq.transpose() * a * uq;
  const std::vector<Matrix> groups = detail::spectral_groups(restricted, opts.cluster_tol);
  const std::size_t g = groups.size();
  if (g > 16) {
    verdict.outcome = Inconclusive{"too many spectral groups to enumerate"};
    return verdict;
  }

  struct Candidate {
    unsigned mask;
    Index dim;
  };
  std::vector<Candidate> candidates;
  for (unsigned mask = 1; mask < (1u << g); ++mask) {
    Index dim = 0;
    for (std::size_t i = 0; i < g; ++i) {
      if (mask & (1u << i)) dim += groups[i].cols();
    }
    candidates.push_back({mask, dim});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& x, const Candidate& y) { return x.dim > y.dim; });

  for (const auto& c : candidates) {
    Matrix cols(restricted.rows(), c.dim);
    Index at = 0;
    for (std::size_t i = 0; i < g; ++i) {
      if (!(c.mask & (1u << i))) continue;
      cols.middleCols(at, groups[i].cols()) = groups[i];
      at += groups[i].cols();
    }
    const SubspaceBasis w = SubspaceBasis::span(uq * cols, rel);
    if (try_candidate(w)) return verdict;
    // Radical-free part: any complement of rad(W) inside W is symplectic.
    const SubspaceBasis w_rad = radical(w);
    if (!w_rad.empty() && w_rad.dim() < w.dim()) {
      const Matrix inside = w.columns() - w_rad.columns() * (w_rad.columns().transpose() * w.columns());
      if (try_candidate(SubspaceBasis::span(inside, 1e-8))) return verdict;
    }
  }
  verdict.outcome = Inconclusive{"no candidate subspace passed verification"};
  return verdict;
}

/// The system rewritten in the variables y = S x.
struct TransformedSystem {
  Matrix s;
  Matrix s_inv;
  Matrix a_h;  // S A_H S^{-1}
  Matrix b;    // S B

  /// Gamma_o(t) V S^{-1}.
  Matrix output_map(double t) const { return derived.gamma_o(t) * derived.v() * s_inv; }
  /// S A_Gamma(t) S^{-1}.
  Matrix memory(double t) const { return s * derived.a_gamma(t) * s_inv; }

  DerivedMatrices derived;
};

inline TransformedSystem transform_system(const SystemSpec& spec, const Matrix& s,
                                          double tol = 1e-9) {
  require(s.rows() == spec.dim() && s.cols() == spec.dim(), ErrorKind::DimensionMismatch,
          "transform must be 2n x 2n");
  DerivedMatrices derived(spec);
  Matrix s_inv = symplectic_inverse(s, tol);
  Matrix a_h = s * derived.a_h() * s_inv;
  Matrix b = s * derived.b();
  return TransformedSystem{s, std::move(s_inv), std::move(a_h), std::move(b), std::move(derived)};
}

struct ForbiddenCouplingReport {
  Index d0 = 0;                   // dim(Ker(V J_n) cap Ker(V))
  std::optional<Index> d_s;       // same quantity for V_S = V J_n S^T
  std::optional<Index> required;  // 2l of the supplied certificate
  std::optional<bool> necessary_condition_met;
};

/// Necessary-condition check for engineering dark modes: a 2l-dimensional
/// dark mode with symplectic transform S needs dim(Ker(V_S J_n) cap Ker(V_S))
/// >= 2l, V_S = V J_n S^T. With S = I this is dim H_D.
inline ForbiddenCouplingReport forbidden_coupling_report(
    const SystemSpec& spec, const DarkModeCertificate* cert = nullptr) {
  ForbiddenCouplingReport report;
  const double rel = spec.rank_tol();
  const Matrix vj = -apply_j(spec.v.transpose()).transpose();
  report.d0 = dark_capacity(vj, rel).dim();
  if (cert != nullptr) {
    const Matrix v_s = vj * cert->s().transpose();
    report.d_s = dark_capacity(v_s, rel).dim();
    report.required = cert->s_d.rows();
    report.necessary_condition_met = *report.d_s >= *report.required;
  }
  return report;
}

}  // namespace darklab
