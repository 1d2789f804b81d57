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
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "darklab/analysis.hpp"
#include "darklab/errors.hpp"
#include "darklab/kernel.hpp"
#include "darklab/symplectic.hpp"
#include "darklab/system.hpp"

namespace darklab {

enum class Method { TrapezoidVolterra, ExpEmbed };

constexpr std::string_view to_string(Method m) {
  return m == Method::ExpEmbed ? "ExpEmbed" : "TrapezoidVolterra";
}

/// Deterministic stand-in for the input mean: t -> u(t) in R^{2M}.
class DriveSignal {
 public:
  struct Zero {};
  struct Sinusoid {
    Vector amplitudes;  // per input component
    double frequency = 1.0;  // angular
    double phase = 0.0;
  };
  struct Piecewise {
    std::vector<double> times;
    Matrix values;  // one row per time, 2M columns
  };

  static DriveSignal zero(Index width) { return DriveSignal(width, Zero{}); }

  static DriveSignal sinusoid(Vector amplitudes, double frequency, double phase = 0.0) {
    require(amplitudes.allFinite() && std::isfinite(frequency) && std::isfinite(phase),
            ErrorKind::InvalidArgument, "sinusoid parameters must be finite");
    const Index width = amplitudes.size();
    return DriveSignal(width, Sinusoid{std::move(amplitudes), frequency, phase});
  }

  /// Linear interpolation between rows; held constant outside the table.
  static DriveSignal piecewise(std::vector<double> times, Matrix values) {
    require(!times.empty() && static_cast<Index>(times.size()) == values.rows(),
            ErrorKind::InvalidArgument, "drive table times and rows differ");
    require(values.allFinite(), ErrorKind::InvalidArgument, "drive table must be finite");
    for (std::size_t i = 1; i < times.size(); ++i) {
      require(times[i] > times[i - 1], ErrorKind::InvalidArgument,
              "drive table times must be strictly increasing");
    }
    const Index width = values.cols();
    return DriveSignal(width, Piecewise{std::move(times), std::move(values)});
  }

  Index width() const { return width_; }
  bool is_zero() const { return std::holds_alternative<Zero>(kind_); }

  Vector operator()(double t) const {
    if (const auto* s = std::get_if<Sinusoid>(&kind_)) {
      return s->amplitudes * std::sin(s->frequency * t + s->phase);
    }
    if (const auto* p = std::get_if<Piecewise>(&kind_)) {
      const auto& ts = p->times;
      if (t <= ts.front()) return p->values.row(0).transpose();
      if (t >= ts.back()) return p->values.row(p->values.rows() - 1).transpose();
      const auto hi = static_cast<Index>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
      const Index lo = hi - 1;
      const double w = (t - ts[static_cast<std::size_t>(lo)]) /
                       (ts[static_cast<std::size_t>(hi)] - ts[static_cast<std::size_t>(lo)]);
      return ((1.0 - w) * p->values.row(lo) + w * p->values.row(hi)).transpose();
    }
    return Vector::Zero(width_);
  }

 private:
  DriveSignal(Index width, std::variant<Zero, Sinusoid, Piecewise> kind)
      : width_(width), kind_(std::move(kind)) {}

  Index width_;
  std::variant<Zero, Sinusoid, Piecewise> kind_;
};

/// Mean state and mean output on a uniform grid. Column k of `states` and
/// `outputs` belongs to times[k].
struct Trajectory {
  std::vector<double> times;
  Matrix states;   // 2n x (N + 1)
  Matrix outputs;  // 2M x (N + 1)
  Method method = Method::TrapezoidVolterra;
  double h = 0.0;
  double t_final = 0.0;

  Index size() const { return static_cast<Index>(times.size()); }
};

namespace detail {

/// A_Gamma(t) and Gamma_o(t) V split per channel:
///   A_Gamma(t) = sum_j Re g_j(t) C_re[j] + Im g_j(t) C_im[j]
///   Gamma_o(t) V = sum_j Re g_j(t) O_re[j] + Im g_j(t) O_im[j]
/// so one scalar convolution per channel serves both the state and output.
struct ChannelOperators {
  std::vector<Matrix> c_re, c_im, o_re, o_im;
};

inline ChannelOperators channel_operators(const SystemSpec& spec) {
  ChannelOperators ops;
  const Matrix jl = j_matrix(1);
  for (Index j = 0; j < spec.M; ++j) {
    const Matrix rows = spec.v.middleRows(2 * j, 2);  // rows of channel j
    ops.c_re.push_back(apply_j(rows.transpose() * jl * rows));
    ops.c_im.push_back(apply_j(rows.transpose() * rows));
    Matrix o_re = Matrix::Zero(spec.channels(), spec.dim());
    Matrix o_im = Matrix::Zero(spec.channels(), spec.dim());
    o_re.middleRows(2 * j, 2) = rows;
    o_im.middleRows(2 * j, 2) = -jl * rows;
    ops.o_re.push_back(std::move(o_re));
    ops.o_im.push_back(std::move(o_im));
  }
  return ops;
}

inline Index grid_steps(double t_final, double h) {
  require(std::isfinite(t_final) && t_final > 0.0, ErrorKind::InvalidArgument,
          "final time must be positive");
  require(std::isfinite(h) && h > 0.0, ErrorKind::InvalidArgument, "step must be positive");
  require(h <= t_final, ErrorKind::StepTooLarge, "step exceeds the final time");
  return static_cast<Index>(std::ceil(t_final / h - 1e-9));
}

inline Trajectory trapezoid_volterra(const SystemSpec& spec, const Vector& x0,
                                     const DriveSignal& drive, double t_final, Index steps) {
  const double h = t_final / static_cast<double>(steps);
  const Index dim = spec.dim();
  const Index big = steps;
  const DerivedMatrices dm(spec);
  const ChannelOperators ops = channel_operators(spec);

  Trajectory traj;
  traj.method = Method::TrapezoidVolterra;
  traj.h = h;
  traj.t_final = t_final;
  traj.times.resize(static_cast<std::size_t>(big + 1));
  for (Index k = 0; k <= big; ++k) traj.times[static_cast<std::size_t>(k)] = h * static_cast<double>(k);

  // Kernel samples stored reversed: rev(i) = g(t_{N-i}), so g(t_{k-j}) for
  // j = 0..k is the contiguous segment starting at N - k.
  std::vector<Vector> rev_re, rev_im;
  std::vector<bool> has_im;
  for (const auto& kern : spec.kernels) {
    Vector re(big + 1), im(big + 1);
    for (Index i = 0; i <= big; ++i) {
      const auto g = kern(traj.times[static_cast<std::size_t>(big - i)]);
      re(i) = g.real();
      im(i) = g.imag();
    }
    has_im.push_back(!kern.is_real());
    rev_re.push_back(std::move(re));
    rev_im.push_back(std::move(im));
  }

  Matrix x(dim, big + 1);
  x.col(0) = x0;
  const std::size_t channels = spec.kernels.size();
  std::vector<Matrix> z_re(channels, Matrix::Zero(dim, big + 1));
  std::vector<Matrix> z_im(channels, Matrix::Zero(dim, big + 1));

  auto rhs = [&](const Vector& state, const std::vector<Vector>& zr,
                 const std::vector<Vector>& zi, const Vector& u) {
    Vector f = dm.a_h() * state + dm.b() * u;
    for (std::size_t c = 0; c < channels; ++c) {
      f += ops.c_re[c] * zr[c];
      if (has_im[c]) f += ops.c_im[c] * zi[c];
    }
    return f;
  };

  std::vector<Vector> zr(channels, Vector::Zero(dim)), zi(channels, Vector::Zero(dim));
  std::vector<Vector> pr(channels), pi(channels);
  Vector u = drive(0.0);
  Vector f = rhs(x.col(0), zr, zi, u);
  for (Index k = 0; k < big; ++k) {
    // Trapezoid weights over x_0..x_{k+1}; everything except the x_{k+1}
    // endpoint is known before the step.
    for (std::size_t c = 0; c < channels; ++c) {
      const Index off = big - k - 1;
      pr[c] = h * (x.leftCols(k + 1) * rev_re[c].segment(off, k + 1));
      pr[c] -= 0.5 * h * rev_re[c](off) * x.col(0);
      if (has_im[c]) {
        pi[c] = h * (x.leftCols(k + 1) * rev_im[c].segment(off, k + 1));
        pi[c] -= 0.5 * h * rev_im[c](off) * x.col(0);
      } else {
        pi[c] = Vector::Zero(dim);
      }
    }
    const Vector u_next = drive(traj.times[static_cast<std::size_t>(k + 1)]);
    const Vector predicted = x.col(k) + h * f;
    for (std::size_t c = 0; c < channels; ++c) {
      zr[c] = pr[c] + 0.5 * h * rev_re[c](big) * predicted;
      zi[c] = pi[c] + 0.5 * h * rev_im[c](big) * predicted;
    }
    const Vector f_pred = rhs(predicted, zr, zi, u_next);
    x.col(k + 1) = x.col(k) + 0.5 * h * (f + f_pred);
    for (std::size_t c = 0; c < channels; ++c) {
      zr[c] = pr[c] + 0.5 * h * rev_re[c](big) * x.col(k + 1);
      zi[c] = pi[c] + 0.5 * h * rev_im[c](big) * x.col(k + 1);
      z_re[c].col(k + 1) = zr[c];
      z_im[c].col(k + 1) = zi[c];
    }
    f = rhs(x.col(k + 1), zr, zi, u_next);
  }

  traj.outputs.resize(spec.channels(), big + 1);
  for (Index k = 0; k <= big; ++k) {
    Vector y = drive(traj.times[static_cast<std::size_t>(k)]);
    for (std::size_t c = 0; c < channels; ++c) {
      y += ops.o_re[c] * z_re[c].col(k);
      if (has_im[c]) y += ops.o_im[c] * z_im[c].col(k);
    }
    traj.outputs.col(k) = y;
  }
  traj.states = std::move(x);
  return traj;
}

}  // namespace detail

/// Memoryless realization for exponential kernels. With
/// zeta_j(t) = int_0^t exp(-lambda_j (t - s)) x(s) ds the state
/// s = (x, zeta_1, ..., zeta_M) obeys ds/dt = F s + G u and the mean output
/// is H s + u.
struct ExpEmbedding {
  Matrix f;
  Matrix g;
  Matrix h;
};

inline ExpEmbedding exp_embedding(const SystemSpec& spec) {
  for (const auto& k : spec.kernels) {
    require(k.is_exponential(), ErrorKind::MethodKernelMismatch,
            "ExpEmbed needs every kernel to be exponential");
  }
  const Index dim = spec.dim();
  const Index total = dim * (spec.M + 1);
  const DerivedMatrices dm(spec);
  const detail::ChannelOperators ops = detail::channel_operators(spec);
  ExpEmbedding e{Matrix::Zero(total, total), Matrix::Zero(total, spec.channels()),
                 Matrix::Zero(spec.channels(), total)};
  e.f.topLeftCorner(dim, dim) = dm.a_h();
  e.g.topRows(dim) = dm.b();
  for (Index j = 0; j < spec.M; ++j) {
    const auto& kern = std::get<ExponentialKernel>(spec.kernels[static_cast<std::size_t>(j)].family());
    const Index at = dim * (j + 1);
    e.f.block(0, at, dim, dim) = kern.a * ops.c_re[static_cast<std::size_t>(j)];
    e.f.block(at, 0, dim, dim) = Matrix::Identity(dim, dim);
    e.f.block(at, at, dim, dim) = -kern.lambda * Matrix::Identity(dim, dim);
    e.h.middleCols(at, dim) = kern.a * ops.o_re[static_cast<std::size_t>(j)];
  }
  return e;
}

namespace detail {

inline Trajectory exp_embed(const SystemSpec& spec, const Vector& x0, const DriveSignal& drive,
                            double t_final, Index steps) {
  const ExpEmbedding e = exp_embedding(spec);
  const double h = t_final / static_cast<double>(steps);
  const Index dim = spec.dim();

  Trajectory traj;
  traj.method = Method::ExpEmbed;
  traj.h = h;
  traj.t_final = t_final;
  traj.times.resize(static_cast<std::size_t>(steps + 1));
  traj.states.resize(dim, steps + 1);
  traj.outputs.resize(spec.channels(), steps + 1);

  Vector s = Vector::Zero(e.f.rows());
  s.head(dim) = x0;
  auto deriv = [&](const Vector& state, double t) -> Vector {
    return e.f * state + e.g * drive(t);
  };
  for (Index k = 0; k <= steps; ++k) {
    const double t = h * static_cast<double>(k);
    traj.times[static_cast<std::size_t>(k)] = t;
    traj.states.col(k) = s.head(dim);
    traj.outputs.col(k) = e.h * s + drive(t);
    if (k == steps) break;
    const Vector k1 = deriv(s, t);
    const Vector k2 = deriv(s + 0.5 * h * k1, t + 0.5 * h);
    const Vector k3 = deriv(s + 0.5 * h * k2, t + 0.5 * h);
    const Vector k4 = deriv(s + h * k3, t + h);
    s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return traj;
}

}  // namespace detail

/// Integrates the first-moment dynamics
///   x' = A_H x + int_0^t A_Gamma(t - s) x(s) ds + B u(t)
///   y  = int_0^t Gamma_o(t - s) V x(s) ds + u(t)
/// on a uniform grid of step close to h ending exactly at t_final.
inline Trajectory simulate_mean(const SystemSpec& spec, const Vector& x0, const DriveSignal& drive,
                                double t_final, double h, Method method) {
  require(x0.size() == spec.dim(), ErrorKind::DimensionMismatch, "x0 must have length 2n");
  require(x0.allFinite(), ErrorKind::InvalidArgument, "x0 must be finite");
  require(drive.width() == spec.channels(), ErrorKind::DimensionMismatch,
          "drive must have 2M components");
  if (method == Method::ExpEmbed) {
    for (const auto& k : spec.kernels) {
      require(k.is_exponential(), ErrorKind::MethodKernelMismatch,
              "ExpEmbed needs every kernel to be exponential");
    }
  }
  const Index steps = detail::grid_steps(t_final, h);
  return method == Method::ExpEmbed ? detail::exp_embed(spec, x0, drive, t_final, steps)
                                    : detail::trapezoid_volterra(spec, x0, drive, t_final, steps);
}

/// exp(a_d t) xd0 for each t, by Pade scaling and squaring.
inline Matrix closed_form_dark(const Matrix& a_d, const Vector& xd0,
                               const std::vector<double>& times) {
  require(a_d.rows() == a_d.cols(), ErrorKind::DimensionMismatch, "a_d must be square");
  require(xd0.size() == a_d.rows(), ErrorKind::DimensionMismatch, "xd0 length must match a_d");
  Matrix out(a_d.rows(), static_cast<Index>(times.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Matrix scaled = a_d * times[i];
    const Matrix prop = scaled.exp();
    out.col(static_cast<Index>(i)) = prop * xd0;
  }
  return out;
}

struct DecouplingErrors {
  double input = 0.0;     // max_t |S_D (x_drive - x_zero)|
  double output = 0.0;    // max_t |y(x0 + S_D^T delta) - y(x0)|
  double autonomy = 0.0;  // max_t |S_D x_drive - exp(a_d t) S_D x0|
};

/// Empirical check of the dark-mode conditions on simulated trajectories.
/// The kick delta is the first unit vector of R^{2l}.
inline DecouplingErrors dark_decoupling_test(const SystemSpec& spec,
                                             const DarkModeCertificate& cert, const Vector& x0,
                                             const DriveSignal& drive, double t_final, double h,
                                             Method method = Method::ExpEmbed) {
  require(cert.s_d.cols() == spec.dim(), ErrorKind::DimensionMismatch,
          "certificate does not match the system");
  const Trajectory free = simulate_mean(spec, x0, DriveSignal::zero(spec.channels()), t_final, h, method);
  const Trajectory driven = simulate_mean(spec, x0, drive, t_final, h, method);
  Vector delta = Vector::Zero(cert.s_d.rows());
  delta(0) = 1.0;
  const Vector kicked_x0 = x0 + cert.s_d.transpose() * delta;
  const Trajectory kicked =
      simulate_mean(spec, kicked_x0, DriveSignal::zero(spec.channels()), t_final, h, method);
  const Matrix reference = closed_form_dark(cert.a_d, cert.s_d * x0, driven.times);

  DecouplingErrors err;
  const Matrix dark_driven = cert.s_d * driven.states;
  err.input = (dark_driven - cert.s_d * free.states).colwise().norm().maxCoeff();
  err.output = (kicked.outputs - free.outputs).colwise().norm().maxCoeff();
  err.autonomy = (dark_driven - reference).colwise().norm().maxCoeff();
  return err;
}

/// max_t |y(x0 + kick) - y(x0)| under zero drive.
inline double output_response(const SystemSpec& spec, const Vector& x0, const Vector& kick,
                              double t_final, double h, Method method) {
  const DriveSignal none = DriveSignal::zero(spec.channels());
  const Trajectory base = simulate_mean(spec, x0, none, t_final, h, method);
  const Trajectory moved = simulate_mean(spec, x0 + kick, none, t_final, h, method);
  return (moved.outputs - base.outputs).colwise().norm().maxCoeff();
}

}  // namespace darklab
