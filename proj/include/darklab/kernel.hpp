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
#include <string>
#include <variant>
#include <vector>

#include "darklab/errors.hpp"

namespace darklab {

/// gamma(t) = a * exp(-lambda t). The memory kernel of a Lorentzian spectral
/// density centred at the field frequency.
struct ExponentialKernel {
  double a = 1.0;
  double lambda = 1.0;
};

/// gamma(t) = a * exp(-t^2 / (2 sigma^2)).
struct GaussianKernel {
  double a = 1.0;
  double sigma = 1.0;
};

/// Piecewise-linear table. Values are held constant outside the sampled
/// range. `values_im` is optional; when present the kernel is complex.
struct TableKernel {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> values_im;
};

/// One channel's memory kernel gamma_j(t), evaluated for t >= 0 only.
class Kernel {
 public:
  using Family = std::variant<ExponentialKernel, GaussianKernel, TableKernel>;

  Kernel(ExponentialKernel k) : family_(k) {  // NOLINT(google-explicit-constructor)
    require(std::isfinite(k.a) && std::isfinite(k.lambda) && k.lambda > 0.0,
            ErrorKind::InvalidArgument, "exponential kernel needs finite a and lambda > 0");
  }
  Kernel(GaussianKernel k) : family_(k) {  // NOLINT(google-explicit-constructor)
    require(std::isfinite(k.a) && std::isfinite(k.sigma) && k.sigma > 0.0,
            ErrorKind::InvalidArgument, "gaussian kernel needs finite a and sigma > 0");
  }
  Kernel(TableKernel k) : family_(std::move(k)) {  // NOLINT(google-explicit-constructor)
    const auto& t = std::get<TableKernel>(family_);
    require(!t.times.empty(), ErrorKind::InvalidArgument, "table kernel has no samples");
    require(t.values.size() == t.times.size(), ErrorKind::InvalidArgument,
            "table kernel times and values differ in length");
    require(t.values_im.empty() || t.values_im.size() == t.times.size(),
            ErrorKind::InvalidArgument, "table kernel imaginary values differ in length");
    require(t.times.front() >= 0.0, ErrorKind::InvalidArgument,
            "table kernel times must be nonnegative");
    for (std::size_t i = 1; i < t.times.size(); ++i) {
      require(t.times[i] > t.times[i - 1], ErrorKind::InvalidArgument,
              "table kernel times must be strictly increasing");
    }
  }

  const Family& family() const { return family_; }

  bool is_real() const {
    const auto* t = std::get_if<TableKernel>(&family_);
    return t == nullptr || t->values_im.empty();
  }

  bool is_exponential() const { return std::holds_alternative<ExponentialKernel>(family_); }

  std::complex<double> operator()(double t) const {
    require(t >= 0.0, ErrorKind::InvalidArgument, "memory kernels are defined for t >= 0");
    return std::visit([t](const auto& k) { return evaluate(k, t); }, family_);
  }

  double real(double t) const { return (*this)(t).real(); }

 private:
  static std::complex<double> evaluate(const ExponentialKernel& k, double t) {
    return k.a * std::exp(-k.lambda * t);
  }
  static std::complex<double> evaluate(const GaussianKernel& k, double t) {
    return k.a * std::exp(-t * t / (2.0 * k.sigma * k.sigma));
  }
  static std::complex<double> evaluate(const TableKernel& k, double t) {
    auto interp = [&](const std::vector<double>& y) {
      if (y.empty()) return 0.0;
      if (t <= k.times.front()) return y.front();
      if (t >= k.times.back()) return y.back();
      const auto it = std::upper_bound(k.times.begin(), k.times.end(), t);
      const std::size_t hi = static_cast<std::size_t>(it - k.times.begin());
      const std::size_t lo = hi - 1;
      const double w = (t - k.times[lo]) / (k.times[hi] - k.times[lo]);
      return (1.0 - w) * y[lo] + w * y[hi];
    };
    return {interp(k.values), interp(k.values_im)};
  }

  Family family_;
};

}  // namespace darklab
