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

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "darklab/analysis.hpp"
#include "darklab/errors.hpp"
#include "darklab/kernel.hpp"
#include "darklab/simulate.hpp"
#include "darklab/synthesis.hpp"
#include "darklab/system.hpp"

namespace darklab::io {

using Json = nlohmann::json;

/// Shortest text that is guaranteed to round-trip: 17 significant digits.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline double number_from_json(const Json& j, const std::string& what,
                               ErrorKind kind = ErrorKind::MalformedInput) {
  require(j.is_number(), kind, what + " must be a number");
  return j.get<double>();
}

/// Row-major matrix from an array of equal-length arrays of numbers. An
/// empty array gives a 0 x cols matrix when cols is known.
inline Matrix matrix_from_json(const Json& j, const std::string& what,
                               ErrorKind kind = ErrorKind::MalformedInput, Index cols_if_empty = 0) {
  require(j.is_array(), kind, what + " must be an array of rows");
  if (j.empty()) return Matrix(0, cols_if_empty);
  require(j.front().is_array(), kind, what + " rows must be arrays");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Index>(row.size()) == cols, kind,
            what + " rows must all have the same length");
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = number_from_json(row[static_cast<std::size_t>(c)], what + " entry", kind);
    }
  }
  return m;
}

inline std::vector<double> doubles_from_json(const Json& j, const std::string& what,
                                             ErrorKind kind = ErrorKind::MalformedInput) {
  require(j.is_array(), kind, what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : j) out.push_back(number_from_json(x, what + " entry", kind));
  return out;
}

inline Kernel kernel_from_json(const Json& j) {
  require(j.is_object() && j.contains("family") && j["family"].is_string(),
          ErrorKind::MalformedInput, "kernel needs a string \"family\"");
  const std::string family = j["family"].get<std::string>();
  auto field = [&](const char* key) {
    require(j.contains(key), ErrorKind::MalformedInput,
            family + " kernel is missing \"" + key + "\"");
    return number_from_json(j[key], std::string("kernel ") + key);
  };
  try {
    if (family == "exponential") return ExponentialKernel{field("a"), field("lambda")};
    if (family == "gaussian") return GaussianKernel{field("a"), field("sigma")};
    if (family == "table") {
      require(j.contains("times") && j.contains("values"), ErrorKind::MalformedInput,
              "table kernel needs \"times\" and \"values\"");
      TableKernel t{doubles_from_json(j["times"], "kernel times"),
                    doubles_from_json(j["values"], "kernel values"), {}};
      if (j.contains("values_im")) t.values_im = doubles_from_json(j["values_im"], "kernel values_im");
      return t;
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument) fail(ErrorKind::MalformedInput, e.what());
    throw;
  }
  if (family == "dirac" || family == "delta" || family == "markovian" || family == "white") {
    fail(ErrorKind::UnsupportedKernel,
         "Markovian (delta) kernels have no function value; use a colored-noise kernel");
  }
  fail(ErrorKind::MalformedInput, "unknown kernel family \"" + family + "\"");
}

inline Json kernel_to_json(const Kernel& k) {
  return std::visit(
      [](const auto& f) -> Json {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ExponentialKernel>) {
          return Json{{"family", "exponential"}, {"a", f.a}, {"lambda", f.lambda}};
        } else if constexpr (std::is_same_v<T, GaussianKernel>) {
          return Json{{"family", "gaussian"}, {"a", f.a}, {"sigma", f.sigma}};
        } else {
          Json out{{"family", "table"}, {"times", f.times}, {"values", f.values}};
          if (!f.values_im.empty()) out["values_im"] = f.values_im;
          return out;
        }
      },
      k.family());
}

/// Coupling and kernels without a Hamiltonian, as read by `synthesize`.
struct CouplingSpec {
  Index n = 0;
  Index M = 0;
  Matrix v;
  std::vector<Kernel> kernels;
  std::optional<double> tol;
};

inline Index positive_int(const Json& j, const char* key) {
  require(j.contains(key), ErrorKind::MalformedInput, std::string("missing \"") + key + "\"");
  require(j[key].is_number_integer() && j[key].get<long long>() >= 1, ErrorKind::MalformedInput,
          std::string("\"") + key + "\" must be a positive integer");
  return static_cast<Index>(j[key].get<long long>());
}

inline CouplingSpec coupling_from_json(const Json& j) {
  require(j.is_object(), ErrorKind::MalformedInput, "system file must hold a JSON object");
  CouplingSpec c;
  c.n = positive_int(j, "n");
  c.M = positive_int(j, "M");
  require(j.contains("coupling") && j["coupling"].is_object(), ErrorKind::MalformedInput,
          "missing \"coupling\" object");
  const Json& cp = j["coupling"];
  if (cp.contains("V")) {
    c.v = matrix_from_json(cp["V"], "coupling V");
  } else if (cp.contains("complex_vectors")) {
    const Json& cv = cp["complex_vectors"];
    require(cv.is_array(), ErrorKind::MalformedInput, "complex_vectors must be an array");
    require(static_cast<Index>(cv.size()) == c.M, ErrorKind::DimensionMismatch,
            "expected M complex coupling vectors");
    std::vector<ComplexVector> vecs;
    for (const auto& vec : cv) {
      const Matrix pairs = matrix_from_json(vec, "complex coupling vector", ErrorKind::MalformedInput, 2);
      require(pairs.cols() == 2, ErrorKind::MalformedInput,
              "complex coupling entries must be [re, im] pairs");
      require(pairs.rows() == 2 * c.n, ErrorKind::DimensionMismatch,
              "complex coupling vectors must have 2n entries");
      ComplexVector z(pairs.rows());
      for (Index i = 0; i < pairs.rows(); ++i) z(i) = {pairs(i, 0), pairs(i, 1)};
      vecs.push_back(std::move(z));
    }
    c.v = build_v(vecs);
  } else {
    fail(ErrorKind::MalformedInput, "coupling needs \"V\" or \"complex_vectors\"");
  }
  require(c.v.rows() == 2 * c.M && c.v.cols() == 2 * c.n, ErrorKind::DimensionMismatch,
          "V must be 2M x 2n");
  require(j.contains("kernels") && j["kernels"].is_array(), ErrorKind::MalformedInput,
          "missing \"kernels\" array");
  for (const auto& k : j["kernels"]) c.kernels.push_back(kernel_from_json(k));
  require(static_cast<Index>(c.kernels.size()) == c.M, ErrorKind::DimensionMismatch,
          "expected one kernel per channel");
  if (j.contains("tol") && !j["tol"].is_null()) {
    const double tol = number_from_json(j["tol"], "tol");
    require(tol >= 0.0, ErrorKind::MalformedInput, "tol must be nonnegative");
    c.tol = tol;
  }
  return c;
}

inline SystemSpec system_from_json(const Json& j, std::vector<std::string>* warnings = nullptr) {
  CouplingSpec c = coupling_from_json(j);
  require(j.contains("omega"), ErrorKind::MalformedInput, "missing \"omega\"");
  Matrix omega = matrix_from_json(j["omega"], "omega");
  require(omega.rows() == 2 * c.n && omega.cols() == 2 * c.n, ErrorKind::DimensionMismatch,
          "omega must be 2n x 2n");
  return make_system(std::move(omega), std::move(c.v), std::move(c.kernels), c.tol, warnings);
}

inline Json system_to_json(const SystemSpec& spec) {
  Json kernels = Json::array();
  for (const auto& k : spec.kernels) kernels.push_back(kernel_to_json(k));
  Json out{{"n", spec.n},
           {"M", spec.M},
           {"omega", matrix_to_json(spec.omega)},
           {"coupling", Json{{"V", matrix_to_json(spec.v)}}},
           {"kernels", std::move(kernels)}};
  if (spec.tol) out["tol"] = *spec.tol;
  return out;
}

inline Json residuals_to_json(const CertificateResiduals& r) {
  return Json{{"ccr", r.ccr},
              {"noise_decoupling", r.noise_decoupling},
              {"invariance", r.invariance},
              {"output_decoupling", r.output_decoupling}};
}

inline Json certificate_to_json(const DarkModeCertificate& c) {
  return Json{{"s_d", matrix_to_json(c.s_d)},
              {"s_b", matrix_to_json(c.s_b)},
              {"a_d", matrix_to_json(c.a_d)},
              {"residuals", residuals_to_json(c.residuals)},
              {"verified", c.verified},
              {"tol", c.tol}};
}

/// Reads S_D, S_B, A_D and tol. Stored residuals are informational; callers
/// recompute them against a system.
inline DarkModeCertificate certificate_from_json(const Json& j) {
  constexpr auto bad = ErrorKind::MalformedCertificate;
  require(j.is_object() && j.contains("s_d") && j.contains("a_d"), bad,
          "certificate needs \"s_d\" and \"a_d\"");
  DarkModeCertificate c;
  c.s_d = matrix_from_json(j["s_d"], "s_d", bad);
  require(c.s_d.rows() > 0 && c.s_d.rows() % 2 == 0, bad, "s_d must have 2l rows, l >= 1");
  c.s_b = j.contains("s_b") ? matrix_from_json(j["s_b"], "s_b", bad, c.s_d.cols())
                            : Matrix(0, c.s_d.cols());
  require(c.s_b.rows() == 0 || c.s_b.cols() == c.s_d.cols(), bad, "s_b and s_d widths differ");
  c.a_d = matrix_from_json(j["a_d"], "a_d", bad);
  require(c.a_d.rows() == c.s_d.rows() && c.a_d.cols() == c.s_d.rows(), bad,
          "a_d must be 2l x 2l");
  if (j.contains("tol")) c.tol = number_from_json(j["tol"], "tol", bad);
  if (j.contains("verified")) {
    require(j["verified"].is_boolean(), bad, "verified must be a boolean");
    c.verified = j["verified"].get<bool>();
  }
  if (j.contains("residuals")) {
    const Json& r = j["residuals"];
    require(r.is_object(), bad, "residuals must be an object");
    auto get = [&](const char* key) {
      return r.contains(key) ? number_from_json(r[key], key, bad) : 0.0;
    };
    c.residuals = {get("ccr"), get("noise_decoupling"), get("invariance"), get("output_decoupling")};
  }
  return c;
}

inline SynthesisTarget target_from_json(const Json& j) {
  require(j.is_object() && j.contains("omega_dark"), ErrorKind::MalformedInput,
          "target needs \"omega_dark\"");
  SynthesisTarget t;
  t.omega_dark = matrix_from_json(j["omega_dark"], "omega_dark");
  if (j.contains("mu")) t.mu = doubles_from_json(j["mu"], "mu");
  if (j.contains("alpha")) {
    // Stored one vector per row; used as columns.
    t.alpha = matrix_from_json(j["alpha"], "alpha").transpose();
  }
  return t;
}

inline Json read_json_file(const std::string& path, ErrorKind on_error = ErrorKind::MalformedInput) {
  std::ifstream in(path);
  require(in.good(), on_error, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    fail(on_error, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::Io, "cannot write " + path);
  out << text;
  require(out.good(), ErrorKind::Io, "failed writing " + path);
}

inline void write_json_file(const std::string& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

/// Header `t,x_1..x_2n,y_1..y_2M`, one row per grid point.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (Index i = 0; i < traj.states.rows(); ++i) out << ",x_" << i + 1;
  for (Index i = 0; i < traj.outputs.rows(); ++i) out << ",y_" << i + 1;
  out << "\n";
  for (Index k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[static_cast<std::size_t>(k)]);
    for (Index i = 0; i < traj.states.rows(); ++i) out << ',' << format_double(traj.states(i, k));
    for (Index i = 0; i < traj.outputs.rows(); ++i) out << ',' << format_double(traj.outputs(i, k));
    out << "\n";
  }
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    parts.emplace_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorKind::InvalidArgument, "cannot parse " + what + " from \"" + text + "\"");
  }
  require(used == text.size() && std::isfinite(value), ErrorKind::InvalidArgument,
          "cannot parse " + what + " from \"" + text + "\"");
  return value;
}

/// Comma-separated numbers, e.g. "1,0,0,0".
inline Vector parse_vector_csv(std::string_view text) {
  const auto parts = split(text, ',');
  Vector v(static_cast<Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Index>(i)) = parse_double(parts[i], "vector entry");
  return v;
}

/// CSV table with rows `t,u_1,...,u_2M`; a first line that does not parse as
/// numbers is taken as a header.
inline DriveSignal read_drive_table(const std::string& path, Index width) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::InvalidArgument, "cannot open drive table " + path);
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto parts = split(line, ',');
    std::vector<double> nums;
    try {
      for (const auto& p : parts) nums.push_back(parse_double(p, "drive table entry"));
    } catch (const Error&) {
      if (first) {
        first = false;
        continue;
      }
      throw;
    }
    first = false;
    require(static_cast<Index>(nums.size()) == width + 1, ErrorKind::DimensionMismatch,
            "drive table rows need t plus 2M values");
    times.push_back(nums.front());
    rows.emplace_back(nums.begin() + 1, nums.end());
  }
  Matrix values(static_cast<Index>(rows.size()), width);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (Index c = 0; c < width; ++c) values(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return DriveSignal::piecewise(std::move(times), std::move(values));
}

/// Drive mini-language:
///   zero
///   sin:amp=A,freq=W,phase=P,channels=0+2   (u_i = A sin(W t + P) on the
///                                            listed 0-based components, all
///                                            components when omitted)
///   table:PATH
inline DriveSignal parse_drive(std::string_view text, Index width) {
  if (text == "zero") return DriveSignal::zero(width);
  if (text.rfind("table:", 0) == 0) return read_drive_table(std::string(text.substr(6)), width);
  require(text.rfind("sin:", 0) == 0, ErrorKind::InvalidArgument,
          "drive must be zero, sin:..., or table:PATH");
  double amp = 1.0, freq = 1.0, phase = 0.0;
  std::vector<Index> channels;
  for (const auto& item : split(text.substr(4), ',')) {
    const auto eq = item.find('=');
    require(eq != std::string::npos, ErrorKind::InvalidArgument, "drive option needs key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "amp") {
      amp = parse_double(value, "amp");
    } else if (key == "freq") {
      freq = parse_double(value, "freq");
    } else if (key == "phase") {
      phase = parse_double(value, "phase");
    } else if (key == "channels") {
      for (const auto& c : split(value, '+')) {
        const double idx = parse_double(c, "channel index");
        require(idx >= 0 && idx < static_cast<double>(width) && idx == std::floor(idx),
                ErrorKind::InvalidArgument, "channel index out of range");
        channels.push_back(static_cast<Index>(idx));
      }
    } else {
      fail(ErrorKind::InvalidArgument, "unknown drive option \"" + key + "\"");
    }
  }
  Vector amplitudes = Vector::Zero(width);
  if (channels.empty()) {
    amplitudes.setConstant(amp);
  } else {
    for (Index c : channels) amplitudes(c) = amp;
  }
  return DriveSignal::sinusoid(std::move(amplitudes), freq, phase);
}

}  // namespace darklab::io
