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

// Command implementations behind the `darklab` executable. Each command reads
// and writes files, reports through the given streams, and returns the
// process exit status. Library errors are mapped by exit_code().

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "darklab/analysis.hpp"
#include "darklab/io.hpp"
#include "darklab/section5.hpp"
#include "darklab/simulate.hpp"
#include "darklab/synthesis.hpp"

namespace darklab::cli {

namespace exit {
inline constexpr int kOk = 0;
inline constexpr int kNone = 1;          // analyze: no dark modes; verify: residual failure
inline constexpr int kInconclusive = 2;  // analyze
inline constexpr int kInsufficientCapacity = 3;
inline constexpr int kMethodKernelMismatch = 4;
inline constexpr int kMalformed = 64;
inline constexpr int kDimension = 65;
inline constexpr int kMalformedCertificate = 66;
inline constexpr int kInternal = 70;
inline constexpr int kIo = 74;
}  // namespace exit

inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InsufficientDarkCapacity: return exit::kInsufficientCapacity;
    case ErrorKind::MethodKernelMismatch: return exit::kMethodKernelMismatch;
    case ErrorKind::MalformedInput:
    case ErrorKind::UnsupportedKernel:
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidTarget:
    case ErrorKind::NonSymmetricTarget:
    case ErrorKind::StepTooLarge: return exit::kMalformed;
    case ErrorKind::DimensionMismatch: return exit::kDimension;
    case ErrorKind::MalformedCertificate: return exit::kMalformedCertificate;
    case ErrorKind::Io: return exit::kIo;
    default: return exit::kInternal;
  }
}

/// Runs `body`, turning library errors into exit codes with a message on err.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit::kInternal;
  }
}

/// Relative rank tolerance: command line, then the spec file, then the
/// DARKLAB_TOL environment variable, then the built-in default.
inline std::optional<double> resolve_tol(std::optional<double> cli, std::optional<double> spec) {
  if (cli) {
    require(*cli >= 0.0 && std::isfinite(*cli), ErrorKind::InvalidArgument,
            "--tol must be a nonnegative number");
    return cli;
  }
  if (spec) return spec;
  if (const char* env = std::getenv("DARKLAB_TOL"); env != nullptr && *env != '\0') {
    const double tol = io::parse_double(env, "DARKLAB_TOL");
    require(tol >= 0.0, ErrorKind::InvalidArgument, "DARKLAB_TOL must be nonnegative");
    return tol;
  }
  return std::nullopt;
}

inline SystemSpec load_system(const std::string& path, std::optional<double> cli_tol,
                              std::ostream& err) {
  std::vector<std::string> warnings;
  SystemSpec spec = io::system_from_json(io::read_json_file(path), &warnings);
  for (const auto& w : warnings) err << "warning: " << w << "\n";
  spec.tol = resolve_tol(cli_tol, spec.tol);
  return spec;
}

/// Writes text to `path`, or to `out` when the path is empty or "-".
inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text_file(path, text);
  }
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string system;
  std::optional<double> tol;
  std::optional<double> cert_tol;
  std::string out;
  bool timing = false;
};

/// Report for a verdict. Keys are sorted by the JSON library, so the dump is
/// deterministic for fixed inputs.
inline io::Json analysis_report(const SystemSpec& spec, const Verdict& v, const AnalysisOptions& opts) {
  io::Json report;
  const auto& d = v.diagnostics;
  report["dimensions"] = {{"n", spec.n},
                          {"M", spec.M},
                          {"dim_ker_vj", d.dim_kernel},
                          {"dim_invariant", d.dim_invariant},
                          {"dim_radical", d.dim_radical},
                          {"dim_h_d", d.dim_h_d}};
  report["diagnostics"] = {{"tier", d.tier}, {"candidates_tried", d.candidates_tried}};
  report["tolerances"] = {{"rank_tol", opts.rank_tol.value_or(spec.rank_tol())},
                          {"certificate_tol", opts.certificate_tol}};

  const Assumption1Report a1 = assumption1_check(spec, opts.horizon, opts.samples);
  io::Json channels = io::Json::array();
  for (const auto& ch : a1.channels) {
    channels.push_back({{"t1", ch.t1}, {"value", ch.value}, {"flagged", ch.flagged}});
  }
  report["assumption1"] = {{"satisfied", a1.satisfied()}, {"channels", channels}};
  if (a1.common_t1) report["assumption1"]["common_t1"] = *a1.common_t1;

  if (v.exists()) {
    const DarkModeCertificate& cert = v.certificate();
    report["verdict"] = {{"status", "Exists"}, {"dark_dim", cert.s_d.rows()}};
    report["residuals"] = io::residuals_to_json(cert.residuals);
    report["certificate"] = io::certificate_to_json(cert);
    const ForbiddenCouplingReport fc = forbidden_coupling_report(spec, &cert);
    report["forbidden_coupling"] = {{"d0", fc.d0},
                                    {"d_s", *fc.d_s},
                                    {"required", *fc.required},
                                    {"necessary_condition_met", *fc.necessary_condition_met}};
  } else if (v.none()) {
    report["verdict"] = {{"status", "None"}, {"reason", std::string(to_string(v.reason()))}};
  } else {
    report["verdict"] = {{"status", "Inconclusive"},
                         {"note", std::get<Inconclusive>(v.outcome).note}};
  }
  return report;
}

inline int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    const SystemSpec spec = load_system(o.system, o.tol, err);
    AnalysisOptions opts;
    if (o.cert_tol) opts.certificate_tol = *o.cert_tol;
    const Verdict verdict = detect_dark_modes(spec, opts);
    io::Json report = analysis_report(spec, verdict, opts);
    if (o.timing) {
      const std::chrono::duration<double> secs = std::chrono::steady_clock::now() - start;
      report["timing"] = {{"seconds", secs.count()}};
    }
    emit(o.out, report.dump(2) + "\n", out);
    const std::string status = report["verdict"]["status"].get<std::string>();
    if (!o.out.empty() && o.out != "-") {
      out << "verdict: " << status << " (dim H_D = " << verdict.diagnostics.dim_h_d << ")\n";
    }
    if (verdict.exists()) return exit::kOk;
    return verdict.none() ? exit::kNone : exit::kInconclusive;
  });
}

// ------------------------------------------------------------- synthesize

struct SynthesizeOptions {
  std::string coupling;
  std::string target;
  std::string out;
  std::string cert_out;  // default: <out>.certificate.json
  std::optional<double> tol;
  std::optional<double> cert_tol;
};

inline int cmd_synthesize(const SynthesizeOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const io::CouplingSpec coupling = io::coupling_from_json(io::read_json_file(o.coupling));
    const SynthesisTarget target = io::target_from_json(io::read_json_file(o.target));
    AnalysisOptions opts;
    opts.rank_tol = resolve_tol(o.tol, coupling.tol);
    if (o.cert_tol) opts.certificate_tol = *o.cert_tol;

    const SynthesisResult result = synthesize_omega(coupling.v, coupling.kernels, target, opts);
    const SynthesisResiduals res = verify_synthesis(result, coupling.v, coupling.kernels, opts);
    SystemSpec spec = synthesized_system(result, coupling.v, coupling.kernels);
    spec.tol = coupling.tol;

    emit(o.out, io::system_to_json(spec).dump(2) + "\n", out);
    const std::string cert_path =
        !o.cert_out.empty() ? o.cert_out
                            : (o.out.empty() || o.out == "-" ? "" : o.out + ".certificate.json");
    if (!cert_path.empty()) io::write_json_file(cert_path, io::certificate_to_json(result.certificate));

    const bool ok = result.certificate.verified && res.within(opts.certificate_tol);
    std::ostream& log = (o.out.empty() || o.out == "-") ? err : out;
    log << "dim H_D = " << result.h_d_dim << ", k = " << result.k()
        << ", max residual = " << io::format_double(res.max()) << " -> "
        << (ok ? "VERIFIED" : "FAILED") << "\n";
    return ok ? exit::kOk : exit::kNone;
  });
}

// --------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string system;
  std::string x0;  // comma-separated; empty means zero
  std::string drive = "zero";
  double t_final = 10.0;
  double dt = 1e-3;
  std::string method = "ExpEmbed";
  std::string out;
  std::optional<double> tol;
};

inline Method parse_method(const std::string& name) {
  if (name == "ExpEmbed" || name == "exp-embed" || name == "expembed") return Method::ExpEmbed;
  if (name == "TrapezoidVolterra" || name == "trapezoid" || name == "trapezoid-volterra") {
    return Method::TrapezoidVolterra;
  }
  fail(ErrorKind::InvalidArgument, "unknown method \"" + name + "\"");
}

inline int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemSpec spec = load_system(o.system, o.tol, err);
    const Method method = parse_method(o.method);
    const Vector x0 = o.x0.empty() ? Vector(Vector::Zero(spec.dim())) : io::parse_vector_csv(o.x0);
    require(x0.size() == spec.dim(), ErrorKind::DimensionMismatch, "--x0 must have 2n entries");
    const DriveSignal drive = io::parse_drive(o.drive, spec.channels());
    const Trajectory traj = simulate_mean(spec, x0, drive, o.t_final, o.dt, method);
    std::ostringstream csv;
    io::write_trajectory_csv(csv, traj);
    emit(o.out, csv.str(), out);
    return exit::kOk;
  });
}

// ----------------------------------------------------------------- verify

struct VerifyOptions {
  std::string system;
  std::string certificate;
  std::optional<double> tol;
  std::optional<double> cert_tol;  // default: the certificate's own tol
};

struct VerifyOutcome {
  CertificateResiduals residuals;
  double generator_mismatch = 0.0;  // |a_d - A_D recomputed|
  double tol = kDefaultCertificateTol;

  double max() const { return std::max(residuals.max(), generator_mismatch); }
  bool passed() const { return max() <= tol; }
};

inline VerifyOutcome verify_against(const SystemSpec& spec, const DarkModeCertificate& cert,
                                    std::optional<double> cert_tol) {
  require(cert.s_d.cols() == spec.dim(), ErrorKind::DimensionMismatch,
          "certificate has " + std::to_string(cert.s_d.cols()) + " columns, system has 2n = " +
              std::to_string(spec.dim()));
  VerifyOutcome v;
  v.tol = cert_tol.value_or(cert.tol);
  v.residuals = verify_certificate(spec, cert);
  v.generator_mismatch = (cert.a_d - dark_generator(spec, cert.s_d)).norm();
  return v;
}

inline std::string residual_table(const VerifyOutcome& v) {
  std::ostringstream t;
  auto row = [&](const char* name, double value) {
    t << std::left << std::setw(20) << name << io::format_double(value) << "  "
      << (value <= v.tol ? "ok" : "FAIL") << "\n";
  };
  t << std::left << std::setw(20) << "residual" << "value (tol " << io::format_double(v.tol) << ")\n";
  row("ccr", v.residuals.ccr);
  row("noise_decoupling", v.residuals.noise_decoupling);
  row("invariance", v.residuals.invariance);
  row("output_decoupling", v.residuals.output_decoupling);
  row("generator", v.generator_mismatch);
  t << (v.passed() ? "VERIFIED" : "NOT VERIFIED") << "\n";
  return t.str();
}

inline int cmd_verify(const VerifyOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SystemSpec spec = load_system(o.system, o.tol, err);
    const DarkModeCertificate cert = io::certificate_from_json(
        io::read_json_file(o.certificate, ErrorKind::MalformedCertificate));
    const VerifyOutcome v = verify_against(spec, cert, o.cert_tol);
    out << residual_table(v);
    return v.passed() ? exit::kOk : exit::kNone;
  });
}

// ---------------------------------------------------------------- example

struct ExampleOptions {
  std::string name = "section5";
  double m = 1.0;
  double omega = 2.0;
  std::string out_dir = "darklab-example";
  double t_final = 10.0;
  double dt = 1e-3;
};

struct ComparisonRow {
  std::string quantity;
  double deviation = 0.0;
  double tol = 0.0;
  bool pass() const { return deviation <= tol; }
};

/// Compares a synthesized benchmark system against the published closed
/// forms. Exposed separately so tests can inspect individual rows.
inline std::vector<ComparisonRow> section5_comparison(const SynthesisResult& result,
                                                     const Trajectory& traj, double m, double w) {
  std::vector<ComparisonRow> rows;
  auto maxabs = [](const Matrix& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); };
  const double scale = std::max({1.0, m * w * w, 1.0 / m});
  const double tight = 1e-12 * scale;

  rows.push_back({"omega", maxabs(result.omega - section5::closed_form_omega(m, w)), tight});
  rows.push_back({"s_d", maxabs(result.s_d - section5::reference_s_d()), 1e-12});
  rows.push_back({"a_d", maxabs(result.certificate.a_d - section5::a_h_dark(m, w)), tight});

  const SystemSpec spec = make_system(result.omega, section5::coupling(), section5::kernels());
  const TransformedSystem ts = transform_system(spec, section5::reference_s());
  Matrix block = Matrix::Zero(6, 6);
  block.topLeftCorner(2, 2) = section5::a_h_dark(m, w);
  rows.push_back({"S A_H S^-1", maxabs(ts.a_h - block), tight});
  rows.push_back({"S B top", maxabs(ts.b.topRows(2)), 1e-12});
  rows.push_back({"B_2", maxabs(ts.b.bottomRows(4) - section5::b2()), 1e-12});
  const Matrix v_sinv = spec.v * ts.s_inv;
  rows.push_back({"V S^-1 dark", maxabs(v_sinv.leftCols(2)), 1e-12});
  rows.push_back({"V_2", maxabs(v_sinv.rightCols(4) - section5::v2()), 1e-12});

  double memory_dev = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double t = 5.0 * i / 9.0;
    const double g1 = std::exp(-t), g2 = 0.5 * std::exp(-2.0 * t);
    Matrix expected = Matrix::Zero(6, 6);
    expected.bottomRightCorner(4, 4) = section5::a_gamma_bright(g1, g2);
    memory_dev = std::max(memory_dev, maxabs(ts.memory(t) - expected));
  }
  rows.push_back({"A_Gamma^B", memory_dev, 1e-10});

  const Vector xd0 = result.s_d * traj.states.col(0);
  const Matrix reference = closed_form_dark(section5::a_h_dark(m, w), xd0, traj.times);
  const Matrix simulated = result.s_d * traj.states;
  const double ref_scale = std::max(1e-300, reference.colwise().norm().maxCoeff());
  rows.push_back({"dark trajectory (relative)",
                  (simulated - reference).colwise().norm().maxCoeff() / ref_scale, 1e-6});
  return rows;
}

inline int cmd_example(const ExampleOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require(o.name == "section5", ErrorKind::InvalidArgument,
            "unknown example \"" + o.name + "\" (available: section5)");
    require(o.m > 0.0 && o.omega > 0.0, ErrorKind::InvalidArgument, "--m and --omega must be positive");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    require(!ec, ErrorKind::Io, "cannot create " + o.out_dir + ": " + ec.message());
    auto path = [&](const char* file) { return (fs::path(o.out_dir) / file).string(); };

    const Matrix v = section5::coupling();
    const std::vector<Kernel> kernels = section5::kernels();
    const SynthesisTarget target = section5::target(o.m, o.omega);

    io::Json coupling_json{{"n", 3}, {"M", 2}, {"coupling", {{"V", io::matrix_to_json(v)}}}};
    coupling_json["kernels"] = io::Json::array();
    for (const auto& k : kernels) coupling_json["kernels"].push_back(io::kernel_to_json(k));
    io::write_json_file(path("coupling.json"), coupling_json);
    io::write_json_file(path("target.json"), {{"omega_dark", io::matrix_to_json(target.omega_dark)}});

    const SynthesisResult result = synthesize_omega(v, kernels, target);
    const SystemSpec spec = synthesized_system(result, v, kernels);
    io::write_json_file(path("system.json"), io::system_to_json(spec));
    io::write_json_file(path("certificate.json"), io::certificate_to_json(result.certificate));

    const AnalysisOptions opts;
    const Verdict verdict = detect_dark_modes(spec, opts);
    io::write_json_file(path("analysis.json"), analysis_report(spec, verdict, opts));
    const VerifyOutcome verified = verify_against(spec, result.certificate, std::nullopt);
    io::write_text_file(path("verify.txt"), residual_table(verified));

    // Dark kick plus a bright offset, zero drive.
    Vector x0 = result.s_d.transpose() * Vector::Unit(2, 0);
    x0 += 0.5 * section5::reference_s_b().row(0).transpose();
    const Trajectory traj = simulate_mean(spec, x0, DriveSignal::zero(spec.channels()),
                                          o.t_final, o.dt, Method::ExpEmbed);
    {
      std::ostringstream csv;
      io::write_trajectory_csv(csv, traj);
      io::write_text_file(path("trajectory.csv"), csv.str());
    }

    std::vector<ComparisonRow> rows = section5_comparison(result, traj, o.m, o.omega);
    rows.push_back({"verify", verified.max(), verified.tol});
    rows.push_back({"analysis dim H_D - 2",
                    std::abs(static_cast<double>(verdict.diagnostics.dim_h_d) - 2.0), 0.0});
    rows.push_back({"analysis verdict Exists", verdict.exists() ? 0.0 : 1.0, 0.0});

    std::ostringstream csv;
    csv << "quantity,max_abs_deviation,tolerance,pass\n";
    bool all = true;
    out << std::left << std::setw(28) << "quantity" << std::setw(26) << "max_abs_deviation"
        << std::setw(26) << "tolerance" << "pass\n";
    for (const auto& r : rows) {
      csv << r.quantity << ',' << io::format_double(r.deviation) << ','
          << io::format_double(r.tol) << ',' << (r.pass() ? "true" : "false") << "\n";
      out << std::left << std::setw(28) << r.quantity << std::setw(26)
          << io::format_double(r.deviation) << std::setw(26) << io::format_double(r.tol)
          << (r.pass() ? "yes" : "NO") << "\n";
      all = all && r.pass();
    }
    io::write_text_file(path("comparison.csv"), csv.str());
    out << "artifacts written to " << o.out_dir << "\n";
    return all ? exit::kOk : exit::kNone;
  });
}

}  // namespace darklab::cli
