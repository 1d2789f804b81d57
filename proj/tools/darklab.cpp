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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "darklab/commands.hpp"

namespace {

// Options that were not given stay unset so lower-precedence sources apply.
std::optional<double> given(const CLI::Option* opt, double value) {
  return opt->count() > 0 ? std::optional<double>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace darklab::cli;
  CLI::App app{"darklab: dark modes of non-Markovian linear quantum systems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "darklab 0.1.0");

  AnalyzeOptions analyze;
  double analyze_tol = 0.0, analyze_cert_tol = 0.0;
  auto* a = app.add_subcommand("analyze", "decide whether a system has dark modes");
  a->add_option("--system", analyze.system, "system JSON")->required();
  auto* a_tol = a->add_option("--tol", analyze_tol, "relative rank tolerance");
  auto* a_ctol = a->add_option("--cert-tol", analyze_cert_tol, "certificate residual tolerance");
  a->add_option("--out", analyze.out, "report path (default: stdout)");
  a->add_flag("--timing", analyze.timing, "include wall time in the report");

  SynthesizeOptions synth;
  double synth_tol = 0.0, synth_cert_tol = 0.0;
  auto* s = app.add_subcommand("synthesize", "engineer a Hamiltonian with a target dark mode");
  s->add_option("--coupling", synth.coupling, "coupling and kernels JSON")->required();
  s->add_option("--target", synth.target, "target JSON with omega_dark")->required();
  s->add_option("--out", synth.out, "system JSON path (default: stdout)");
  s->add_option("--cert-out", synth.cert_out, "certificate path (default: <out>.certificate.json)");
  auto* s_tol = s->add_option("--tol", synth_tol, "relative rank tolerance");
  auto* s_ctol = s->add_option("--cert-tol", synth_cert_tol, "certificate residual tolerance");

  SimulateOptions sim;
  double sim_tol = 0.0;
  auto* m = app.add_subcommand("simulate", "integrate the mean dynamics");
  m->add_option("--system", sim.system, "system JSON")->required();
  m->add_option("--x0", sim.x0, "initial mean, comma separated (default: zero)");
  m->add_option("--drive", sim.drive, "zero | sin:amp=A,freq=W,phase=P,channels=i+j | table:PATH");
  m->add_option("--t-final", sim.t_final, "final time")->check(CLI::PositiveNumber);
  m->add_option("--dt", sim.dt, "step size")->check(CLI::PositiveNumber);
  m->add_option("--method", sim.method, "ExpEmbed | TrapezoidVolterra");
  m->add_option("--out", sim.out, "CSV path (default: stdout)");
  auto* m_tol = m->add_option("--tol", sim_tol, "relative rank tolerance");

  VerifyOptions verify;
  double verify_tol = 0.0, verify_cert_tol = 0.0;
  auto* v = app.add_subcommand("verify", "check a certificate against a system");
  v->add_option("--system", verify.system, "system JSON")->required();
  v->add_option("--certificate", verify.certificate, "certificate JSON")->required();
  auto* v_tol = v->add_option("--tol", verify_tol, "relative rank tolerance");
  auto* v_ctol = v->add_option("--cert-tol", verify_cert_tol, "override the certificate's tol");

  ExampleOptions example;
  auto* e = app.add_subcommand("example", "run the built-in three-mode benchmark end to end");
  e->add_option("name", example.name, "example name (section5)");
  e->add_option("--m", example.m, "dark oscillator mass")->check(CLI::PositiveNumber);
  e->add_option("--omega", example.omega, "dark oscillator frequency")->check(CLI::PositiveNumber);
  e->add_option("--out", example.out_dir, "artifact directory");
  e->add_option("--t-final", example.t_final, "simulation horizon")->check(CLI::PositiveNumber);
  e->add_option("--dt", example.dt, "simulation step")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : exit::kMalformed;
  }

  if (a->parsed()) {
    analyze.tol = given(a_tol, analyze_tol);
    analyze.cert_tol = given(a_ctol, analyze_cert_tol);
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  if (s->parsed()) {
    synth.tol = given(s_tol, synth_tol);
    synth.cert_tol = given(s_ctol, synth_cert_tol);
    return cmd_synthesize(synth, std::cout, std::cerr);
  }
  if (m->parsed()) {
    sim.tol = given(m_tol, sim_tol);
    return cmd_simulate(sim, std::cout, std::cerr);
  }
  if (v->parsed()) {
    verify.tol = given(v_tol, verify_tol);
    verify.cert_tol = given(v_ctol, verify_cert_tol);
    return cmd_verify(verify, std::cout, std::cerr);
  }
  return cmd_example(example, std::cout, std::cerr);
}
