/*
 * Copyright 2026 The kljnsim Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kljn/netlist.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

struct SolverConfig {
  double internal_step_s = 1e-3 / 32.0;
  /// Relative residual bound ||Ax - b|| / (||A|| ||x|| + ||b||) per solve.
  double tolerance = 1e-9;
  /// Take one backward-Euler step after a source discontinuity so stiff
  /// ladder modes are damped instead of ringing at the step rate.
  bool backward_euler_restart = true;
  /// Residual is evaluated on every n-th step.
  std::size_t residual_check_interval = 256;

  /// Throws ConfigError unless 0 < step <= t_s and 0 < tolerance <= 1e-6.
  void validate(double t_s) const;

  bool operator==(const SolverConfig&) const = default;
};

struct SolverDiagnostics {
  double max_residual = 0.0;
  std::size_t step_count = 0;
  std::size_t factorizations = 0;
};

struct TransientResult {
  /// One waveform per netlist probe, all sampled at t_s.
  std::map<std::string, Waveform> probes;
  SolverDiagnostics diagnostics;
};

/// Per-source sample blocks for one `advance` call, indexed by waveform name.
using SourceBlock = std::map<std::string, std::span<const double>>;

/// Probe samples recorded during one `advance` call, in netlist probe order.
struct ProbeBlock {
  std::vector<std::string> names;
  std::vector<std::vector<double>> samples;

  const std::vector<double>& at(const std::string& name) const;
};

/// Modified nodal analysis with trapezoidal companion models for C and L.
///
/// Unknowns are non-ground node voltages plus the branch currents of voltage
/// sources (independent and controlled). The system matrix depends only on
/// the step and element values, so one sparse LU per resistor configuration
/// is cached and reused. State (capacitor voltages, inductor currents) is
/// carried across `advance` calls; initial conditions are all zero.
class TransientSolver {
 public:
  TransientSolver(Netlist netlist, SolverConfig config);
  ~TransientSolver();
  TransientSolver(TransientSolver&&) noexcept;
  TransientSolver& operator=(TransientSolver&&) noexcept;

  /// Changes a resistor value; the matching factorization is built or reused.
  void set_resistance(const std::string& branch, double ohms);

  /// Steps `n_steps` times. Sample j of each named source is the source value
  /// at the end of step j. Probes are recorded after every `decimation`-th
  /// step. With `discontinuity` set, the first step uses backward Euler (when
  /// enabled in the config).
  ProbeBlock advance(const SourceBlock& sources, std::size_t n_steps, std::size_t decimation,
                     bool discontinuity = false);

  double time() const noexcept;
  const SolverDiagnostics& diagnostics() const noexcept;
  const Netlist& netlist() const noexcept;
  const SolverConfig& config() const noexcept;

  double node_voltage(const std::string& node) const;
  /// a->b current through the named branch at the current time.
  double branch_current(const std::string& branch) const;
  /// Sum of C v^2 / 2 over capacitors plus L i^2 / 2 over inductors.
  double stored_energy() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot solve from zero state: `duration_s` at the configured internal
/// step, probes decimated to `t_s` (first sample at t = t_s). Source
/// waveforms are sampled at the internal step from t = 0 and need
/// duration / step + 1 samples; the t = 0 sample is not used.
TransientResult transient_solve(const Netlist& netlist, const std::map<std::string, Waveform>& sources,
                                const SolverConfig& config, double duration_s, double t_s);

/// Drives `source` with sin(2 pi f t) (all other waveform sources at 0),
/// discards `settle_s` and least-squares fits the probe over `n_periods`.
/// Returns complex gain relative to the drive. Throws ArgumentError when f
/// is at or above the Nyquist rate of the internal step.
std::complex<double> frequency_response_check(const Netlist& netlist, const std::string& source,
                                              const std::string& probe, double f_hz, const SolverConfig& config,
                                              double settle_s, int n_periods = 20);

}  // namespace kljn
