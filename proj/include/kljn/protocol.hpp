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

#include <cstdint>
#include <string>
#include <vector>

#include "kljn/noise.hpp"
#include "kljn/transient.hpp"

namespace kljn {

/// Resistor choice of one party: L encodes bit 0, H encodes bit 1.
enum class Choice : std::uint8_t { L = 0, H = 1 };

inline Choice other(Choice c) { return c == Choice::L ? Choice::H : Choice::L; }
inline char to_char(Choice c) { return c == Choice::L ? 'L' : 'H'; }

struct Arrangement {
  Choice alice = Choice::L;
  Choice bob = Choice::H;

  Arrangement mirrored() const { return {bob, alice}; }
  bool operator==(const Arrangement&) const = default;
};

inline constexpr Arrangement kLH{Choice::L, Choice::H};
inline constexpr Arrangement kHL{Choice::H, Choice::L};

std::string to_string(Arrangement a);

enum class ArrangementMode { FixedLH, Random };
/// Which mean-square level a legitimate party reads. Combined uses the loop
/// current when the party holds R_L and the voltage when it holds R_H, i.e.
/// whichever pair of candidate levels is further apart.
enum class MeasurementChannel { Voltage, Current, Combined };

/// T_eff that makes a 1 kOhm resistor produce 1 V rms over 250 Hz.
inline constexpr double kDefaultTeff = 1.0 / (4.0 * kBoltzmann * 1000.0 * 250.0);

struct ProtocolConfig {
  double r_low = 1e3;
  double r_high = 9e3;
  double t_eff = kDefaultTeff;
  double bandwidth_hz = 250.0;
  double t_s = 1e-3;
  int bep_units = 100;
  ArrangementMode arrangement = ArrangementMode::FixedLH;
  MeasurementChannel channel = MeasurementChannel::Voltage;

  void validate() const;
  double resistance(Choice c) const { return c == Choice::L ? r_low : r_high; }
  /// Noise autocorrelation time 1 / (4 B); one BEP unit.
  double autocorrelation_time() const { return 1.0 / (4.0 * bandwidth_hz); }
  double bep_duration() const { return bep_units * t_s; }

  bool operator==(const ProtocolConfig&) const = default;
};

/// Mean-square channel voltage and current for each arrangement class.
struct NoiseLevels {
  double uu_ll = 0.0, uu_lh = 0.0, uu_hh = 0.0;
  double ii_ll = 0.0, ii_lh = 0.0, ii_hh = 0.0;

  double voltage(Choice a, Choice b) const;
  double current(Choice a, Choice b) const;
};

/// 4 k T_eff B R_par (voltage) and 4 k T_eff B / (R_A + R_B) (current).
NoiseLevels expected_levels(const ProtocolConfig& config);

/// Classifies `mean_sq` against the two levels possible for the party's own
/// choice on the given channel (Voltage or Current). The threshold is the
/// geometric mean of the two candidates; a value exactly on the threshold
/// resolves to the higher level.
Choice infer_remote_bit(Choice own, double mean_sq, const NoiseLevels& levels,
                        MeasurementChannel channel = MeasurementChannel::Voltage);

Choice infer_remote_bit(Choice own, double mean_sq_u, double mean_sq_i, const NoiseLevels& levels,
                        MeasurementChannel channel);

enum class ExchangeClass { Secure, Discard };
ExchangeClass classify_exchange(Choice alice, Choice bob);

struct BepSeeds {
  std::uint64_t alice = 0;
  std::uint64_t bob = 0;

  BepSeeds mirrored() const { return {bob, alice}; }
};

/// Everything observed during one bit-exchange period.
struct BepMeasurement {
  std::size_t bit_index = 0;
  Arrangement arrangement;
  // Local mean squares at each party's own cable end.
  double mean_sq_u = 0.0;  // Alice end
  double mean_sq_i = 0.0;
  double mean_sq_u_bob = 0.0;
  double mean_sq_i_bob = 0.0;
  double t_s = 1e-3;
  // Probe records at t_s, bep_units samples each. Currents point into the cable.
  std::vector<double> u_cha, i_cha, u_chb, i_chb;
};

/// Runs one BEP on a live solver: sets both party resistors, attaches fresh
/// noise (rms per Johnson's formula, generated at the solver step) and
/// advances bep_units * t_s. State carries over from the previous BEP.
BepMeasurement run_bep(TransientSolver& solver, const ProtocolConfig& config, std::size_t bit_index,
                       Arrangement arrangement, const BepSeeds& seeds);

}  // namespace kljn
