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

#include "kljn/protocol.hpp"

#include <cmath>

#include "kljn/cable.hpp"
#include "kljn/error.hpp"
#include "kljn/stats.hpp"

namespace kljn {

std::string to_string(Arrangement a) { return {to_char(a.alice), to_char(a.bob)}; }

void ProtocolConfig::validate() const {
  if (!(r_low > 0.0) || !(r_high > 0.0)) throw ConfigError("protocol resistors must be positive");
  if (r_low == r_high) throw ConfigError("protocol needs R_L != R_H");
  if (!(t_eff >= 0.0)) throw ConfigError("effective temperature must be non-negative");
  if (!(bandwidth_hz > 0.0)) throw ConfigError("noise bandwidth must be positive");
  if (!(t_s > 0.0)) throw ConfigError("measurement interval must be positive");
  if (bep_units < 3) throw ConfigError("a BEP needs at least 3 measurement samples");
}

double NoiseLevels::voltage(Choice a, Choice b) const {
  if (a != b) return uu_lh;
  return a == Choice::L ? uu_ll : uu_hh;
}

double NoiseLevels::current(Choice a, Choice b) const {
  if (a != b) return ii_lh;
  return a == Choice::L ? ii_ll : ii_hh;
}

NoiseLevels expected_levels(const ProtocolConfig& config) {
  const double s = 4.0 * kBoltzmann * config.t_eff * config.bandwidth_hz;
  auto par = [](double a, double b) { return a * b / (a + b); };
  const double rl = config.r_low;
  const double rh = config.r_high;
  NoiseLevels lv;
  lv.uu_ll = s * par(rl, rl);
  lv.uu_lh = s * par(rl, rh);
  lv.uu_hh = s * par(rh, rh);
  lv.ii_ll = s / (rl + rl);
  lv.ii_lh = s / (rl + rh);
  lv.ii_hh = s / (rh + rh);
  return lv;
}

Choice infer_remote_bit(Choice own, double mean_sq, const NoiseLevels& levels, MeasurementChannel channel) {
  if (channel == MeasurementChannel::Combined)
    throw ArgumentError("combined inference needs both voltage and current mean squares");
  const bool voltage = channel == MeasurementChannel::Voltage;
  const double if_l = voltage ? levels.voltage(own, Choice::L) : levels.current(own, Choice::L);
  const double if_h = voltage ? levels.voltage(own, Choice::H) : levels.current(own, Choice::H);
  const double threshold = std::sqrt(if_l * if_h);
  const bool at_or_above = mean_sq >= threshold;
  const Choice higher = if_h >= if_l ? Choice::H : Choice::L;
  return at_or_above ? higher : other(higher);
}

Choice infer_remote_bit(Choice own, double mean_sq_u, double mean_sq_i, const NoiseLevels& levels,
                        MeasurementChannel channel) {
  switch (channel) {
    case MeasurementChannel::Voltage: return infer_remote_bit(own, mean_sq_u, levels, channel);
    case MeasurementChannel::Current: return infer_remote_bit(own, mean_sq_i, levels, channel);
    case MeasurementChannel::Combined:
      return own == Choice::L ? infer_remote_bit(own, mean_sq_i, levels, MeasurementChannel::Current)
                              : infer_remote_bit(own, mean_sq_u, levels, MeasurementChannel::Voltage);
  }
  return Choice::L;
}

ExchangeClass classify_exchange(Choice alice, Choice bob) {
  return alice == bob ? ExchangeClass::Discard : ExchangeClass::Secure;
}

BepMeasurement run_bep(TransientSolver& solver, const ProtocolConfig& config, std::size_t bit_index,
                       Arrangement arrangement, const BepSeeds& seeds) {
  config.validate();
  const double h = solver.config().internal_step_s;
  const auto decimation = static_cast<std::size_t>(std::llround(config.t_s / h));
  if (decimation == 0 || std::abs(config.t_s / h - static_cast<double>(decimation)) > 1e-6 * decimation)
    throw ConfigError("t_s must be a whole multiple of the solver step");
  const std::size_t n_steps = decimation * static_cast<std::size_t>(config.bep_units);

  const double r_a = config.resistance(arrangement.alice);
  const double r_b = config.resistance(arrangement.bob);
  solver.set_resistance(names::kAliceResistor, r_a);
  solver.set_resistance(names::kBobResistor, r_b);

  NoiseSpec spec;
  spec.bandwidth_hz = config.bandwidth_hz;
  spec.duration_s = static_cast<double>(n_steps) * h;
  spec.sample_interval_s = h;
  spec.rms_volts = rms_for_resistor(r_a, config.t_eff, config.bandwidth_hz);
  spec.seed = seeds.alice;
  const Waveform ua = generate(spec);
  spec.rms_volts = rms_for_resistor(r_b, config.t_eff, config.bandwidth_hz);
  spec.seed = seeds.bob;
  const Waveform ub = generate(spec);

  // The record is one period of the noise, so the value at the end of step j
  // is sample (j + 1) mod n.
  auto end_of_step = [](const Waveform& w) {
    std::vector<double> v(w.samples().begin() + 1, w.samples().end());
    v.push_back(w[0]);
    return v;
  };
  const std::vector<double> sa = end_of_step(ua);
  const std::vector<double> sb = end_of_step(ub);
  const ProbeBlock pb =
      solver.advance({{names::kAliceNoise, sa}, {names::kBobNoise, sb}}, n_steps, decimation, /*discontinuity=*/true);

  BepMeasurement m;
  m.bit_index = bit_index;
  m.arrangement = arrangement;
  m.t_s = config.t_s;
  m.u_cha = pb.at(names::kUcha);
  m.i_cha = pb.at(names::kIcha);
  m.u_chb = pb.at(names::kUchb);
  m.i_chb = pb.at(names::kIchb);
  m.mean_sq_u = stats::mean_square(m.u_cha);
  m.mean_sq_i = stats::mean_square(m.i_cha);
  m.mean_sq_u_bob = stats::mean_square(m.u_chb);
  m.mean_sq_i_bob = stats::mean_square(m.i_chb);
  return m;
}

}  // namespace kljn
