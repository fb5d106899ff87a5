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

#include <string>

#include "kljn/netlist.hpp"

namespace kljn {

/// Element and node names shared by every KLJN netlist built here.
namespace names {
inline constexpr const char* kAliceSource = "ua";
inline constexpr const char* kBobSource = "ub";
inline constexpr const char* kAliceResistor = "ra";
inline constexpr const char* kBobResistor = "rb";
inline constexpr const char* kShieldDriver = "vshield";
inline constexpr const char* kAliceNoise = "alice";  // waveform names
inline constexpr const char* kBobNoise = "bob";
inline constexpr const char* kAliceEnd = "cha";
inline constexpr const char* kBobEnd = "chb";
inline constexpr const char* kShield = "shield";
inline constexpr const char* kUcha = "U_cha";
inline constexpr const char* kIcha = "I_cha";
inline constexpr const char* kUchb = "U_chb";
inline constexpr const char* kIchb = "I_chb";
}  // namespace names

/// Coaxial cable per-unit-length parameters plus ladder discretization.
struct CableSpec {
  double r_per_m = 0.021;
  double l_per_m = 250e-9;
  double c_per_m = 100e-12;
  double length_m = 1000.0;
  double velocity_m_s = 2e8;
  int n_segments = 100;

  /// RG58 at `length_m`, one ladder section per 10 m.
  static CableSpec rg58(double length_m);

  double total_resistance() const { return r_per_m * length_m; }
  double total_inductance() const { return l_per_m * length_m; }
  double total_capacitance() const { return c_per_m * length_m; }

  /// Throws ConfigError on negative per-meter values, non-positive length or
  /// segment count, or a velocity inconsistent with 1/sqrt(LC) by more than 1%.
  void validate() const;

  bool operator==(const CableSpec&) const = default;
};

/// sqrt(L/C) per unit length; throws DomainError when C is zero.
double characteristic_impedance(const CableSpec& cable);

/// Single symmetric T section: (R_s, L_s) on each side of a mid node that
/// carries the whole shunt capacitance. R_s and L_s are half the cable totals.
Netlist build_lumped(double r_alice, double r_bob, const CableSpec& cable);

/// n_segments cascaded pi sections: each section contributes series R and L
/// of one segment and splits its shunt C between its two end nodes, so the
/// ladder has C/2 at each cable end and a full segment C at interior nodes.
/// Shunt capacitors return to the shield rail, which is grounded by a 0 V
/// source named `vshield`.
Netlist build_distributed(double r_alice, double r_bob, const CableSpec& cable);

/// gamma = lambda / L_ch with lambda = velocity / bandwidth.
double wavelength_ratio(const CableSpec& cable, double bandwidth_hz);

/// 1 / (2 pi R_par C) with R_par = r_low || r_high.
double cutoff_frequency(double r_low, double r_high, double total_capacitance);

enum class TapEnd { Alice, Bob };

const char* tap_node(TapEnd end);

/// Capacitor killer: unground the shield and drive it with a unity-gain
/// follower of the inner-wire voltage at `tap_node_name`. A netlist without
/// shield capacitors is returned unchanged and `warning` (if given) is set.
Netlist apply_capacitor_killer(const Netlist& netlist, const std::string& tap_node_name,
                               std::string* warning = nullptr);
Netlist apply_capacitor_killer(const Netlist& netlist, TapEnd tap, std::string* warning = nullptr);

}  // namespace kljn
