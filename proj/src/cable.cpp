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

#include "kljn/cable.hpp"

#include <cmath>
#include <numbers>

#include "kljn/error.hpp"

namespace kljn {

namespace {

void add_parties(Netlist& net, double r_alice, double r_bob) {
  if (!(r_alice > 0.0) || !(r_bob > 0.0)) throw ConfigError("party resistors must be positive");
  net.add_branch({BranchKind::VoltageSource, names::kAliceSource, "a_src", std::string(Netlist::kGround), 0.0,
                  names::kAliceNoise});
  net.add_branch({BranchKind::Resistor, names::kAliceResistor, "a_src", names::kAliceEnd, r_alice});
  net.add_branch({BranchKind::VoltageSource, names::kBobSource, "b_src", std::string(Netlist::kGround), 0.0,
                  names::kBobNoise});
  net.add_branch({BranchKind::Resistor, names::kBobResistor, "b_src", names::kBobEnd, r_bob});
}

// Probe currents are oriented into the cable at both ends.
void add_probes(Netlist& net) {
  net.add_probe({names::kUcha, ProbeKind::NodeVoltage, names::kAliceEnd});
  net.add_probe({names::kIcha, ProbeKind::BranchCurrent, names::kAliceResistor});
  net.add_probe({names::kUchb, ProbeKind::NodeVoltage, names::kBobEnd});
  net.add_probe({names::kIchb, ProbeKind::BranchCurrent, names::kBobResistor});
}

void ground_shield(Netlist& net) {
  net.add_branch({BranchKind::VoltageSource, names::kShieldDriver, names::kShield, std::string(Netlist::kGround), 0.0});
}

// Series R then L from `from` to `to`; zero-valued elements are elided and a
// fully ideal span becomes a 0 V wire.
void add_series(Netlist& net, const std::string& from, const std::string& to, double r, double l,
                const std::string& tag, bool inductor_first = false) {
  const std::string mid = "m" + tag;
  if (r > 0.0 && l > 0.0) {
    if (inductor_first) {
      net.add_branch({BranchKind::Inductor, "l" + tag, from, mid, l});
      net.add_branch({BranchKind::Resistor, "r" + tag, mid, to, r});
    } else {
      net.add_branch({BranchKind::Resistor, "r" + tag, from, mid, r});
      net.add_branch({BranchKind::Inductor, "l" + tag, mid, to, l});
    }
  } else if (r > 0.0) {
    net.add_branch({BranchKind::Resistor, "r" + tag, from, to, r});
  } else if (l > 0.0) {
    net.add_branch({BranchKind::Inductor, "l" + tag, from, to, l});
  } else {
    net.add_branch({BranchKind::VoltageSource, "w" + tag, from, to, 0.0});
  }
}

}  // namespace

CableSpec CableSpec::rg58(double length_m) {
  CableSpec c;
  c.length_m = length_m;
  c.n_segments = std::max(1, static_cast<int>(std::lround(length_m / 10.0)));
  return c;
}

void CableSpec::validate() const {
  if (r_per_m < 0.0 || l_per_m < 0.0 || c_per_m < 0.0) throw ConfigError("cable per-meter values must be >= 0");
  if (!(length_m > 0.0)) throw ConfigError("cable length must be positive");
  if (n_segments < 1) throw ConfigError("cable needs at least one segment");
  if (l_per_m > 0.0 && c_per_m > 0.0) {
    if (!(velocity_m_s > 0.0)) throw ConfigError("cable velocity must be positive");
    const double implied = 1.0 / std::sqrt(l_per_m * c_per_m);
    if (std::abs(velocity_m_s - implied) > 0.01 * implied)
      throw ConfigError("cable velocity inconsistent with 1/sqrt(LC)");
  }
}

double characteristic_impedance(const CableSpec& cable) {
  if (!(cable.c_per_m > 0.0)) throw DomainError("characteristic impedance undefined for zero capacitance");
  return std::sqrt(cable.l_per_m / cable.c_per_m);
}

Netlist build_lumped(double r_alice, double r_bob, const CableSpec& cable) {
  cable.validate();
  Netlist net;
  add_parties(net, r_alice, r_bob);
  const double rs = 0.5 * cable.total_resistance();
  const double ls = 0.5 * cable.total_inductance();
  add_series(net, names::kAliceEnd, "mid", rs, ls, "s1");
  add_series(net, "mid", names::kBobEnd, rs, ls, "s2", /*inductor_first=*/true);
  ground_shield(net);
  if (cable.c_per_m > 0.0) net.add_branch({BranchKind::Capacitor, "cp", "mid", names::kShield, cable.total_capacitance()});
  add_probes(net);
  return net;
}

Netlist build_distributed(double r_alice, double r_bob, const CableSpec& cable) {
  cable.validate();
  Netlist net;
  add_parties(net, r_alice, r_bob);
  const int n = cable.n_segments;
  const double dx = cable.length_m / n;
  auto node = [&](int k) -> std::string {
    if (k == 0) return names::kAliceEnd;
    if (k == n) return names::kBobEnd;
    return "n" + std::to_string(k);
  };
  for (int k = 1; k <= n; ++k) add_series(net, node(k - 1), node(k), cable.r_per_m * dx, cable.l_per_m * dx, std::to_string(k));
  ground_shield(net);
  if (cable.c_per_m > 0.0) {
    const double c_seg = cable.c_per_m * dx;
    for (int k = 0; k <= n; ++k) {
      const double c = (k == 0 || k == n) ? 0.5 * c_seg : c_seg;
      net.add_branch({BranchKind::Capacitor, "c" + std::to_string(k), node(k), names::kShield, c});
    }
  }
  add_probes(net);
  return net;
}

double wavelength_ratio(const CableSpec& cable, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("wavelength_ratio: bandwidth must be positive");
  if (!(cable.length_m > 0.0)) throw DomainError("wavelength_ratio: cable length must be positive");
  return (cable.velocity_m_s / bandwidth_hz) / cable.length_m;
}

double cutoff_frequency(double r_low, double r_high, double total_capacitance) {
  if (!(r_low > 0.0) || !(r_high > 0.0)) throw DomainError("cutoff_frequency: resistances must be positive");
  if (!(total_capacitance > 0.0)) throw DomainError("cutoff_frequency: capacitance must be positive");
  const double r_par = r_low * r_high / (r_low + r_high);
  return 1.0 / (2.0 * std::numbers::pi * r_par * total_capacitance);
}

const char* tap_node(TapEnd end) { return end == TapEnd::Alice ? names::kAliceEnd : names::kBobEnd; }

Netlist apply_capacitor_killer(const Netlist& netlist, const std::string& tap_node_name, std::string* warning) {
  bool has_shield_cap = false;
  for (const auto& b : netlist.branches())
    if (b.kind == BranchKind::Capacitor && (b.node_a == names::kShield || b.node_b == names::kShield)) has_shield_cap = true;
  const Branch* driver = netlist.find_branch(names::kShieldDriver);
  if (!has_shield_cap || !driver) {
    if (warning) *warning = "capacitor killer: netlist has no shield capacitors; left unchanged";
    return netlist;
  }
  if (!netlist.has_node(tap_node_name)) throw ConfigError("capacitor killer: unknown tap node " + tap_node_name);
  Netlist out = netlist;
  Branch follower;
  follower.kind = BranchKind::Vcvs;
  follower.name = names::kShieldDriver;
  follower.node_a = names::kShield;
  follower.node_b = std::string(Netlist::kGround);
  follower.value = 1.0;
  follower.ctrl_a = tap_node_name;
  follower.ctrl_b = std::string(Netlist::kGround);
  out.replace_branch(follower);
  return out;
}

Netlist apply_capacitor_killer(const Netlist& netlist, TapEnd tap, std::string* warning) {
  return apply_capacitor_killer(netlist, tap_node(tap), warning);
}

}  // namespace kljn
