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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kljn/cable.hpp"
#include "kljn/error.hpp"
#include "kljn/netlist.hpp"

using namespace kljn;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double sum_values(const Netlist& n, BranchKind kind, bool shield_only = false) {
  double s = 0.0;
  for (const auto& b : n.branches())
    if (b.kind == kind && (!shield_only || b.node_b == names::kShield)) s += b.value;
  return s;
}

int count_kind(const Netlist& n, BranchKind kind) {
  int c = 0;
  for (const auto& b : n.branches()) c += b.kind == kind;
  return c;
}

}  // namespace

TEST(Netlist, GroundAlwaysPresent) {
  Netlist n;
  EXPECT_TRUE(n.has_node("0"));
  EXPECT_EQ(n.node_index("0"), 0u);
}

TEST(Netlist, DuplicateBranchRejected) {
  Netlist n;
  n.add_branch({BranchKind::Resistor, "r1", "a", "0", 1.0});
  EXPECT_THROW(n.add_branch({BranchKind::Resistor, "r1", "b", "0", 1.0}), ConfigError);
}

TEST(Netlist, ValidateRejectsBadValues) {
  Netlist n;
  n.add_branch({BranchKind::Resistor, "r1", "a", "0", -1.0});
  EXPECT_THROW(n.validate(), ConfigError);
  Netlist m;
  m.add_branch({BranchKind::Capacitor, "c1", "a", "a", 1e-9});
  EXPECT_THROW(m.validate(), ConfigError);
  Netlist p;
  p.add_branch({BranchKind::Resistor, "r1", "a", "0", 1.0});
  p.add_probe({"U_x", ProbeKind::NodeVoltage, "nowhere"});
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Netlist, LumpedGoldenText) {
  const auto text = build_lumped(1e3, 9e3, CableSpec::rg58(1000.0)).to_text();
  EXPECT_EQ(text, read_file(std::string(KLJN_TEST_DATA) + "/lumped_rg58_1000m.cir"));
}

TEST(Netlist, TextRoundTrip) {
  for (const auto& n : {build_lumped(1e3, 9e3, CableSpec::rg58(1000.0)),
                        apply_capacitor_killer(build_distributed(1e3, 9e3, CableSpec::rg58(100.0)), TapEnd::Bob)}) {
    EXPECT_EQ(Netlist::from_text(n.to_text()), n);
  }
}

TEST(Netlist, FromTextSkipsCommentsAndRejectsGarbage) {
  const auto n = Netlist::from_text("* title\n# note\nR r1 a 0 100\nPROBE U_a V a\n");
  ASSERT_NE(n.find_branch("r1"), nullptr);
  EXPECT_EQ(n.find_branch("r1")->value, 100.0);
  EXPECT_THROW(Netlist::from_text("Q q1 a 0 1\n"), ConfigError);
  EXPECT_THROW(Netlist::from_text("R r1 a\n"), ConfigError);
}

TEST(Cable, CharacteristicImpedanceFiftyOhm) {
  EXPECT_NEAR(characteristic_impedance(CableSpec::rg58(1000.0)), 50.0, 1e-9);
}

TEST(Cable, ValidateVelocityConsistency) {
  auto c = CableSpec::rg58(1000.0);
  c.velocity_m_s = 1e8;
  EXPECT_THROW(c.validate(), ConfigError);
  c = CableSpec::rg58(1000.0);
  c.n_segments = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Cable, LumpedValues1000m) {
  const auto n = build_lumped(1e3, 9e3, CableSpec::rg58(1000.0));
  EXPECT_NEAR(n.find_branch("rs1")->value, 10.5, 1e-12);
  EXPECT_NEAR(n.find_branch("ls1")->value, 125e-6, 1e-18);
  EXPECT_NEAR(n.find_branch("cp")->value, 100e-9, 1e-21);
  EXPECT_EQ(n.find_branch("cp")->node_a, "mid");
}

TEST(Cable, Lumped100mCapacitance) {
  EXPECT_NEAR(build_lumped(1e3, 9e3, CableSpec::rg58(100.0)).find_branch("cp")->value, 10e-9, 1e-22);
}

TEST(Cable, ZeroCapacitanceHasNoCapacitor) {
  auto c = CableSpec::rg58(1000.0);
  c.c_per_m = 0.0;
  EXPECT_EQ(count_kind(build_lumped(1e3, 9e3, c), BranchKind::Capacitor), 0);
  EXPECT_EQ(count_kind(build_distributed(1e3, 9e3, c), BranchKind::Capacitor), 0);
}

TEST(Cable, NonPositiveResistanceRejected) {
  EXPECT_THROW(build_lumped(0.0, 9e3, CableSpec::rg58(100.0)), ConfigError);
  EXPECT_THROW(build_distributed(1e3, -9e3, CableSpec::rg58(100.0)), ConfigError);
}

TEST(Cable, DistributedSumRule) {
  for (double len : {100.0, 1000.0, 333.0}) {
    auto c = CableSpec::rg58(len);
    const auto n = build_distributed(1e3, 9e3, c);
    const double r_parties = 1e3 + 9e3;
    EXPECT_NEAR(sum_values(n, BranchKind::Resistor) - r_parties, 0.021 * len, 1e-12 * len);
    EXPECT_NEAR(sum_values(n, BranchKind::Inductor), 250e-9 * len, 1e-20 * len);
    EXPECT_NEAR(sum_values(n, BranchKind::Capacitor, true), 100e-12 * len, 1e-22 * len);
  }
  const auto n = build_distributed(1e3, 9e3, CableSpec::rg58(1000.0));
  EXPECT_EQ(count_kind(n, BranchKind::Capacitor), 101);
}

TEST(Cable, SingleSegmentIsOnePi) {
  auto c = CableSpec::rg58(1000.0);
  c.n_segments = 1;
  const auto n = build_distributed(1e3, 9e3, c);
  EXPECT_EQ(count_kind(n, BranchKind::Capacitor), 2);
  EXPECT_NEAR(n.find_branch("c0")->value, 50e-9, 1e-21);
  EXPECT_NEAR(n.find_branch("c1")->value, 50e-9, 1e-21);
  EXPECT_EQ(n.find_branch("c0")->node_a, "cha");
  EXPECT_EQ(n.find_branch("c1")->node_a, "chb");
}

TEST(Cable, WavelengthRatio) {
  const auto c = CableSpec::rg58(1000.0);
  EXPECT_NEAR(wavelength_ratio(c, 250e3), 0.8, 1e-12);
  EXPECT_NEAR(wavelength_ratio(c, 250.0), 800.0, 1e-9);
  EXPECT_NEAR(wavelength_ratio(c, 2e5), 1.0, 1e-12);
  EXPECT_THROW(wavelength_ratio(c, 0.0), DomainError);
}

TEST(Cable, CutoffFrequency) {
  EXPECT_NEAR(cutoff_frequency(1e3, 9e3, 100e-9), 1768.4, 0.1);
  EXPECT_NEAR(cutoff_frequency(1e3, 9e3, 10e-9), 17684.0, 1.0);
  EXPECT_NEAR(cutoff_frequency(500.0, 500.0, 1e-6), 1.0 / (std::numbers::pi * 500.0 * 1e-6), 1e-9);
  EXPECT_THROW(cutoff_frequency(1e3, 9e3, 0.0), DomainError);
}

TEST(CapacitorKiller, ReplacesShieldGround) {
  const auto n = apply_capacitor_killer(build_distributed(1e3, 9e3, CableSpec::rg58(100.0)), TapEnd::Bob);
  const auto* v = n.find_branch(names::kShieldDriver);
  ASSERT_NE(v, nullptr);
  EXPECT_EQ(v->kind, BranchKind::Vcvs);
  EXPECT_EQ(v->ctrl_a, "chb");
  EXPECT_EQ(v->value, 1.0);
}

TEST(CapacitorKiller, NoShieldCapacitorIsNoOp) {
  auto c = CableSpec::rg58(1000.0);
  c.c_per_m = 0.0;
  const auto n = build_distributed(1e3, 9e3, c);
  std::string warning;
  EXPECT_EQ(apply_capacitor_killer(n, TapEnd::Alice, &warning), n);
  EXPECT_FALSE(warning.empty());
}

TEST(CapacitorKiller, UnknownTapRejected) {
  EXPECT_THROW(apply_capacitor_killer(build_lumped(1e3, 9e3, CableSpec::rg58(100.0)), "nope"), ConfigError);
}
