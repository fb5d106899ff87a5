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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kljn/error.hpp"
#include "kljn/model_compare.hpp"
#include "kljn/scenario.hpp"

using namespace kljn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig c;
  c.name = "small";
  c.n_bits = 16;
  c.protocol.bep_units = 20;
  c.cable = CableSpec::rg58(100.0);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("kljn_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(ScenarioConfig, JsonRoundTrip) {
  ScenarioConfig c;
  EXPECT_EQ(json(c).get<ScenarioConfig>(), c);
  c.name = "other";
  c.protocol.channel = MeasurementChannel::Combined;
  c.protocol.arrangement = ArrangementMode::Random;
  c.protocol.t_eff = 1.234567890123e16;
  c.cable = CableSpec::rg58(100.0);
  c.cable.c_per_m = 0.0;
  c.cable_model = CableModel::Lumped;
  c.defense = {true, TapEnd::Bob, 2};
  c.master_seed = 0xfedcba9876543210ULL;
  c.solver.internal_step_s = 1e-3 / 64;
  EXPECT_EQ(json::parse(json(c).dump()).get<ScenarioConfig>(), c);
}

TEST(ScenarioConfig, MissingKeysKeepDefaults) {
  const auto c = json::parse(R"({"n_bits": 12, "protocol": {"bep_units": 50}})").get<ScenarioConfig>();
  EXPECT_EQ(c.n_bits, 12u);
  EXPECT_EQ(c.protocol.bep_units, 50);
  EXPECT_EQ(c.protocol.r_high, 9e3);
  EXPECT_EQ(c.cable, CableSpec::rg58(1000.0));
}

TEST(ScenarioConfig, RejectsUnknownKeysAndValues) {
  EXPECT_THROW(json::parse(R"({"bits": 1})").get<ScenarioConfig>(), ConfigError);
  EXPECT_THROW(json::parse(R"({"cable": {"model": "coax"}})").get<ScenarioConfig>(), ConfigError);
  EXPECT_THROW(json::parse(R"({"n_bits": "many"})").get<ScenarioConfig>(), ConfigError);
}

TEST(ScenarioConfig, Validation) {
  auto c = small_config();
  c.n_bits = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.name = "../escape";
  EXPECT_THROW(c.validate(), ConfigError);
  c = small_config();
  c.solver.internal_step_s = 0.3e-3;  // not a divisor of t_s
  EXPECT_THROW(run_scenario(c), ConfigError);
}

TEST(Scenario, DeterministicAndRoundTrips) {
  const auto a = run_scenario(small_config(), {Execution::Serial});
  auto b = run_scenario(small_config(), {Execution::Parallel});
  b.result.wall_clock_s = a.result.wall_clock_s;
  EXPECT_EQ(a.result, b.result);
  EXPECT_EQ(json::parse(json(a.result).dump()).get<ScenarioResult>(), a.result);
  EXPECT_EQ(a.result.attack.n_bits, 16u);
  EXPECT_EQ(a.result.amplification.size(), 1u);
}

TEST(Scenario, SeedChangesOutcome) {
  auto c = small_config();
  const auto a = run_scenario(c);
  c.master_seed += 1;
  const auto b = run_scenario(c);
  EXPECT_NE(a.beps[0].u_cha, b.beps[0].u_cha);
}

TEST(Scenario, RandomArrangementDiscards) {
  auto c = small_config();
  c.n_bits = 40;
  c.protocol.arrangement = ArrangementMode::Random;
  const auto r = run_scenario(c);
  EXPECT_LT(r.result.secure_bits, 40u);
  EXPECT_GT(r.result.secure_bits, 5u);
}

TEST(Scenario, PersistsFiles) {
  const auto dir = scratch("persist");
  auto c = small_config();
  c.output_dir = dir.string();
  RunOptions o;
  o.dump_waveforms = (dir / "w.csv").string();
  o.dump_netlist = (dir / "n.cir").string();
  const auto r = run_scenario(c, o);
  for (const char* f : {"config.json", "summary.json", "bits.jsonl", "attack.csv", "manifest.json"})
    EXPECT_TRUE(fs::exists(dir / "small" / f)) << f;
  const auto waves = slurp(dir / "w.csv");
  EXPECT_EQ(waves.substr(0, waves.find('\n')), "t,U_cha,I_cha,U_chb,I_chb");
  EXPECT_EQ(std::count(waves.begin(), waves.end(), '\n'), 1 + 16 * 20);
  EXPECT_EQ(Netlist::from_text(slurp(dir / "n.cir")), scenario_netlist(c));
  const auto summary = json::parse(slurp(dir / "small" / "summary.json")).get<ScenarioResult>();
  EXPECT_EQ(summary, r.result);
  const auto bits = slurp(dir / "small" / "bits.jsonl");
  EXPECT_EQ(std::count(bits.begin(), bits.end(), '\n'), 16);

  // Byte-identical detail files on a rerun.
  const auto first = slurp(dir / "small" / "bits.jsonl");
  run_scenario(c);
  EXPECT_EQ(slurp(dir / "small" / "bits.jsonl"), first);
  fs::remove_all(dir);
}

TEST(Scenario, KillerNetlist) {
  auto c = small_config();
  c.defense.capacitor_killer = true;
  EXPECT_EQ(scenario_netlist(c).find_branch(names::kShieldDriver)->kind, BranchKind::Vcvs);
}

TEST(Table1, CellConfigs) {
  ScenarioConfig base;
  const auto a = table1_cell_config(base, 20, 100.0);
  const auto b = table1_cell_config(base, 20, 1000.0);
  EXPECT_EQ(a.name, "table1_bep20_100m");
  EXPECT_EQ(a.cable.n_segments, 10);
  EXPECT_EQ(b.cable.n_segments, 100);
  EXPECT_NE(a.master_seed, b.master_seed);
  EXPECT_EQ(a.protocol.bep_units, 20);
}

TEST(Table1, ParallelMatchesSerialAndFormats) {
  ScenarioConfig base;
  base.n_bits = 6;
  const auto s = reproduce_table1(base, {Execution::Serial});
  const auto p = reproduce_table1(base, {Execution::Parallel});
  ASSERT_EQ(s.cells.size(), 6u);
  for (std::size_t k = 0; k < 6; ++k) {
    auto rp = p.cells[k].run.result;
    rp.wall_clock_s = s.cells[k].run.result.wall_clock_s;
    EXPECT_EQ(rp, s.cells[k].run.result);
  }
  const auto text = s.format();
  EXPECT_NE(text.find("20 t_s"), std::string::npos);
  EXPECT_NE(text.find("| 50 "), std::string::npos);
  EXPECT_NE(text.find("| 10 "), std::string::npos);
  std::ostringstream csv;
  s.write_csv(csv);
  const std::string rows = csv.str();
  EXPECT_EQ(std::count(rows.begin(), rows.end(), '\n'), 7);
  EXPECT_THROW(s.at(30, 100.0), ArgumentError);
}

TEST(ModelCompare, Verdicts) {
  EXPECT_EQ(verdict_for(0.005), Verdict::Indistinguishable);
  EXPECT_EQ(verdict_for(0.01), Verdict::Similar);
  EXPECT_EQ(verdict_for(0.099), Verdict::Similar);
  EXPECT_EQ(verdict_for(0.1), Verdict::Waves);
}

TEST(ModelCompare, IdenticalModelsAgreeExactly) {
  const auto cable = CableSpec::rg58(1000.0);
  const auto n = build_distributed(1e3, 9e3, cable);
  const auto rep = compare_netlists(n, n, cable, 1e3, 9e3, 250.0, 0.2, 1);
  EXPECT_EQ(rep.nrmsd, 0.0);
  EXPECT_EQ(rep.verdict, Verdict::Indistinguishable);
  EXPECT_NEAR(rep.gamma, 800.0, 1e-9);
}
