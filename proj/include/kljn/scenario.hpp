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
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include "kljn/attack.hpp"
#include "kljn/cable.hpp"
#include "kljn/privacy.hpp"
#include "kljn/protocol.hpp"
#include "kljn/transient.hpp"

namespace kljn {

enum class CableModel { Distributed, Lumped };

struct DefenseConfig {
  bool capacitor_killer = false;
  TapEnd tap = TapEnd::Alice;
  int xor_rounds = 0;

  bool operator==(const DefenseConfig&) const = default;
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20160101;

/// Full parameterization of one experiment. Defaults are the strongest
/// Attack table cell: R_L = 1 k, R_H = 9 k, B = 250 Hz, t_s = 1 ms, 100 units,
/// 1000 m RG58 ladder, N = 1000.
struct ScenarioConfig {
  std::string name = "scenario";
  ProtocolConfig protocol;
  CableSpec cable = CableSpec::rg58(1000.0);
  CableModel cable_model = CableModel::Distributed;
  SolverConfig solver;
  std::size_t n_bits = 1000;
  DefenseConfig defense;
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::string output_dir;

  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

void to_json(nlohmann::json& j, const ScenarioConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected (ConfigError).
void from_json(const nlohmann::json& j, ScenarioConfig& c);

struct LegitimateErrors {
  double alice = 0.0;  // fraction of secure bits where Alice misread Bob
  double bob = 0.0;
};

struct ScenarioResult {
  ScenarioConfig config;
  SuccessRate attack;
  std::size_t secure_bits = 0;
  std::vector<AmplificationRound> amplification;
  LegitimateErrors legit_errors;
  SolverDiagnostics solver;
  double wall_clock_s = 0.0;

  bool operator==(const ScenarioResult&) const;
};

void to_json(nlohmann::json& j, const ScenarioResult& r);
void from_json(const nlohmann::json& j, ScenarioResult& r);

/// Result plus the raw per-bit records it was computed from.
struct ScenarioRun {
  ScenarioResult result;
  std::vector<BepMeasurement> beps;
  AttackOutcome attack;
};

struct RunOptions {
  Execution execution = Execution::Parallel;
  /// When set: CSV `t,U_cha,I_cha,U_chb,I_chb` over all BEPs at this path.
  /// Multi-scenario runs insert "_<scenario name>" before the extension.
  std::string dump_waveforms;
  /// When set: netlist text as simulated (after any defense transform).
  std::string dump_netlist;
};

/// Netlist the scenario simulates, including the capacitor killer if enabled.
Netlist scenario_netlist(const ScenarioConfig& config);

/// End to end: netlist, warm-up, N BEPs, attack, amplification, legitimate
/// inference; persisted under config.output_dir/config.name when output_dir
/// is non-empty. Deterministic in the config (wall-clock aside).
ScenarioRun run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Writes config.json, summary.json, bits.jsonl, attack.csv and
/// manifest.json into `dir`; `extra_files` are listed in the manifest.
void persist_scenario(const ScenarioRun& run, const std::string& dir,
                      const std::vector<std::string>& extra_files = {});

/// "dir/waves.csv" + "cell" -> "dir/waves_cell.csv"; empty stays empty.
std::string suffixed_path(const std::string& path, const std::string& suffix);

// --- Attack table --------------------------------------------------------

inline constexpr int kTable1Beps[3] = {20, 50, 100};
inline constexpr double kTable1Lengths[2] = {100.0, 1000.0};

struct Table1Cell {
  int bep_units = 0;
  double length_m = 0.0;
  ScenarioRun run;
};

struct Table1 {
  std::vector<Table1Cell> cells;  // row-major: bep_units x length

  const Table1Cell& at(int bep_units, double length_m) const;
  /// Six-cell layout plus a +/- binomial std per cell.
  std::string format() const;
  /// `bep_units,bits_per_second,length_m,p_E,binomial_std,epsilon`
  void write_csv(std::ostream& os) const;
};

/// Config of one attack table cell derived from `base`: bep_units and cable length
/// replaced (one ladder section per 10 m), per-cell seed split off the base
/// master seed, name "table1_bep<u>_<L>m".
ScenarioConfig table1_cell_config(const ScenarioConfig& base, int bep_units, double length_m);

/// Runs the six cells; with Execution::Parallel the cells run concurrently.
Table1 reproduce_table1(const ScenarioConfig& base, const RunOptions& options = {});

struct DefenseReport {
  double baseline_p_e = 0.0;
  double killer_p_e = 0.0;
  double killer_binomial_std = 0.0;
  std::vector<AmplificationRound> xor_rounds;  // rounds 0..2 on the baseline key

  std::string format() const;
};

/// Strongest cell three ways: capacitor killer, one XOR, two XORs. A run of
/// the undefended strongest scenario may be passed in to avoid recomputing it.
DefenseReport reproduce_defenses(const ScenarioConfig& base, const ScenarioRun* baseline = nullptr,
                                 const RunOptions& options = {});

}  // namespace kljn
