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

#include "kljn/scenario.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include "kljn/error.hpp"
#include "kljn/seed.hpp"

namespace kljn {

using nlohmann::json;

namespace {

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<ArrangementMode> kArrangementNames[] = {{ArrangementMode::FixedLH, "fixed_lh"},
                                                           {ArrangementMode::Random, "random"}};
constexpr EnumName<MeasurementChannel> kChannelNames[] = {{MeasurementChannel::Voltage, "voltage"},
                                                          {MeasurementChannel::Current, "current"},
                                                          {MeasurementChannel::Combined, "combined"}};
constexpr EnumName<CableModel> kModelNames[] = {{CableModel::Distributed, "distributed"},
                                                {CableModel::Lumped, "lumped"}};
constexpr EnumName<TapEnd> kTapNames[] = {{TapEnd::Alice, "alice"}, {TapEnd::Bob, "bob"}};

template <class E, std::size_t N>
const char* enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table)
    if (e.value == v) return e.name;
  return "?";
}

template <class E, std::size_t N>
E enum_parse(const EnumName<E> (&table)[N], const json& j, const char* what) {
  if (!j.is_string()) throw ConfigError(std::string(what) + ": expected a string");
  const auto s = j.get<std::string>();
  for (const auto& e : table)
    if (s == e.name) return e.value;
  throw ConfigError(std::string(what) + ": unknown value '" + s + "'");
}

void check_keys(const json& j, const char* what, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.contains(k)) throw ConfigError(std::string(what) + ": unknown key '" + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

Arrangement coin_arrangement(std::uint64_t master, std::size_t bit) {
  const std::uint64_t s = derive_seed(master, {stream::kArrangement, bit});
  return {(s >> 63) ? Choice::H : Choice::L, ((s >> 62) & 1U) ? Choice::H : Choice::L};
}

BepSeeds bit_seeds(std::uint64_t master, std::size_t bit) {
  return {derive_seed(master, {stream::kAliceNoise, bit}), derive_seed(master, {stream::kBobNoise, bit})};
}

std::filesystem::path scenario_dir(const ScenarioConfig& c) {
  return std::filesystem::path(c.output_dir) / c.name;
}

std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << std::setprecision(12);
  return os;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (name.empty() || name.find_first_of("/\\") != std::string::npos || name == "." || name == "..")
    throw ConfigError("scenario name must be a plain file name");
  protocol.validate();
  cable.validate();
  solver.validate(protocol.t_s);
  if (n_bits == 0) throw ConfigError("n_bits must be positive");
  if (defense.xor_rounds < 0) throw ConfigError("xor_rounds must be non-negative");
}

void to_json(json& j, const ScenarioConfig& c) {
  const auto& p = c.protocol;
  j = json{
      {"name", c.name},
      {"protocol",
       {{"r_low", p.r_low},
        {"r_high", p.r_high},
        {"t_eff", p.t_eff},
        {"bandwidth_hz", p.bandwidth_hz},
        {"t_s", p.t_s},
        {"bep_units", p.bep_units},
        {"arrangement", enum_name(kArrangementNames, p.arrangement)},
        {"channel", enum_name(kChannelNames, p.channel)}}},
      {"cable",
       {{"model", enum_name(kModelNames, c.cable_model)},
        {"r_per_m", c.cable.r_per_m},
        {"l_per_m", c.cable.l_per_m},
        {"c_per_m", c.cable.c_per_m},
        {"length_m", c.cable.length_m},
        {"velocity_m_s", c.cable.velocity_m_s},
        {"n_segments", c.cable.n_segments}}},
      {"solver",
       {{"internal_step_s", c.solver.internal_step_s},
        {"tolerance", c.solver.tolerance},
        {"backward_euler_restart", c.solver.backward_euler_restart},
        {"residual_check_interval", c.solver.residual_check_interval}}},
      {"n_bits", c.n_bits},
      {"defense",
       {{"capacitor_killer", c.defense.capacitor_killer},
        {"tap", enum_name(kTapNames, c.defense.tap)},
        {"xor_rounds", c.defense.xor_rounds}}},
      {"master_seed", c.master_seed},
      {"output_dir", c.output_dir},
  };
}

void from_json(const json& j, ScenarioConfig& c) {
  check_keys(j, "config", {"name", "protocol", "cable", "solver", "n_bits", "defense", "master_seed", "output_dir"});
  read(j, "name", c.name);
  read(j, "n_bits", c.n_bits);
  read(j, "master_seed", c.master_seed);
  read(j, "output_dir", c.output_dir);
  if (j.contains("protocol")) {
    const auto& p = j["protocol"];
    check_keys(p, "protocol",
               {"r_low", "r_high", "t_eff", "bandwidth_hz", "t_s", "bep_units", "arrangement", "channel"});
    read(p, "r_low", c.protocol.r_low);
    read(p, "r_high", c.protocol.r_high);
    read(p, "t_eff", c.protocol.t_eff);
    read(p, "bandwidth_hz", c.protocol.bandwidth_hz);
    read(p, "t_s", c.protocol.t_s);
    read(p, "bep_units", c.protocol.bep_units);
    if (p.contains("arrangement"))
      c.protocol.arrangement = enum_parse(kArrangementNames, p["arrangement"], "protocol.arrangement");
    if (p.contains("channel")) c.protocol.channel = enum_parse(kChannelNames, p["channel"], "protocol.channel");
  }
  if (j.contains("cable")) {
    const auto& k = j["cable"];
    check_keys(k, "cable", {"model", "r_per_m", "l_per_m", "c_per_m", "length_m", "velocity_m_s", "n_segments"});
    if (k.contains("model")) c.cable_model = enum_parse(kModelNames, k["model"], "cable.model");
    read(k, "r_per_m", c.cable.r_per_m);
    read(k, "l_per_m", c.cable.l_per_m);
    read(k, "c_per_m", c.cable.c_per_m);
    read(k, "length_m", c.cable.length_m);
    read(k, "velocity_m_s", c.cable.velocity_m_s);
    read(k, "n_segments", c.cable.n_segments);
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    check_keys(s, "solver", {"internal_step_s", "tolerance", "backward_euler_restart", "residual_check_interval"});
    read(s, "internal_step_s", c.solver.internal_step_s);
    read(s, "tolerance", c.solver.tolerance);
    read(s, "backward_euler_restart", c.solver.backward_euler_restart);
    read(s, "residual_check_interval", c.solver.residual_check_interval);
  }
  if (j.contains("defense")) {
    const auto& d = j["defense"];
    check_keys(d, "defense", {"capacitor_killer", "tap", "xor_rounds"});
    read(d, "capacitor_killer", c.defense.capacitor_killer);
    if (d.contains("tap")) c.defense.tap = enum_parse(kTapNames, d["tap"], "defense.tap");
    read(d, "xor_rounds", c.defense.xor_rounds);
  }
}

bool ScenarioResult::operator==(const ScenarioResult& o) const {
  auto rate_eq = [](const SuccessRate& a, const SuccessRate& b) {
    return a.p_e == b.p_e && a.epsilon == b.epsilon && a.binomial_std == b.binomial_std && a.n_bits == b.n_bits;
  };
  if (!(config == o.config) || !rate_eq(attack, o.attack) || secure_bits != o.secure_bits) return false;
  if (amplification.size() != o.amplification.size()) return false;
  for (std::size_t k = 0; k < amplification.size(); ++k) {
    const auto& a = amplification[k];
    const auto& b = o.amplification[k];
    if (a.round != b.round || a.n_bits != b.n_bits || a.p_e != b.p_e || a.binomial_std != b.binomial_std ||
        a.predicted != b.predicted)
      return false;
  }
  return legit_errors.alice == o.legit_errors.alice && legit_errors.bob == o.legit_errors.bob &&
         solver.max_residual == o.solver.max_residual && solver.step_count == o.solver.step_count &&
         solver.factorizations == o.solver.factorizations && wall_clock_s == o.wall_clock_s;
}

void to_json(json& j, const ScenarioResult& r) {
  json rounds = json::array();
  for (const auto& a : r.amplification)
    rounds.push_back({{"round", a.round},
                      {"n_bits", a.n_bits},
                      {"p_E", a.p_e},
                      {"binomial_std", a.binomial_std},
                      {"predicted", a.predicted}});
  j = json{
      {"config", r.config},
      {"p_E", r.attack.p_e},
      {"epsilon", r.attack.epsilon},
      {"binomial_std", r.attack.binomial_std},
      {"attacked_bits", r.attack.n_bits},
      {"secure_bits", r.secure_bits},
      {"amplification", rounds},
      {"legit_error", {{"alice", r.legit_errors.alice}, {"bob", r.legit_errors.bob}}},
      {"solver",
       {{"max_residual", r.solver.max_residual},
        {"step_count", r.solver.step_count},
        {"factorizations", r.solver.factorizations}}},
      {"wall_clock_s", r.wall_clock_s},
  };
}

void from_json(const json& j, ScenarioResult& r) {
  try {
    r.config = j.at("config").get<ScenarioConfig>();
    r.attack.p_e = j.at("p_E").get<double>();
    r.attack.epsilon = j.at("epsilon").get<double>();
    r.attack.binomial_std = j.at("binomial_std").get<double>();
    r.attack.n_bits = j.at("attacked_bits").get<std::size_t>();
    r.secure_bits = j.at("secure_bits").get<std::size_t>();
    r.amplification.clear();
    for (const auto& a : j.at("amplification"))
      r.amplification.push_back({a.at("round").get<int>(), a.at("n_bits").get<std::size_t>(),
                                 a.at("p_E").get<double>(), a.at("binomial_std").get<double>(),
                                 a.at("predicted").get<double>()});
    r.legit_errors.alice = j.at("legit_error").at("alice").get<double>();
    r.legit_errors.bob = j.at("legit_error").at("bob").get<double>();
    r.solver.max_residual = j.at("solver").at("max_residual").get<double>();
    r.solver.step_count = j.at("solver").at("step_count").get<std::size_t>();
    r.solver.factorizations = j.at("solver").at("factorizations").get<std::size_t>();
    r.wall_clock_s = j.at("wall_clock_s").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario result: ") + e.what());
  }
}

Netlist scenario_netlist(const ScenarioConfig& config) {
  const auto& p = config.protocol;
  Netlist n = config.cable_model == CableModel::Lumped ? build_lumped(p.r_low, p.r_high, config.cable)
                                                       : build_distributed(p.r_low, p.r_high, config.cable);
  if (config.defense.capacitor_killer) n = apply_capacitor_killer(n, config.defense.tap);
  return n;
}

ScenarioRun run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const auto& p = config.protocol;

  const Netlist netlist = scenario_netlist(config);
  TransientSolver solver(netlist, config.solver);

  std::vector<std::string> extra;
  if (!options.dump_netlist.empty()) {
    open_out(options.dump_netlist) << netlist.to_text();
    extra.push_back(options.dump_netlist);
  }
  std::ofstream waves;
  if (!options.dump_waveforms.empty()) {
    waves = open_out(options.dump_waveforms);
    waves << "t,U_cha,I_cha,U_chb,I_chb\n";
    extra.push_back(options.dump_waveforms);
  }

  auto arrangement_of = [&](std::size_t bit) {
    return p.arrangement == ArrangementMode::FixedLH ? kLH : coin_arrangement(config.master_seed, bit);
  };

  // Let the cable charge up before the first recorded bit.
  {
    const double c_total = config.cable.total_capacitance();
    // At least one period of the band edge so the noise block has a bin.
    int units = std::max(3, static_cast<int>(std::ceil(1.0 / (p.bandwidth_hz * p.t_s) - 1e-9)));
    if (c_total > 0.0) {
      const double settle = 5.0 / (2.0 * std::numbers::pi * cutoff_frequency(p.r_low, p.r_high, c_total));
      units = std::max(units, static_cast<int>(std::ceil(settle / p.t_s)));
    }
    ProtocolConfig warm = p;
    warm.bep_units = units;
    run_bep(solver, warm, 0, arrangement_of(0),
            {derive_seed(config.master_seed, {stream::kWarmup, 1}), derive_seed(config.master_seed, {stream::kWarmup, 2})});
  }

  ScenarioRun run;
  run.beps.reserve(config.n_bits);
  for (std::size_t bit = 0; bit < config.n_bits; ++bit) {
    const double t0 = solver.time();
    run.beps.push_back(run_bep(solver, p, bit, arrangement_of(bit), bit_seeds(config.master_seed, bit)));
    if (waves) {
      const auto& m = run.beps.back();
      for (std::size_t k = 0; k < m.u_cha.size(); ++k)
        waves << t0 + static_cast<double>(k + 1) * p.t_s << ',' << m.u_cha[k] << ',' << m.i_cha[k] << ','
              << m.u_chb[k] << ',' << m.i_chb[k] << '\n';
    }
  }

  run.attack = run_attack(run.beps, derive_seed(config.master_seed, {stream::kTieBreak}), options.execution);

  ScenarioResult& r = run.result;
  r.config = config;
  r.attack = run.attack.summary;
  r.secure_bits = run.attack.bits.size();
  r.amplification = empirical_amplification(run.attack, config.defense.xor_rounds);

  const NoiseLevels levels = expected_levels(p);
  std::size_t alice_wrong = 0;
  std::size_t bob_wrong = 0;
  for (const auto& m : run.beps) {
    if (classify_exchange(m.arrangement.alice, m.arrangement.bob) == ExchangeClass::Discard) continue;
    if (infer_remote_bit(m.arrangement.alice, m.mean_sq_u, m.mean_sq_i, levels, p.channel) != m.arrangement.bob)
      ++alice_wrong;
    if (infer_remote_bit(m.arrangement.bob, m.mean_sq_u_bob, m.mean_sq_i_bob, levels, p.channel) !=
        m.arrangement.alice)
      ++bob_wrong;
  }
  r.legit_errors.alice = static_cast<double>(alice_wrong) / static_cast<double>(r.secure_bits);
  r.legit_errors.bob = static_cast<double>(bob_wrong) / static_cast<double>(r.secure_bits);
  r.solver = solver.diagnostics();
  r.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.output_dir.empty()) persist_scenario(run, scenario_dir(config).string(), extra);
  return run;
}

std::string suffixed_path(const std::string& path, const std::string& suffix) {
  if (path.empty()) return path;
  const std::filesystem::path p(path);
  return (p.parent_path() / (p.stem().string() + "_" + suffix + p.extension().string())).string();
}

void persist_scenario(const ScenarioRun& run, const std::string& dir_name,
                      const std::vector<std::string>& extra_files) {
  const std::filesystem::path dir(dir_name);
  std::filesystem::create_directories(dir);
  const auto& cfg = run.result.config;

  open_out(dir / "config.json") << json(cfg).dump(2) << '\n';
  open_out(dir / "summary.json") << json(run.result).dump(2) << '\n';
  {
    auto os = open_out(dir / "attack.csv");
    run.attack.write_csv(os);
  }
  {
    const NoiseLevels levels = expected_levels(cfg.protocol);
    std::size_t a = 0;
    auto os = open_out(dir / "bits.jsonl");
    for (const auto& m : run.beps) {
      json rec{{"bit", m.bit_index},
               {"alice", std::string(1, to_char(m.arrangement.alice))},
               {"bob", std::string(1, to_char(m.arrangement.bob))},
               {"mean_sq_u", m.mean_sq_u},
               {"mean_sq_i", m.mean_sq_i},
               {"mean_sq_u_bob", m.mean_sq_u_bob},
               {"mean_sq_i_bob", m.mean_sq_i_bob}};
      if (classify_exchange(m.arrangement.alice, m.arrangement.bob) == ExchangeClass::Discard) {
        rec["class"] = "discard";
      } else {
        rec["class"] = "secure";
        rec["key_bit"] = static_cast<int>(m.arrangement.alice);
        rec["alice_reads_bob"] = std::string(
            1, to_char(infer_remote_bit(m.arrangement.alice, m.mean_sq_u, m.mean_sq_i, levels, cfg.protocol.channel)));
        rec["bob_reads_alice"] = std::string(1, to_char(infer_remote_bit(m.arrangement.bob, m.mean_sq_u_bob,
                                                                         m.mean_sq_i_bob, levels,
                                                                         cfg.protocol.channel)));
        // Attack records are in BEP order, secure exchanges only.
        if (a < run.attack.bits.size() && run.attack.bits[a].bit == m.bit_index) {
          const auto& b = run.attack.bits[a++];
          rec["rho"] = b.rho;
          rec["eve_guess"] = to_string(b.guess);
          rec["eve_correct"] = b.q;
        }
      }
      os << rec.dump() << '\n';
    }
  }
  json files = json::array({"config.json", "summary.json", "attack.csv", "bits.jsonl"});
  for (const auto& f : extra_files) files.push_back(f);
  open_out(dir / "manifest.json") << json{{"scenario", cfg.name}, {"files", files}}.dump(2) << '\n';
}

// --- Attack table --------------------------------------------------------

const Table1Cell& Table1::at(int bep_units, double length_m) const {
  for (const auto& c : cells)
    if (c.bep_units == bep_units && c.length_m == length_m) return c;
  throw ArgumentError("attack table has no such cell");
}

std::string Table1::format() const {
  std::ostringstream os;
  os << std::left << std::setw(24) << "Bit exchange duration" << " | " << std::setw(15) << "Bits per second";
  for (double len : kTable1Lengths) os << " | " << std::setw(18) << (std::to_string(static_cast<int>(len)) + " m cable");
  os << '\n';
  for (int bep : kTable1Beps) {
    const auto& first = at(bep, kTable1Lengths[0]);
    const double bps = 1.0 / (bep * first.run.result.config.protocol.t_s);
    std::ostringstream b;
    b << std::setprecision(4) << bps;
    os << std::setw(24) << (std::to_string(bep) + " t_s") << " | " << std::setw(15) << b.str();
    for (double len : kTable1Lengths) {
      const auto& r = at(bep, len).run.result.attack;
      std::ostringstream c;
      c << std::fixed << std::setprecision(1) << 100.0 * r.p_e << "% (+/-" << 100.0 * r.binomial_std << ")";
      os << " | " << std::setw(18) << c.str();
    }
    os << '\n';
  }
  return os.str();
}

void Table1::write_csv(std::ostream& os) const {
  os << "bep_units,bits_per_second,length_m,p_E,binomial_std,epsilon\n";
  os << std::setprecision(12);
  for (const auto& c : cells) {
    const auto& r = c.run.result;
    os << c.bep_units << ',' << 1.0 / (c.bep_units * r.config.protocol.t_s) << ',' << c.length_m << ','
       << r.attack.p_e << ',' << r.attack.binomial_std << ',' << r.attack.epsilon << '\n';
  }
}

ScenarioConfig table1_cell_config(const ScenarioConfig& base, int bep_units, double length_m) {
  ScenarioConfig c = base;
  c.protocol.bep_units = bep_units;
  c.cable.length_m = length_m;
  c.cable.n_segments = std::max(1, static_cast<int>(std::lround(length_m / 10.0)));
  c.master_seed = derive_seed(base.master_seed, {stream::kScenario, static_cast<std::uint64_t>(bep_units),
                                                 static_cast<std::uint64_t>(std::llround(length_m))});
  c.name = "table1_bep" + std::to_string(bep_units) + "_" + std::to_string(std::llround(length_m)) + "m";
  return c;
}

Table1 reproduce_table1(const ScenarioConfig& base, const RunOptions& options) {
  Table1 t;
  for (int bep : kTable1Beps)
    for (double len : kTable1Lengths) t.cells.push_back({bep, len, {}});

  const bool parallel = options.execution == Execution::Parallel;
  std::vector<std::exception_ptr> errors(t.cells.size());
  const auto n = static_cast<std::ptrdiff_t>(t.cells.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    auto& cell = t.cells[static_cast<std::size_t>(k)];
    try {
      const ScenarioConfig cfg = table1_cell_config(base, cell.bep_units, cell.length_m);
      RunOptions inner = options;
      if (parallel) inner.execution = Execution::Serial;
      inner.dump_waveforms = suffixed_path(options.dump_waveforms, cfg.name);
      inner.dump_netlist = suffixed_path(options.dump_netlist, cfg.name);
      cell.run = run_scenario(cfg, inner);
    } catch (...) {
      errors[static_cast<std::size_t>(k)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return t;
}

std::string DefenseReport::format() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1);
  os << "undefended            p_E = " << 100.0 * baseline_p_e << "%\n";
  os << "capacitor killer      p_E = " << 100.0 * killer_p_e << "% (+/-" << 100.0 * killer_binomial_std << ")\n";
  for (const auto& r : xor_rounds) {
    if (r.round == 0) continue;
    os << "XOR x" << r.round << " (" << std::setw(4) << r.n_bits << " bits)  p_E = " << 100.0 * r.p_e
       << "% (predicted " << 100.0 * r.predicted << "%, +/-" << 100.0 * r.binomial_std << ")\n";
  }
  return os.str();
}

DefenseReport reproduce_defenses(const ScenarioConfig& base, const ScenarioRun* baseline, const RunOptions& options) {
  const int bep = kTable1Beps[2];
  const double len = kTable1Lengths[1];
  ScenarioConfig undefended = table1_cell_config(base, bep, len);
  undefended.defense = {};

  ScenarioRun own;
  if (!baseline) {
    RunOptions o = options;
    o.dump_waveforms = suffixed_path(options.dump_waveforms, undefended.name);
    o.dump_netlist = suffixed_path(options.dump_netlist, undefended.name);
    own = run_scenario(undefended, o);
    baseline = &own;
  }

  // Same noise seeds as the undefended run, so the comparison is paired.
  ScenarioConfig killer = baseline->result.config;
  killer.defense = {};
  killer.defense.capacitor_killer = true;
  killer.defense.tap = base.defense.tap;
  killer.name = "defense_capacitor_killer";
  RunOptions o = options;
  o.dump_waveforms = suffixed_path(options.dump_waveforms, killer.name);
  o.dump_netlist = suffixed_path(options.dump_netlist, killer.name);
  const ScenarioRun k = run_scenario(killer, o);

  DefenseReport rep;
  rep.baseline_p_e = baseline->result.attack.p_e;
  rep.killer_p_e = k.result.attack.p_e;
  rep.killer_binomial_std = k.result.attack.binomial_std;
  rep.xor_rounds = empirical_amplification(baseline->attack, 2);
  return rep;
}

}  // namespace kljn
