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

// Command-line driver: attack table, defenses, model comparison, single runs and
// noise quality checks. Results go under --out.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "kljn/error.hpp"
#include "kljn/kernels.hpp"
#include "kljn/model_compare.hpp"
#include "kljn/noise.hpp"
#include "kljn/scenario.hpp"
#include "kljn/seed.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Global {
  std::uint64_t seed = kljn::kDefaultMasterSeed;
  bool seed_set = false;
  std::string out = "out";
  std::string dump_waveforms;
  std::string dump_netlist;
};

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p);
  if (!os) throw kljn::ConfigError("cannot write " + p.string());
  os << std::setprecision(12);
  return os;
}

void write_manifest(const fs::path& out, const std::string& command, const json& entries) {
  open_out(out / "manifest.json") << json{{"command", command}, {"entries", entries}}.dump(2) << '\n';
}

kljn::RunOptions run_options(const Global& g, bool serial) {
  kljn::RunOptions o;
  o.execution = serial ? kljn::Execution::Serial : kljn::Execution::Parallel;
  o.dump_waveforms = g.dump_waveforms;
  o.dump_netlist = g.dump_netlist;
  return o;
}

struct Overrides {
  std::size_t bits = 0;
  int bep = 0;
  double length = 0.0;
  bool zero_capacitance = false;
  bool killer = false;
  std::string tap;
  int xor_rounds = -1;
  std::string channel;
  bool serial = false;
};

void add_overrides(CLI::App* app, Overrides& o, bool single) {
  app->add_option("--bits", o.bits, "Bits per scenario (N)");
  app->add_flag("--zero-capacitance", o.zero_capacitance, "Force c_per_m = 0 (null control)");
  app->add_flag("--serial", o.serial, "Use the serial reference path");
  app->add_option("--channel", o.channel, "Legitimate inference channel: voltage|current|combined");
  if (single) {
    app->add_option("--bep", o.bep, "BEP length in units of t_s");
    app->add_option("--length", o.length, "Cable length in meters (one section per 10 m)");
    app->add_flag("--killer", o.killer, "Enable the capacitor killer");
    app->add_option("--xor-rounds", o.xor_rounds, "XOR privacy amplification rounds");
  }
  app->add_option("--tap", o.tap, "Capacitor killer tap end: alice|bob");
}

void apply(kljn::ScenarioConfig& c, const Overrides& o, const Global& g) {
  if (o.bits) c.n_bits = o.bits;
  if (o.bep) c.protocol.bep_units = o.bep;
  if (o.length > 0.0) {
    c.cable.length_m = o.length;
    c.cable.n_segments = std::max(1, static_cast<int>(std::lround(o.length / 10.0)));
  }
  if (o.zero_capacitance) c.cable.c_per_m = 0.0;
  if (o.killer) c.defense.capacitor_killer = true;
  if (!o.tap.empty()) {
    json j = c;
    j["defense"]["tap"] = o.tap;
    c = j.get<kljn::ScenarioConfig>();
  }
  if (!o.channel.empty()) {
    json j = c;
    j["protocol"]["channel"] = o.channel;
    c = j.get<kljn::ScenarioConfig>();
  }
  if (o.xor_rounds >= 0) c.defense.xor_rounds = o.xor_rounds;
  if (g.seed_set) c.master_seed = g.seed;
  c.output_dir = g.out;
}

int cmd_table1(const Global& g, const Overrides& o) {
  kljn::ScenarioConfig base;
  apply(base, o, g);
  const auto t = kljn::reproduce_table1(base, run_options(g, o.serial));
  const fs::path out(g.out);
  const std::string text = t.format();
  std::cout << text;
  open_out(out / "table1.txt") << text;
  {
    auto os = open_out(out / "table1.csv");
    t.write_csv(os);
  }
  json entries = json::array();
  for (const auto& c : t.cells)
    entries.push_back({{"scenario", c.run.result.config.name}, {"dir", c.run.result.config.name},
                       {"p_E", c.run.result.attack.p_e}});
  entries.push_back({{"file", "table1.csv"}});
  entries.push_back({{"file", "table1.txt"}});
  write_manifest(out, "table1", entries);
  return 0;
}

int cmd_defenses(const Global& g, const Overrides& o) {
  kljn::ScenarioConfig base;
  apply(base, o, g);
  const auto rep = kljn::reproduce_defenses(base, nullptr, run_options(g, o.serial));
  std::cout << rep.format();
  json rounds = json::array();
  for (const auto& r : rep.xor_rounds)
    rounds.push_back({{"round", r.round}, {"n_bits", r.n_bits}, {"p_E", r.p_e},
                      {"binomial_std", r.binomial_std}, {"predicted", r.predicted}});
  const json j{{"baseline_p_E", rep.baseline_p_e},
               {"killer_p_E", rep.killer_p_e},
               {"killer_binomial_std", rep.killer_binomial_std},
               {"xor", rounds}};
  const fs::path out(g.out);
  open_out(out / "defenses.json") << j.dump(2) << '\n';
  write_manifest(out, "defenses",
                 json::array({{{"file", "defenses.json"}},
                              {{"scenario", "table1_bep100_1000m"}, {"dir", "table1_bep100_1000m"}},
                              {{"scenario", "defense_capacitor_killer"}, {"dir", "defense_capacitor_killer"}}}));
  return 0;
}

int cmd_compare(const Global& g, std::vector<double> gammas, double length, int segments, double duration) {
  kljn::CableSpec cable = kljn::CableSpec::rg58(length);
  if (segments > 0) cable.n_segments = segments;
  cable.validate();
  const fs::path out(g.out);
  auto summary = open_out(out / "compare_models.csv");
  summary << "gamma,bandwidth_hz,nrmsd,verdict\n";
  json entries = json::array({{{"file", "compare_models.csv"}}});
  for (double gamma : gammas) {
    if (!(gamma > 0.0)) throw kljn::ArgumentError("gamma must be positive");
    const double bw = cable.velocity_m_s / (gamma * cable.length_m);
    const auto rep = kljn::compare_models(cable, 1e3, 9e3, bw, duration,
                                          kljn::derive_seed(g.seed, {kljn::stream::kScenario}));
    std::cout << "gamma " << gamma << "  B " << bw << " Hz  nrmsd " << rep.nrmsd << "  " << kljn::to_string(rep.verdict)
              << '\n';
    summary << gamma << ',' << bw << ',' << rep.nrmsd << ',' << kljn::to_string(rep.verdict) << '\n';
    std::ostringstream name;
    name << "compare_gamma_" << gamma << ".csv";
    auto os = open_out(out / name.str());
    rep.write_csv(os);
    entries.push_back({{"file", name.str()}, {"gamma", gamma}});
  }
  if (!g.dump_netlist.empty()) {
    open_out(kljn::suffixed_path(g.dump_netlist, "lumped")) << kljn::build_lumped(1e3, 9e3, cable).to_text();
    open_out(kljn::suffixed_path(g.dump_netlist, "distributed")) << kljn::build_distributed(1e3, 9e3, cable).to_text();
  }
  write_manifest(out, "compare-models", entries);
  return 0;
}

int cmd_run(const Global& g, const std::string& config_path, const Overrides& o) {
  std::ifstream is(config_path);
  if (!is) throw kljn::ConfigError("cannot read " + config_path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw kljn::ConfigError(std::string("config parse: ") + e.what());
  }
  auto cfg = j.get<kljn::ScenarioConfig>();
  const std::string file_out = cfg.output_dir;
  Global gg = g;
  if (!file_out.empty() && g.out == "out") gg.out = file_out;
  apply(cfg, o, gg);
  const auto run = kljn::run_scenario(cfg, run_options(gg, o.serial));
  std::cout << json(run.result).dump(2) << '\n';
  write_manifest(fs::path(gg.out), "run", json::array({{{"scenario", cfg.name}, {"dir", cfg.name}}}));
  return 0;
}

int cmd_noise(const Global& g, std::size_t samples, double bandwidth, double dt, int bins) {
  if (dt <= 0.0) dt = 1.0 / (4.0 * bandwidth);
  kljn::NoiseSpec spec;
  spec.bandwidth_hz = bandwidth;
  spec.rms_volts = 1.0;
  spec.sample_interval_s = dt;
  spec.duration_s = static_cast<double>(samples) * dt;
  spec.seed = kljn::derive_seed(g.seed, {kljn::stream::kAliceNoise});
  const auto w = kljn::generate(spec);
  const auto rep = kljn::gaussianity_report(w, bins);
  const std::size_t seg = 4096;
  const auto psd = kljn::kernels::welch_psd_omp(w.samples(), seg);
  const double frac = kljn::kernels::power_fraction_above(psd, 1.0 / (static_cast<double>(seg) * dt), bandwidth);
  const json j{{"samples", w.size()},       {"bandwidth_hz", bandwidth},
               {"sample_interval_s", dt},   {"target_rms", spec.rms_volts},
               {"mean", rep.mean},          {"stddev", rep.stddev},
               {"sigma_rel_error", std::abs(rep.stddev - spec.rms_volts) / spec.rms_volts},
               {"out_of_band_fraction", frac},
               {"chi2", rep.chi2},          {"chi2_dof", rep.chi2_dof},
               {"chi2_pvalue", rep.chi2_pvalue},
               {"max_quantile_deviation", rep.max_quantile_deviation}};
  std::cout << j.dump(2) << '\n';
  const fs::path out(g.out);
  open_out(out / "noise_check.json") << j.dump(2) << '\n';
  {
    auto os = open_out(out / "noise_histogram.csv");
    rep.write_csv(os);
  }
  if (!g.dump_waveforms.empty()) {
    auto os = open_out(g.dump_waveforms);
    os << "t,u\n";
    for (std::size_t k = 0; k < w.size(); ++k) os << w.time_at(k) << ',' << w[k] << '\n';
  }
  write_manifest(out, "noise-check",
                 json::array({{{"file", "noise_check.json"}}, {{"file", "noise_histogram.csv"}}}));
  return 0;
}

void print_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KLJN cable-capacitance attack simulator"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->each([&](const std::string&) { g.seed_set = true; });
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--dump-waveforms", g.dump_waveforms, "Write probe waveforms as CSV to PATH");
  app.add_option("--dump-netlist", g.dump_netlist, "Write the simulated netlist to PATH");

  Overrides t1o, defo, runo;
  auto* t1 = app.add_subcommand("table1", "Reproduce the six-cell attack table");
  add_overrides(t1, t1o, false);
  auto* def = app.add_subcommand("defenses", "Capacitor killer and XOR amplification on the strongest cell");
  add_overrides(def, defo, false);

  std::vector<double> gammas{0.8, 8.0, 800.0};
  double cmp_length = 1000.0;
  int cmp_segments = 0;
  double cmp_duration = 0.0;
  auto* cmp = app.add_subcommand("compare-models", "Lumped vs distributed cable at several gamma");
  cmp->add_option("--gamma", gammas, "Wavelength-to-length ratios")->capture_default_str();
  cmp->add_option("--length", cmp_length, "Cable length in meters")->capture_default_str();
  cmp->add_option("--segments", cmp_segments, "Ladder sections (default one per 10 m)");
  cmp->add_option("--duration", cmp_duration, "Simulated seconds (default 200 / B)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run one scenario from a JSON config");
  run->add_option("--config", config_path, "Scenario config JSON")->required();
  add_overrides(run, runo, true);

  std::size_t samples = 1'000'000;
  double bandwidth = 250.0;
  double dt = 0.0;
  int bins = 50;
  auto* noise = app.add_subcommand("noise-check", "Gaussianity and band-limit check of the noise generator");
  noise->add_option("--samples", samples)->capture_default_str();
  noise->add_option("--bandwidth", bandwidth)->capture_default_str();
  noise->add_option("--dt", dt, "Sample interval (default 1 / (4 B))");
  noise->add_option("--bins", bins)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("usage", e.what());
    return 2;
  }

  try {
    if (*t1) return cmd_table1(g, t1o);
    if (*def) return cmd_defenses(g, defo);
    if (*cmp) return cmd_compare(g, gammas, cmp_length, cmp_segments, cmp_duration);
    if (*run) return cmd_run(g, config_path, runo);
    if (*noise) return cmd_noise(g, samples, bandwidth, dt, bins);
  } catch (const kljn::Error& e) {
    print_error(e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("internal", e.what());
    return 1;
  }
  return 1;
}
