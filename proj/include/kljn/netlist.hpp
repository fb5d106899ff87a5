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

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kljn {

enum class BranchKind {
  Resistor,
  Inductor,
  Capacitor,
  VoltageSource,  // independent: DC `value` or a named waveform in `source`
  Vcvs,           // v(a) - v(b) = value * (v(ctrl_a) - v(ctrl_b))
};

struct Branch {
  BranchKind kind = BranchKind::Resistor;
  std::string name;
  std::string node_a;
  std::string node_b;
  double value = 0.0;
  std::string source;  // VoltageSource only; empty means DC `value`
  std::string ctrl_a;  // Vcvs only
  std::string ctrl_b;

  bool operator==(const Branch&) const = default;
};

enum class ProbeKind { NodeVoltage, BranchCurrent };

/// Node voltage taps a node; branch current taps the a->b current of a branch.
struct Probe {
  std::string name;
  ProbeKind kind = ProbeKind::NodeVoltage;
  std::string target;

  bool operator==(const Probe&) const = default;
};

/// Node/branch circuit description. Node "0" is ground and always exists;
/// other nodes come into being when a branch references them.
class Netlist {
 public:
  static constexpr std::string_view kGround = "0";

  Netlist();

  void add_branch(Branch b);
  void add_probe(Probe p);
  /// Replaces the branch with the same name; throws ArgumentError if absent.
  void replace_branch(const Branch& b);

  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  const std::vector<Probe>& probes() const noexcept { return probes_; }

  bool has_node(std::string_view name) const;
  std::optional<std::size_t> node_index(std::string_view name) const;
  const Branch* find_branch(std::string_view name) const;
  const Probe* find_probe(std::string_view name) const;

  /// Structural checks: unique names, positive element values, probe targets
  /// and control nodes exist. Throws ConfigError.
  void validate() const;

  /// One line per element: `KIND name node_a node_b value_or_source`, then
  /// `PROBE name V|I target` lines. Values use round-trip precision.
  std::string to_text() const;
  static Netlist from_text(std::string_view text);

  bool operator==(const Netlist&) const = default;

 private:
  void ensure_node(const std::string& name);

  std::vector<std::string> nodes_;
  std::unordered_map<std::string, std::size_t> node_index_;
  std::vector<Branch> branches_;
  std::vector<Probe> probes_;
};

}  // namespace kljn
