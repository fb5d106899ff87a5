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

#include "kljn/netlist.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <unordered_set>

#include "kljn/error.hpp"

namespace kljn {

namespace {
char kind_letter(BranchKind k) {
  switch (k) {
    case BranchKind::Resistor: return 'R';
    case BranchKind::Inductor: return 'L';
    case BranchKind::Capacitor: return 'C';
    case BranchKind::VoltageSource: return 'V';
    case BranchKind::Vcvs: return 'E';
  }
  return '?';
}

double parse_double(const std::string& s, const std::string& line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("netlist: bad number '" + s + "' in line: " + line);
  }
  if (used != s.size()) throw ConfigError("netlist: bad number '" + s + "' in line: " + line);
  return v;
}
}  // namespace

Netlist::Netlist() { ensure_node(std::string(kGround)); }

void Netlist::ensure_node(const std::string& name) {
  if (node_index_.contains(name)) return;
  node_index_.emplace(name, nodes_.size());
  nodes_.push_back(name);
}

void Netlist::add_branch(Branch b) {
  if (b.name.empty()) throw ConfigError("netlist: branch without a name");
  if (find_branch(b.name)) throw ConfigError("netlist: duplicate branch name " + b.name);
  ensure_node(b.node_a);
  ensure_node(b.node_b);
  branches_.push_back(std::move(b));
}

void Netlist::add_probe(Probe p) {
  if (find_probe(p.name)) throw ConfigError("netlist: duplicate probe name " + p.name);
  probes_.push_back(std::move(p));
}

void Netlist::replace_branch(const Branch& b) {
  auto it = std::find_if(branches_.begin(), branches_.end(), [&](const Branch& x) { return x.name == b.name; });
  if (it == branches_.end()) throw ArgumentError("netlist: no branch named " + b.name);
  ensure_node(b.node_a);
  ensure_node(b.node_b);
  *it = b;
}

bool Netlist::has_node(std::string_view name) const { return node_index_.contains(std::string(name)); }

std::optional<std::size_t> Netlist::node_index(std::string_view name) const {
  auto it = node_index_.find(std::string(name));
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

const Branch* Netlist::find_branch(std::string_view name) const {
  for (const auto& b : branches_)
    if (b.name == name) return &b;
  return nullptr;
}

const Probe* Netlist::find_probe(std::string_view name) const {
  for (const auto& p : probes_)
    if (p.name == name) return &p;
  return nullptr;
}

void Netlist::validate() const {
  std::unordered_set<std::string> names;
  for (const auto& b : branches_) {
    if (!names.insert(b.name).second) throw ConfigError("netlist: duplicate branch name " + b.name);
    if (!has_node(b.node_a) || !has_node(b.node_b))
      throw ConfigError("netlist: branch " + b.name + " references a missing node");
    if (b.node_a == b.node_b) throw ConfigError("netlist: branch " + b.name + " is shorted on itself");
    switch (b.kind) {
      case BranchKind::Resistor:
      case BranchKind::Inductor:
      case BranchKind::Capacitor:
        if (!(b.value > 0.0) || !std::isfinite(b.value))
          throw ConfigError("netlist: branch " + b.name + " needs a positive finite value");
        break;
      case BranchKind::VoltageSource:
        if (!std::isfinite(b.value)) throw ConfigError("netlist: source " + b.name + " has a non-finite value");
        break;
      case BranchKind::Vcvs:
        if (!has_node(b.ctrl_a) || !has_node(b.ctrl_b))
          throw ConfigError("netlist: controlled source " + b.name + " references a missing control node");
        break;
    }
  }
  for (const auto& p : probes_) {
    if (p.kind == ProbeKind::NodeVoltage && !has_node(p.target))
      throw ConfigError("netlist: probe " + p.name + " targets missing node " + p.target);
    if (p.kind == ProbeKind::BranchCurrent && !find_branch(p.target))
      throw ConfigError("netlist: probe " + p.name + " targets missing branch " + p.target);
  }
}

std::string Netlist::to_text() const {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& b : branches_) {
    os << kind_letter(b.kind) << ' ' << b.name << ' ' << b.node_a << ' ' << b.node_b << ' ';
    if (b.kind == BranchKind::VoltageSource && !b.source.empty())
      os << '@' << b.source;
    else if (b.kind == BranchKind::Vcvs)
      os << "V(" << b.ctrl_a << ',' << b.ctrl_b << ")*" << b.value;
    else
      os << b.value;
    os << '\n';
  }
  for (const auto& p : probes_)
    os << "PROBE " << p.name << ' ' << (p.kind == ProbeKind::NodeVoltage ? 'V' : 'I') << ' ' << p.target << '\n';
  return os.str();
}

Netlist Netlist::from_text(std::string_view text) {
  Netlist net;
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind) || kind.front() == '*' || kind.front() == '#') continue;
    if (kind == "PROBE") {
      std::string name, type, target;
      if (!(ls >> name >> type >> target) || (type != "V" && type != "I"))
        throw ConfigError("netlist: malformed probe line: " + line);
      net.add_probe({name, type == "V" ? ProbeKind::NodeVoltage : ProbeKind::BranchCurrent, target});
      continue;
    }
    Branch b;
    std::string value;
    if (!(ls >> b.name >> b.node_a >> b.node_b >> value) || kind.size() != 1)
      throw ConfigError("netlist: malformed element line: " + line);
    switch (kind.front()) {
      case 'R': b.kind = BranchKind::Resistor; break;
      case 'L': b.kind = BranchKind::Inductor; break;
      case 'C': b.kind = BranchKind::Capacitor; break;
      case 'V': b.kind = BranchKind::VoltageSource; break;
      case 'E': b.kind = BranchKind::Vcvs; break;
      default: throw ConfigError("netlist: unknown element kind in line: " + line);
    }
    if (b.kind == BranchKind::VoltageSource && value.front() == '@') {
      b.source = value.substr(1);
    } else if (b.kind == BranchKind::Vcvs) {
      // V(ctrl_a,ctrl_b)*gain
      const auto open = value.find('(');
      const auto comma = value.find(',');
      const auto close = value.find(")*");
      if (value.rfind("V(", 0) != 0 || comma == std::string::npos || close == std::string::npos || comma > close ||
          open != 1)
        throw ConfigError("netlist: malformed controlled-source value in line: " + line);
      b.ctrl_a = value.substr(2, comma - 2);
      b.ctrl_b = value.substr(comma + 1, close - comma - 1);
      b.value = parse_double(value.substr(close + 2), line);
    } else {
      b.value = parse_double(value, line);
    }
    net.add_branch(std::move(b));
  }
  // Control nodes must exist even if no branch terminal names them.
  for (const auto& b : net.branches_)
    if (b.kind == BranchKind::Vcvs && (!net.has_node(b.ctrl_a) || !net.has_node(b.ctrl_b)))
      throw ConfigError("netlist: controlled source " + b.name + " references a missing control node");
  return net;
}

}  // namespace kljn
