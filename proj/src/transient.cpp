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

#include "kljn/transient.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "kljn/error.hpp"

namespace kljn {

void SolverConfig::validate(double t_s) const {
  if (!(internal_step_s > 0.0)) throw ConfigError("solver step must be positive");
  if (internal_step_s > t_s * (1.0 + 1e-12)) throw ConfigError("solver step must not exceed the measurement interval");
  if (!(tolerance > 0.0 && tolerance <= 1e-6)) throw ConfigError("solver tolerance must lie in (0, 1e-6]");
  if (residual_check_interval == 0) throw ConfigError("residual check interval must be positive");
}

const std::vector<double>& ProbeBlock::at(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return samples[i];
  throw ArgumentError("no probe named " + name);
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Lu = Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>>;

constexpr int kGroundIdx = -1;

struct TwoTerminal {
  int a = kGroundIdx;
  int b = kGroundIdx;
  double value = 0.0;
  std::size_t branch = 0;
  double v_prev = 0.0;  // branch voltage at the last accepted step
  double i_prev = 0.0;  // branch current at the last accepted step
};

struct VoltageBranch {
  int a = kGroundIdx;
  int b = kGroundIdx;
  int row = 0;
  std::size_t branch = 0;
  bool controlled = false;
  int ctrl_a = kGroundIdx;
  int ctrl_b = kGroundIdx;
  double gain = 0.0;       // controlled only
  double dc = 0.0;         // independent DC value
  std::string waveform;    // independent waveform name, empty for DC
};

struct Factorized {
  SpMat trapezoidal;
  SpMat backward_euler;
  Lu lu_trapezoidal;
  Lu lu_backward_euler;
};

enum class Method { Trapezoidal, BackwardEuler };

}  // namespace

struct TransientSolver::Impl {
  Netlist netlist;
  SolverConfig config;
  int n_nodes = 0;  // excluding ground
  int n_unknowns = 0;
  std::vector<TwoTerminal> resistors, capacitors, inductors;
  std::vector<VoltageBranch> vsources;
  std::map<std::vector<double>, std::unique_ptr<Factorized>> cache;
  Factorized* active = nullptr;
  Eigen::VectorXd x, rhs, residual;
  double time = 0.0;
  SolverDiagnostics diag;

  struct ProbeTap {
    std::string name;
    ProbeKind kind;
    int node = kGroundIdx;
    const Branch* branch = nullptr;
  };
  std::vector<ProbeTap> taps;

  int unknown_of(const std::string& node) const {
    const auto idx = netlist.node_index(node);
    if (!idx) throw ConfigError("unknown node " + node);
    return static_cast<int>(*idx) - 1;  // ground (index 0) maps to -1
  }

  std::string name_of_unknown(int u) const {
    if (u >= 0 && u < n_nodes) return netlist.nodes()[u + 1];
    if (u >= n_nodes && u < n_unknowns) return netlist.branches()[vsources[u - n_nodes].branch].name;
    return "?";
  }

  void check_connectivity() const {
    // Union-find over all branch terminals; every node must reach ground.
    const auto& nodes = netlist.nodes();
    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
      while (parent[i] != i) i = parent[i] = parent[parent[i]];
      return i;
    };
    for (const auto& b : netlist.branches()) {
      const auto ia = *netlist.node_index(b.node_a);
      const auto ib = *netlist.node_index(b.node_b);
      parent[find(ia)] = find(ib);
    }
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (find(i) != find(0))
        throw SingularSystemError(nodes[i], "singular system: node '" + nodes[i] + "' has no path to ground");
  }

  SpMat assemble(Method m) const {
    const double h = config.internal_step_s;
    std::vector<Eigen::Triplet<double>> t;
    auto stamp_g = [&](int a, int b, double g) {
      if (a >= 0) t.emplace_back(a, a, g);
      if (b >= 0) t.emplace_back(b, b, g);
      if (a >= 0 && b >= 0) {
        t.emplace_back(a, b, -g);
        t.emplace_back(b, a, -g);
      }
    };
    for (const auto& r : resistors) stamp_g(r.a, r.b, 1.0 / r.value);
    for (const auto& c : capacitors) stamp_g(c.a, c.b, (m == Method::Trapezoidal ? 2.0 : 1.0) * c.value / h);
    for (const auto& l : inductors) stamp_g(l.a, l.b, h / ((m == Method::Trapezoidal ? 2.0 : 1.0) * l.value));
    for (const auto& v : vsources) {
      if (v.a >= 0) {
        t.emplace_back(v.a, v.row, 1.0);
        t.emplace_back(v.row, v.a, 1.0);
      }
      if (v.b >= 0) {
        t.emplace_back(v.b, v.row, -1.0);
        t.emplace_back(v.row, v.b, -1.0);
      }
      if (v.controlled) {
        if (v.ctrl_a >= 0) t.emplace_back(v.row, v.ctrl_a, -v.gain);
        if (v.ctrl_b >= 0) t.emplace_back(v.row, v.ctrl_b, v.gain);
      }
    }
    SpMat a(n_unknowns, n_unknowns);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();
    return a;
  }

  void factor(Lu& lu, SpMat& a) const {
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success) {
      // Eigen reports the offending column at the end of its message.
      const std::string msg = lu.lastErrorMessage();
      std::string who = "?";
      const auto pos = msg.find_last_not_of("0123456789");
      if (pos != std::string::npos && pos + 1 < msg.size()) who = name_of_unknown(std::stoi(msg.substr(pos + 1)));
      throw SingularSystemError(who, "singular system matrix near '" + who + "': " + msg);
    }
  }

  void activate() {
    std::vector<double> key;
    key.reserve(resistors.size());
    for (const auto& r : resistors) key.push_back(r.value);
    auto it = cache.find(key);
    if (it == cache.end()) {
      auto f = std::make_unique<Factorized>();
      f->trapezoidal = assemble(Method::Trapezoidal);
      f->backward_euler = assemble(Method::BackwardEuler);
      factor(f->lu_trapezoidal, f->trapezoidal);
      factor(f->lu_backward_euler, f->backward_euler);
      diag.factorizations += 2;
      it = cache.emplace(std::move(key), std::move(f)).first;
    }
    active = it->second.get();
  }

  double voltage(int u) const { return u >= 0 ? x[u] : 0.0; }

  double probe_value(const ProbeTap& p) const {
    if (p.kind == ProbeKind::NodeVoltage) return voltage(p.node);
    return current_of(*p.branch);
  }

  double current_of(const Branch& b) const {
    const auto idx = static_cast<std::size_t>(&b - netlist.branches().data());
    switch (b.kind) {
      case BranchKind::Resistor:
        for (const auto& r : resistors)
          if (r.branch == idx) return (voltage(r.a) - voltage(r.b)) / r.value;
        break;
      case BranchKind::Capacitor:
        for (const auto& c : capacitors)
          if (c.branch == idx) return c.i_prev;
        break;
      case BranchKind::Inductor:
        for (const auto& l : inductors)
          if (l.branch == idx) return l.i_prev;
        break;
      case BranchKind::VoltageSource:
      case BranchKind::Vcvs:
        for (const auto& v : vsources)
          if (v.branch == idx) return x[v.row];
        break;
    }
    throw ArgumentError("branch current unavailable for " + b.name);
  }

  void step(Method m, const std::vector<const double*>& source_data, std::size_t j) {
    const double h = config.internal_step_s;
    const bool trap = m == Method::Trapezoidal;
    rhs.setZero();
    for (const auto& c : capacitors) {
      const double g = (trap ? 2.0 : 1.0) * c.value / h;
      const double hist = trap ? g * c.v_prev + c.i_prev : g * c.v_prev;
      if (c.a >= 0) rhs[c.a] += hist;
      if (c.b >= 0) rhs[c.b] -= hist;
    }
    for (const auto& l : inductors) {
      const double g = h / ((trap ? 2.0 : 1.0) * l.value);
      const double hist = trap ? l.i_prev + g * l.v_prev : l.i_prev;
      if (l.a >= 0) rhs[l.a] -= hist;
      if (l.b >= 0) rhs[l.b] += hist;
    }
    for (std::size_t k = 0; k < vsources.size(); ++k) {
      const auto& v = vsources[k];
      if (v.controlled) continue;
      rhs[v.row] = source_data[k] ? source_data[k][j] : v.dc;
    }

    Lu& lu = trap ? active->lu_trapezoidal : active->lu_backward_euler;
    const SpMat& a = trap ? active->trapezoidal : active->backward_euler;
    x = lu.solve(rhs);

    ++diag.step_count;
    if (diag.step_count % config.residual_check_interval == 1 || m == Method::BackwardEuler) check_residual(a, lu);

    for (int i = 0; i < n_unknowns; ++i)
      if (!std::isfinite(x[i]))
        throw DivergenceError("solution diverged at t = " + std::to_string(time + h) + " (unknown '" +
                              name_of_unknown(i) + "')");

    for (auto& c : capacitors) {
      const double v = voltage(c.a) - voltage(c.b);
      const double g = (trap ? 2.0 : 1.0) * c.value / h;
      c.i_prev = trap ? g * (v - c.v_prev) - c.i_prev : g * (v - c.v_prev);
      c.v_prev = v;
    }
    for (auto& l : inductors) {
      const double v = voltage(l.a) - voltage(l.b);
      const double g = h / ((trap ? 2.0 : 1.0) * l.value);
      l.i_prev = trap ? l.i_prev + g * (v + l.v_prev) : l.i_prev + g * v;
      l.v_prev = v;
    }
    time += h;
  }

  void check_residual(const SpMat& a, Lu& lu) {
    auto relative = [&]() {
      residual = rhs - a * x;
      Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
      for (int k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it) row_sums[it.row()] += std::abs(it.value());
      const double scale = row_sums.maxCoeff() * x.cwiseAbs().maxCoeff() + rhs.cwiseAbs().maxCoeff();
      return scale > 0.0 ? residual.cwiseAbs().maxCoeff() / scale : 0.0;
    };
    double rel = relative();
    if (rel > config.tolerance) {
      x += lu.solve(residual);  // one step of iterative refinement
      rel = relative();
    }
    diag.max_residual = std::max(diag.max_residual, rel);
    if (rel > config.tolerance)
      throw DivergenceError("linear solve residual " + std::to_string(rel) + " exceeds tolerance");
  }
};

TransientSolver::TransientSolver(Netlist netlist, SolverConfig config) : impl_(std::make_unique<Impl>()) {
  auto& s = *impl_;
  netlist.validate();
  if (!(config.internal_step_s > 0.0)) throw ConfigError("solver step must be positive");
  if (!(config.tolerance > 0.0 && config.tolerance <= 1e-6)) throw ConfigError("solver tolerance must lie in (0, 1e-6]");
  if (config.residual_check_interval == 0) throw ConfigError("residual check interval must be positive");
  s.netlist = std::move(netlist);
  s.config = config;
  s.n_nodes = static_cast<int>(s.netlist.nodes().size()) - 1;
  s.check_connectivity();

  int row = s.n_nodes;
  const auto& branches = s.netlist.branches();
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const auto& b = branches[i];
    const int a = s.unknown_of(b.node_a);
    const int c = s.unknown_of(b.node_b);
    switch (b.kind) {
      case BranchKind::Resistor: s.resistors.push_back({a, c, b.value, i}); break;
      case BranchKind::Capacitor: s.capacitors.push_back({a, c, b.value, i}); break;
      case BranchKind::Inductor: s.inductors.push_back({a, c, b.value, i}); break;
      case BranchKind::VoltageSource: {
        VoltageBranch v;
        v.a = a;
        v.b = c;
        v.row = row++;
        v.branch = i;
        v.dc = b.value;
        v.waveform = b.source;
        s.vsources.push_back(v);
        break;
      }
      case BranchKind::Vcvs: {
        VoltageBranch v;
        v.a = a;
        v.b = c;
        v.row = row++;
        v.branch = i;
        v.controlled = true;
        v.ctrl_a = s.unknown_of(b.ctrl_a);
        v.ctrl_b = s.unknown_of(b.ctrl_b);
        v.gain = b.value;
        s.vsources.push_back(v);
        break;
      }
    }
  }
  s.n_unknowns = row;
  s.x = Eigen::VectorXd::Zero(s.n_unknowns);
  s.rhs = Eigen::VectorXd::Zero(s.n_unknowns);

  for (const auto& p : s.netlist.probes()) {
    Impl::ProbeTap tap{p.name, p.kind};
    if (p.kind == ProbeKind::NodeVoltage)
      tap.node = s.unknown_of(p.target);
    else
      tap.branch = s.netlist.find_branch(p.target);
    s.taps.push_back(tap);
  }
  s.activate();
}

TransientSolver::~TransientSolver() = default;
TransientSolver::TransientSolver(TransientSolver&&) noexcept = default;
TransientSolver& TransientSolver::operator=(TransientSolver&&) noexcept = default;

void TransientSolver::set_resistance(const std::string& branch, double ohms) {
  if (!(ohms > 0.0) || !std::isfinite(ohms)) throw ConfigError("resistance must be positive and finite");
  const auto& branches = impl_->netlist.branches();
  for (auto& r : impl_->resistors) {
    if (branches[r.branch].name == branch) {
      if (r.value != ohms) {
        r.value = ohms;
        impl_->activate();
      }
      return;
    }
  }
  throw ArgumentError("no resistor named " + branch);
}

ProbeBlock TransientSolver::advance(const SourceBlock& sources, std::size_t n_steps, std::size_t decimation,
                                    bool discontinuity) {
  auto& s = *impl_;
  if (decimation == 0) throw ArgumentError("decimation must be positive");
  std::vector<const double*> data(s.vsources.size(), nullptr);
  for (std::size_t k = 0; k < s.vsources.size(); ++k) {
    const auto& v = s.vsources[k];
    if (v.controlled || v.waveform.empty()) continue;
    auto it = sources.find(v.waveform);
    if (it == sources.end()) throw ArgumentError("no samples supplied for source waveform '" + v.waveform + "'");
    if (it->second.size() < n_steps)
      throw ArgumentError("source waveform '" + v.waveform + "' is shorter than the requested interval");
    data[k] = it->second.data();
  }

  ProbeBlock out;
  for (const auto& t : s.taps) out.names.push_back(t.name);
  out.samples.assign(s.taps.size(), {});
  for (auto& v : out.samples) v.reserve(n_steps / decimation);

  for (std::size_t j = 0; j < n_steps; ++j) {
    const bool be = discontinuity && j == 0 && s.config.backward_euler_restart;
    s.step(be ? Method::BackwardEuler : Method::Trapezoidal, data, j);
    if ((j + 1) % decimation == 0)
      for (std::size_t p = 0; p < s.taps.size(); ++p) out.samples[p].push_back(s.probe_value(s.taps[p]));
  }
  return out;
}

double TransientSolver::time() const noexcept { return impl_->time; }
const SolverDiagnostics& TransientSolver::diagnostics() const noexcept { return impl_->diag; }
const Netlist& TransientSolver::netlist() const noexcept { return impl_->netlist; }
const SolverConfig& TransientSolver::config() const noexcept { return impl_->config; }

double TransientSolver::node_voltage(const std::string& node) const { return impl_->voltage(impl_->unknown_of(node)); }

double TransientSolver::branch_current(const std::string& branch) const {
  const Branch* b = impl_->netlist.find_branch(branch);
  if (!b) throw ArgumentError("no branch named " + branch);
  return impl_->current_of(*b);
}

double TransientSolver::stored_energy() const {
  double e = 0.0;
  for (const auto& c : impl_->capacitors) e += 0.5 * c.value * c.v_prev * c.v_prev;
  for (const auto& l : impl_->inductors) e += 0.5 * l.value * l.i_prev * l.i_prev;
  return e;
}

namespace {
std::size_t step_ratio(double interval, double step, const char* what) {
  const double r = interval / step;
  const auto n = static_cast<std::size_t>(std::llround(r));
  if (n == 0 || std::abs(r - static_cast<double>(n)) > 1e-6 * r)
    throw ConfigError(std::string(what) + " must be a whole multiple of the internal step");
  return n;
}
}  // namespace

TransientResult transient_solve(const Netlist& netlist, const std::map<std::string, Waveform>& sources,
                                const SolverConfig& config, double duration_s, double t_s) {
  config.validate(t_s);
  const std::size_t decimation = step_ratio(t_s, config.internal_step_s, "t_s");
  const std::size_t n_steps = step_ratio(duration_s, config.internal_step_s, "duration");
  SourceBlock block;
  for (const auto& [name, w] : sources) {
    if (std::abs(w.sample_interval() - config.internal_step_s) > 1e-9 * config.internal_step_s)
      throw ArgumentError("source '" + name + "' is not sampled at the internal step");
    // Sample k is the value at k h; step j needs the value at its end.
    if (w.size() < n_steps + 1)
      throw ArgumentError("source '" + name + "' must cover [0, duration] with " + std::to_string(n_steps + 1) +
                          " samples");
    block.emplace(name, w.samples().subspan(1, n_steps));
  }
  TransientSolver solver(netlist, config);
  ProbeBlock pb = solver.advance(block, n_steps, decimation, /*discontinuity=*/true);

  TransientResult result;
  for (std::size_t p = 0; p < pb.names.size(); ++p) {
    if (pb.samples[p].empty()) throw ArgumentError("duration shorter than one measurement interval");
    result.probes.emplace(pb.names[p], Waveform(std::move(pb.samples[p]), t_s, t_s));
  }
  result.diagnostics = solver.diagnostics();
  return result;
}

std::complex<double> frequency_response_check(const Netlist& netlist, const std::string& source,
                                              const std::string& probe, double f_hz, const SolverConfig& config,
                                              double settle_s, int n_periods) {
  const double h = config.internal_step_s;
  if (!(f_hz > 0.0)) throw ArgumentError("frequency must be positive");
  if (f_hz >= 0.5 / h) throw ArgumentError("frequency at or above the Nyquist rate of the internal step");
  if (n_periods < 1) throw ArgumentError("need at least one fit period");
  if (!netlist.find_probe(probe)) throw ArgumentError("no probe named " + probe);

  const auto n_settle = static_cast<std::size_t>(std::ceil(settle_s / h));
  const auto n_fit = static_cast<std::size_t>(std::ceil(n_periods / (f_hz * h)));
  const std::size_t n = n_settle + n_fit;
  const double w = 2.0 * std::numbers::pi * f_hz;

  std::vector<double> drive(n);
  for (std::size_t j = 0; j < n; ++j) drive[j] = std::sin(w * h * static_cast<double>(j + 1));
  std::vector<double> zeros(n, 0.0);
  SourceBlock block;
  bool found = false;
  for (const auto& b : netlist.branches()) {
    if (b.kind != BranchKind::VoltageSource || b.source.empty()) continue;
    const bool driven = b.source == source;
    found = found || driven;
    block[b.source] = driven ? std::span<const double>(drive) : std::span<const double>(zeros);
  }
  if (!found) throw ArgumentError("no waveform source named " + source);

  TransientSolver solver(netlist, config);
  const ProbeBlock pb = solver.advance(block, n, 1, /*discontinuity=*/true);
  const auto& y = pb.at(probe);

  // Least squares for y = a sin(wt) + b cos(wt) + c over the fit window.
  Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
  Eigen::Vector3d aty = Eigen::Vector3d::Zero();
  for (std::size_t j = n_settle; j < n; ++j) {
    const double t = h * static_cast<double>(j + 1);
    const Eigen::Vector3d row(std::sin(w * t), std::cos(w * t), 1.0);
    ata += row * row.transpose();
    aty += row * y[j];
  }
  const Eigen::Vector3d coef = ata.ldlt().solve(aty);
  return {coef[0], coef[1]};
}

}  // namespace kljn
