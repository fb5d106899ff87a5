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

#include "kljn/attack.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "kljn/error.hpp"
#include "kljn/kernels.hpp"
#include "kljn/seed.hpp"

namespace kljn {

void time_derivative(std::span<const double> w, double dt, std::span<double> out) {
  const std::size_t n = w.size();
  if (n < 3) throw ArgumentError("time_derivative needs at least 3 samples");
  if (out.size() != n) throw ArgumentError("time_derivative output length mismatch");
  out[0] = (w[1] - w[0]) / dt;
  for (std::size_t k = 1; k + 1 < n; ++k) out[k] = (w[k + 1] - w[k - 1]) / (2.0 * dt);
  out[n - 1] = (w[n - 1] - w[n - 2]) / dt;
}

Waveform time_derivative(const Waveform& w) {
  std::vector<double> out(w.size());
  time_derivative(w.samples(), w.sample_interval(), out);
  return Waveform(std::move(out), w.sample_interval(), w.start_time());
}

double cross_correlation(std::span<const double> i_w, std::span<const double> du_dt) {
  if (i_w.size() != du_dt.size()) throw ArgumentError("cross_correlation: length mismatch");
  if (i_w.empty()) throw ArgumentError("cross_correlation: empty window");
  double s = 0.0;
  for (std::size_t k = 0; k < i_w.size(); ++k) s += i_w[k] * du_dt[k];
  return s / static_cast<double>(i_w.size());
}

double cross_correlation(const Waveform& i_w, const Waveform& du_dt) {
  if (i_w.sample_interval() != du_dt.sample_interval() || i_w.start_time() != du_dt.start_time())
    throw ArgumentError("cross_correlation: waveforms are on different grids");
  return cross_correlation(i_w.samples(), du_dt.samples());
}

Arrangement eve_decide(double rho, std::uint64_t tie_seed) {
  const double s = rho * kLowAtAliceSign;
  if (s > 0.0) return kLH;
  if (s < 0.0) return kHL;
  std::mt19937_64 rng(tie_seed);
  return (rng() >> 63) ? kLH : kHL;
}

SuccessRate success_rate(std::span<const int> q) {
  if (q.empty()) throw ArgumentError("success_rate of an empty list");
  std::size_t hits = 0;
  for (int v : q) {
    if (v != 0 && v != 1) throw ArgumentError("success_rate: q values must be 0 or 1");
    hits += static_cast<std::size_t>(v);
  }
  SuccessRate r;
  r.n_bits = q.size();
  r.p_e = static_cast<double>(hits) / static_cast<double>(q.size());
  r.epsilon = r.p_e - 0.5;
  r.binomial_std = std::sqrt(r.p_e * (1.0 - r.p_e) / static_cast<double>(q.size()));
  return r;
}

void AttackOutcome::write_csv(std::ostream& os) const {
  os << "bit,rho_a,rho_b,rho,guess,q\n";
  os.precision(17);
  for (const auto& b : bits)
    os << b.bit << ',' << b.rho_a << ',' << b.rho_b << ',' << b.rho << ',' << to_string(b.guess) << ',' << b.q << '\n';
}

AttackOutcome run_attack(std::span<const BepMeasurement> beps, std::uint64_t tie_seed, Execution execution) {
  const auto rhos = execution == Execution::Parallel ? kernels::correlate_omp(beps) : kernels::correlate_serial(beps);
  AttackOutcome out;
  std::vector<int> q;
  for (std::size_t i = 0; i < beps.size(); ++i) {
    const auto& m = beps[i];
    if (classify_exchange(m.arrangement.alice, m.arrangement.bob) == ExchangeClass::Discard) continue;
    BitAttack b;
    b.bit = m.bit_index;
    b.rho_a = rhos[i].rho_a;
    b.rho_b = rhos[i].rho_b;
    b.rho = b.rho_a - b.rho_b;
    b.truth = m.arrangement;
    b.guess = eve_decide(b.rho, derive_seed(tie_seed, {stream::kTieBreak, m.bit_index}));
    b.q = b.guess == b.truth ? 1 : 0;
    q.push_back(b.q);
    out.bits.push_back(b);
  }
  if (q.empty()) throw ArgumentError("run_attack: no secure exchanges to attack");
  out.summary = success_rate(q);
  return out;
}

}  // namespace kljn
