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
#include <span>
#include <vector>

#include "kljn/protocol.hpp"
#include "kljn/waveform.hpp"

namespace kljn {

/// Central difference (w[k+1] - w[k-1]) / (2 dt) inside, one-sided at both
/// ends, same grid. Throws ArgumentError below 3 samples.
Waveform time_derivative(const Waveform& w);
void time_derivative(std::span<const double> w, double dt, std::span<double> out);

/// Finite-time average <i(t) * du_dt(t)> over the common window.
double cross_correlation(const Waveform& i_w, const Waveform& du_dt);
double cross_correlation(std::span<const double> i_w, std::span<const double> du_dt);

/// Sign of rho that points at "Alice holds the lower resistor". Both probe
/// currents point into the cable, so the end with the smaller resistor sees
/// the larger capacitive share and rho_a - rho_b > 0 under LH.
inline constexpr double kLowAtAliceSign = +1.0;

/// rho > 0 guesses LH, rho < 0 guesses HL, rho == 0 is a fair coin drawn
/// from `tie_seed`.
Arrangement eve_decide(double rho, std::uint64_t tie_seed);

struct SuccessRate {
  double p_e = 0.0;
  double epsilon = 0.0;
  double binomial_std = 0.0;
  std::size_t n_bits = 0;
};

/// p_E = mean(q), epsilon = p_E - 0.5, binomial_std = sqrt(p(1-p)/N).
SuccessRate success_rate(std::span<const int> q);

struct BitAttack {
  std::size_t bit = 0;
  double rho_a = 0.0;
  double rho_b = 0.0;
  double rho = 0.0;
  Arrangement truth;
  Arrangement guess;
  int q = 0;
};

struct AttackOutcome {
  std::vector<BitAttack> bits;  // secure exchanges only
  SuccessRate summary;

  /// `bit,rho_a,rho_b,rho,guess,q`
  void write_csv(std::ostream& os) const;
};

enum class Execution { Serial, Parallel };

/// Eve's cable-capacitance attack over recorded BEPs. Discarded (LL/HH)
/// exchanges are skipped. Ties draw their coin from derive_seed(tie_seed, bit).
AttackOutcome run_attack(std::span<const BepMeasurement> beps, std::uint64_t tie_seed,
                         Execution execution = Execution::Parallel);

}  // namespace kljn
