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

#include "kljn/privacy.hpp"

#include <cmath>

#include "kljn/error.hpp"

namespace kljn {

Key xor_halve(const Key& key) {
  if (key.bits.size() < 2) throw ArgumentError("xor_halve needs at least 2 bits");
  for (auto b : key.bits)
    if (b > 1) throw ArgumentError("key bits must be 0 or 1");
  Key out;
  out.round = key.round + 1;
  out.bits.resize(key.bits.size() / 2);
  for (std::size_t j = 0; j < out.bits.size(); ++j) out.bits[j] = key.bits[2 * j] ^ key.bits[2 * j + 1];
  return out;
}

double predicted_leak_after_xor(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("predicted_leak_after_xor: p must lie in [0, 1]");
  return p * p + (1.0 - p) * (1.0 - p);
}

Key true_key(const AttackOutcome& outcome) {
  Key k;
  for (const auto& b : outcome.bits) k.bits.push_back(static_cast<std::uint8_t>(b.truth.alice));
  return k;
}

Key eve_key(const AttackOutcome& outcome) {
  Key k;
  for (const auto& b : outcome.bits) k.bits.push_back(static_cast<std::uint8_t>(b.guess.alice));
  return k;
}

std::vector<AmplificationRound> empirical_amplification(const AttackOutcome& outcome, int rounds) {
  if (rounds < 0) throw ArgumentError("amplification rounds must be >= 0");
  Key truth = true_key(outcome);
  Key guess = eve_key(outcome);
  if ((truth.bits.size() >> rounds) == 0)
    throw ArgumentError("key of " + std::to_string(truth.bits.size()) + " bits is too short for " +
                        std::to_string(rounds) + " XOR rounds");

  std::vector<AmplificationRound> out;
  double previous = 0.0;
  for (int r = 0; r <= rounds; ++r) {
    if (r > 0) {
      truth = xor_halve(truth);
      guess = xor_halve(guess);
    }
    std::size_t hits = 0;
    for (std::size_t j = 0; j < truth.bits.size(); ++j) hits += truth.bits[j] == guess.bits[j];
    AmplificationRound a;
    a.round = r;
    a.n_bits = truth.bits.size();
    a.p_e = static_cast<double>(hits) / static_cast<double>(a.n_bits);
    a.binomial_std = std::sqrt(a.p_e * (1.0 - a.p_e) / static_cast<double>(a.n_bits));
    a.predicted = r == 0 ? a.p_e : predicted_leak_after_xor(previous);
    previous = a.p_e;
    out.push_back(a);
  }
  return out;
}

}  // namespace kljn
