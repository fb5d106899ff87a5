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
#include <vector>

#include "kljn/attack.hpp"

namespace kljn {

struct Key {
  std::vector<std::uint8_t> bits;
  int round = 0;  // 0 = as generated, k = after k XOR halvings

  bool operator==(const Key&) const = default;
};

/// bit j of the result is bits[2j] ^ bits[2j+1]; a trailing odd bit is
/// dropped. Throws ArgumentError for keys shorter than 2 bits.
Key xor_halve(const Key& key);

/// Eve's per-bit success after one XOR round when her guesses of the two
/// input bits are independent: p^2 + (1-p)^2. Throws DomainError outside [0,1].
double predicted_leak_after_xor(double p);

struct AmplificationRound {
  int round = 0;
  std::size_t n_bits = 0;
  double p_e = 0.0;
  double binomial_std = 0.0;
  /// predicted_leak_after_xor applied to the previous round's measured p_e
  /// (round 0 repeats its own p_e).
  double predicted = 0.0;
};

/// Key bits as Alice's choices (L -> 0, H -> 1) from the attacked exchanges.
Key true_key(const AttackOutcome& outcome);
/// Eve's guess of Alice's choice per attacked exchange.
Key eve_key(const AttackOutcome& outcome);

/// Rounds 0..`rounds`: both keys are XOR-halved each round and Eve's bitwise
/// agreement is measured. Throws ArgumentError if the key runs out of bits.
std::vector<AmplificationRound> empirical_amplification(const AttackOutcome& outcome, int rounds);

}  // namespace kljn
