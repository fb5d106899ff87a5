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
#include <initializer_list>

namespace kljn {

/// SplitMix64 finalizer; a bijective mixer on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based seed derivation: the child seed depends only on the parent
/// and the ordered counter path, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t parent,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t s = mix64(parent);
  for (std::uint64_t c : path) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream tags for derive_seed paths.
namespace stream {
inline constexpr std::uint64_t kAliceNoise = 1;
inline constexpr std::uint64_t kBobNoise = 2;
inline constexpr std::uint64_t kArrangement = 3;
inline constexpr std::uint64_t kWarmup = 4;
inline constexpr std::uint64_t kTieBreak = 5;
inline constexpr std::uint64_t kScenario = 6;
}  // namespace stream

}  // namespace kljn
