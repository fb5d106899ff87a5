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
#include <string>
#include <vector>

#include "kljn/cable.hpp"

namespace kljn {

enum class Verdict { Waves, Similar, Indistinguishable };

const char* to_string(Verdict v);

/// nrmsd < 0.01 -> indistinguishable, < 0.1 -> similar, otherwise waves.
inline constexpr double kIndistinguishableBelow = 0.01;
inline constexpr double kSimilarBelow = 0.1;

Verdict verdict_for(double nrmsd);

struct ComparisonReport {
  double gamma = 0.0;
  double bandwidth_hz = 0.0;
  double nrmsd = 0.0;
  Verdict verdict = Verdict::Waves;
  double sample_interval_s = 0.0;
  // Alice-end voltage of each model on the compared window.
  std::vector<double> u_lumped;
  std::vector<double> u_distributed;

  /// `t,U_cha_lump,U_cha_dist`
  void write_csv(std::ostream& os) const;
};

/// Runs the lumped T model and the distributed ladder with identical source
/// waveforms (Alice 1 V rms, Bob scaled by sqrt(r_b / r_a)) and compares the
/// Alice-end voltage: nrmsd = rms(U_lump - U_dist) / rms(U_dist). The solver
/// step is 1 / (128 B) and samples are compared every 1 / (32 B) after a
/// warm-up of 5 cable time constants. `duration_s` <= 0 selects 200 / B.
ComparisonReport compare_models(const CableSpec& cable, double r_a, double r_b, double bandwidth_hz,
                                double duration_s, std::uint64_t seed);

/// Same comparison, but between two arbitrary netlists (used by the
/// segment-refinement check: ladder at n vs 2n segments).
ComparisonReport compare_netlists(const Netlist& candidate, const Netlist& reference, const CableSpec& cable,
                                  double r_a, double r_b, double bandwidth_hz, double duration_s, std::uint64_t seed);

}  // namespace kljn
