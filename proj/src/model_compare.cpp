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

#include "kljn/model_compare.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "kljn/error.hpp"
#include "kljn/noise.hpp"
#include "kljn/seed.hpp"
#include "kljn/transient.hpp"

namespace kljn {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Waves: return "waves";
    case Verdict::Similar: return "similar";
    case Verdict::Indistinguishable: return "indistinguishable";
  }
  return "?";
}

Verdict verdict_for(double nrmsd) {
  if (nrmsd < kIndistinguishableBelow) return Verdict::Indistinguishable;
  if (nrmsd < kSimilarBelow) return Verdict::Similar;
  return Verdict::Waves;
}

void ComparisonReport::write_csv(std::ostream& os) const {
  os << "t,U_cha_lump,U_cha_dist\n";
  os.precision(12);
  for (std::size_t k = 0; k < u_lumped.size(); ++k)
    os << static_cast<double>(k) * sample_interval_s << ',' << u_lumped[k] << ',' << u_distributed[k] << '\n';
}

ComparisonReport compare_netlists(const Netlist& candidate, const Netlist& reference, const CableSpec& cable,
                                  double r_a, double r_b, double bandwidth_hz, double duration_s, std::uint64_t seed) {
  if (!(bandwidth_hz > 0.0)) throw DomainError("compare: bandwidth must be positive");
  if (duration_s <= 0.0) duration_s = 200.0 / bandwidth_hz;

  SolverConfig sc;
  sc.internal_step_s = 1.0 / (128.0 * bandwidth_hz);
  const double t_cmp = 4.0 * sc.internal_step_s;
  // Whole number of comparison samples.
  duration_s = std::ceil(duration_s / t_cmp) * t_cmp;

  NoiseSpec spec;
  spec.bandwidth_hz = bandwidth_hz;
  spec.duration_s = duration_s + sc.internal_step_s;  // samples at 0..duration
  spec.sample_interval_s = sc.internal_step_s;
  spec.rms_volts = 1.0;
  spec.seed = derive_seed(seed, {stream::kAliceNoise});
  const Waveform ua = generate(spec);
  spec.rms_volts = 1.0 / rms_ratio(r_a, r_b);
  spec.seed = derive_seed(seed, {stream::kBobNoise});
  const Waveform ub = generate(spec);
  const std::map<std::string, Waveform> sources{{names::kAliceNoise, ua}, {names::kBobNoise, ub}};

  const auto a = transient_solve(candidate, sources, sc, duration_s, t_cmp);
  const auto b = transient_solve(reference, sources, sc, duration_s, t_cmp);
  const auto ul = a.probes.at(names::kUcha).samples();
  const auto ud = b.probes.at(names::kUcha).samples();

  const double c_total = cable.total_capacitance();
  const double settle = c_total > 0.0 ? 5.0 / (2.0 * std::numbers::pi * cutoff_frequency(r_a, r_b, c_total)) : 0.0;
  const auto skip = std::min<std::size_t>(ul.size() - 1, static_cast<std::size_t>(std::ceil(settle / t_cmp)));

  ComparisonReport rep;
  rep.gamma = wavelength_ratio(cable, bandwidth_hz);
  rep.bandwidth_hz = bandwidth_hz;
  rep.sample_interval_s = t_cmp;
  rep.u_lumped.assign(ul.begin() + static_cast<std::ptrdiff_t>(skip), ul.end());
  rep.u_distributed.assign(ud.begin() + static_cast<std::ptrdiff_t>(skip), ud.end());
  double diff2 = 0.0;
  double ref2 = 0.0;
  for (std::size_t k = 0; k < rep.u_lumped.size(); ++k) {
    const double d = rep.u_lumped[k] - rep.u_distributed[k];
    diff2 += d * d;
    ref2 += rep.u_distributed[k] * rep.u_distributed[k];
  }
  if (!(ref2 > 0.0)) throw DomainError("compare: reference waveform is identically zero");
  rep.nrmsd = std::sqrt(diff2 / ref2);
  rep.verdict = verdict_for(rep.nrmsd);
  return rep;
}

ComparisonReport compare_models(const CableSpec& cable, double r_a, double r_b, double bandwidth_hz,
                                double duration_s, std::uint64_t seed) {
  return compare_netlists(build_lumped(r_a, r_b, cable), build_distributed(r_a, r_b, cable), cable, r_a, r_b,
                          bandwidth_hz, duration_s, seed);
}

}  // namespace kljn
