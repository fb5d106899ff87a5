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

#include "kljn/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>

#include "kljn/error.hpp"
#include "kljn/stats.hpp"

namespace kljn {

namespace {
// FFTW's planner is not reentrant; execution with private arrays is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Inverse real DFT, y_j = sum_k Y_k exp(+2 pi i j k / n) over the full
// Hermitian spectrum. `half` has n/2 + 1 entries and is consumed.
std::vector<double> inverse_real_dft(std::vector<std::complex<double>>& half, std::size_t n) {
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(half.data()),
                                out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}
}  // namespace

double rms_for_resistor(double r_ohm, double t_eff_kelvin, double bandwidth_hz) {
  if (r_ohm < 0.0 || t_eff_kelvin < 0.0 || bandwidth_hz < 0.0)
    throw DomainError("rms_for_resistor: arguments must be non-negative");
  return std::sqrt(4.0 * kBoltzmann * t_eff_kelvin * r_ohm * bandwidth_hz);
}

double rms_ratio(double r_low, double r_high) {
  if (!(r_low > 0.0) || !(r_high > 0.0)) throw DomainError("rms_ratio: resistances must be positive");
  return std::sqrt(r_low / r_high);
}

void NoiseSpec::validate() const {
  if (!(bandwidth_hz > 0.0)) throw ConfigError("noise bandwidth must be positive");
  if (!(rms_volts >= 0.0)) throw ConfigError("noise rms must be non-negative");
  if (!(sample_interval_s > 0.0)) throw ConfigError("noise sample interval must be positive");
  if (!(duration_s > 0.0)) throw ConfigError("noise duration must be positive");
  if (!(bandwidth_hz < 0.5 / sample_interval_s))
    throw ConfigError("noise bandwidth violates Nyquist for the sample interval");
}

std::size_t NoiseSpec::sample_count() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(duration_s / sample_interval_s)));
}

Waveform generate(const NoiseSpec& spec) {
  spec.validate();
  const std::size_t n = spec.sample_count();
  const double period = static_cast<double>(n) * spec.sample_interval_s;
  // Bins k with k/T in (0, B]; the relative slack admits a bin sitting exactly on B.
  const auto top_bin = static_cast<std::size_t>(std::floor(spec.bandwidth_hz * period * (1.0 + 1e-12)));
  if (top_bin == 0) throw ConfigError("noise record shorter than one period of the band edge");
  if (spec.rms_volts == 0.0) return Waveform(std::vector<double>(n, 0.0), spec.sample_interval_s);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double half_scale = 0.5 * spec.rms_volts / std::sqrt(static_cast<double>(top_bin));

  std::vector<std::complex<double>> half(n / 2 + 1);
  for (std::size_t k = 1; k <= top_bin; ++k) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    half[k] = {half_scale * re, half_scale * im};
  }
  return Waveform(inverse_real_dft(half, n), spec.sample_interval_s);
}

void GaussianityReport::write_csv(std::ostream& os) const {
  os << "bin_center,count\n";
  for (std::size_t i = 0; i < bin_centers.size(); ++i) os << bin_centers[i] << ',' << counts[i] << '\n';
  os << "\ntheoretical_q,empirical_q\n";
  for (const auto& [t, e] : quantiles) os << t << ',' << e << '\n';
}

GaussianityReport gaussianity_report(const Waveform& w, int n_bins) {
  if (n_bins < 2) throw ArgumentError("gaussianity_report needs at least 2 bins");
  const auto x = w.samples();
  const std::size_t n = x.size();

  GaussianityReport rep;
  rep.mean = stats::mean(x);
  rep.stddev = n > 1 ? stats::stddev(x) : 0.0;

  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  double lo = *lo_it;
  double hi = *hi_it;
  if (hi == lo) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double width = (hi - lo) / n_bins;
  rep.bin_centers.resize(n_bins);
  rep.counts.assign(n_bins, 0);
  for (int b = 0; b < n_bins; ++b) rep.bin_centers[b] = lo + (b + 0.5) * width;
  for (double v : x) {
    auto b = static_cast<int>((v - lo) / width);
    rep.counts[std::clamp(b, 0, n_bins - 1)]++;
  }

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double scale = rep.stddev > 0.0 ? rep.stddev : 1.0;
  for (int pct = 1; pct <= 99; ++pct) {
    const double p = pct / 100.0;
    // Linear interpolation between order statistics (Hyndman-Fan type 7).
    const double pos = p * static_cast<double>(n - 1);
    const auto i0 = static_cast<std::size_t>(pos);
    const std::size_t i1 = std::min(i0 + 1, n - 1);
    const double q = sorted[i0] + (pos - static_cast<double>(i0)) * (sorted[i1] - sorted[i0]);
    const double theo = stats::normal_quantile(p);
    const double emp = (q - rep.mean) / scale;
    rep.quantiles.emplace_back(theo, emp);
    rep.max_quantile_deviation = std::max(rep.max_quantile_deviation, std::abs(theo - emp));
  }

  if (rep.stddev <= 0.0) {
    rep.chi2 = std::numeric_limits<double>::infinity();
    rep.chi2_pvalue = 0.0;
    return rep;
  }

  // Pool adjacent bins until each group expects >= 5 counts; the open-ended
  // outer edges cover the tails beyond min/max.
  const double nn = static_cast<double>(n);
  auto cdf_at_edge = [&](int edge) {
    if (edge <= 0) return 0.0;
    if (edge >= n_bins) return 1.0;
    return stats::normal_cdf((lo + edge * width - rep.mean) / rep.stddev);
  };
  std::vector<std::pair<double, double>> groups;  // (observed, expected)
  double obs = 0.0;
  double expct = 0.0;
  for (int b = 0; b < n_bins; ++b) {
    obs += static_cast<double>(rep.counts[b]);
    expct += nn * (cdf_at_edge(b + 1) - cdf_at_edge(b));
    if (expct >= 5.0) {
      groups.emplace_back(obs, expct);
      obs = expct = 0.0;
    }
  }
  if (expct > 0.0 || obs > 0.0) {
    if (groups.empty()) {
      groups.emplace_back(obs, expct);
    } else {
      groups.back().first += obs;
      groups.back().second += expct;
    }
  }
  for (const auto& [o, e] : groups) rep.chi2 += (o - e) * (o - e) / e;
  rep.chi2_dof = static_cast<int>(groups.size()) - 3;
  rep.chi2_pvalue = rep.chi2_dof > 0 ? stats::chi2_sf(rep.chi2, rep.chi2_dof) : 0.0;
  return rep;
}

}  // namespace kljn
