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
#include <utility>
#include <vector>

#include "kljn/waveform.hpp"

namespace kljn {

/// Boltzmann constant, CODATA 2018 exact value [J/K].
inline constexpr double kBoltzmann = 1.380649e-23;

/// RMS Johnson noise voltage of resistor `r_ohm` at `t_eff_kelvin` over
/// `bandwidth_hz`: sqrt(4 k T R B).
double rms_for_resistor(double r_ohm, double t_eff_kelvin, double bandwidth_hz);

/// sigma_L / sigma_H = sqrt(R_L / R_H). Throws DomainError on non-positive input.
double rms_ratio(double r_low, double r_high);

struct NoiseSpec {
  double bandwidth_hz = 250.0;
  double rms_volts = 1.0;
  double duration_s = 1.0;
  double sample_interval_s = 1e-3 / 32.0;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant (including Nyquist) is violated.
  void validate() const;
  /// Number of output samples: round(duration / sample_interval), at least 1.
  std::size_t sample_count() const;
};

/// Band-limited Gaussian white noise by spectral synthesis.
///
/// The record of length T = n*dt is treated as one period. Every Fourier bin
/// k/T with 0 < k/T <= B gets an independent complex Gaussian coefficient and
/// all other bins are zero, so the band edge is exact. Coefficients are drawn
/// in bin order from `seed`, hence two specs that differ only in
/// `sample_interval_s` yield the same continuous-time signal sampled on two
/// grids. The expected variance is rms_volts^2.
Waveform generate(const NoiseSpec& spec);

struct GaussianityReport {
  std::vector<double> bin_centers;
  std::vector<std::size_t> counts;
  /// (theoretical standard-normal quantile, empirical standardized quantile).
  std::vector<std::pair<double, double>> quantiles;
  double mean = 0.0;
  double stddev = 0.0;
  /// Largest |theoretical - empirical| over the quantile pairs.
  double max_quantile_deviation = 0.0;
  /// Chi-square goodness of fit of the histogram against N(mean, stddev^2);
  /// bins with expected count < 5 are pooled into their neighbours.
  double chi2 = 0.0;
  int chi2_dof = 0;
  double chi2_pvalue = 1.0;

  /// Two CSV blocks: `bin_center,count` then `theoretical_q,empirical_q`.
  void write_csv(std::ostream& os) const;
};

/// Histogram over [min, max] with `n_bins` bins plus 99 percentile pairs for
/// a normal probability plot. Throws ArgumentError when n_bins < 2.
GaussianityReport gaussianity_report(const Waveform& w, int n_bins);

}  // namespace kljn
