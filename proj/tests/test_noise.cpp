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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kljn/error.hpp"
#include "kljn/kernels.hpp"
#include "kljn/noise.hpp"
#include "kljn/stats.hpp"

using namespace kljn;

namespace {

NoiseSpec spec_of(double rms, std::size_t n, double dt, std::uint64_t seed) {
  NoiseSpec s;
  s.rms_volts = rms;
  s.sample_interval_s = dt;
  s.duration_s = static_cast<double>(n) * dt;
  s.seed = seed;
  return s;
}

// Plain O(N^2) DFT power spectrum, independent of both FFT code paths.
std::vector<double> naive_power(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = 2.0 * std::numbers::pi * static_cast<double>(k * j % n) / static_cast<double>(n);
      re += x[j] * std::cos(a);
      im -= x[j] * std::sin(a);
    }
    p[k] = re * re + im * im;
  }
  return p;
}

double autocorr(std::span<const double> x, std::size_t lag) {
  const double m = stats::mean(x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) den += (x[i] - m) * (x[i] - m);
  for (std::size_t i = 0; i + lag < x.size(); ++i) num += (x[i] - m) * (x[i + lag] - m);
  return num / den;
}

}  // namespace

TEST(RmsForResistor, OneKiloOhmIsOneVolt) {
  EXPECT_NEAR(rms_for_resistor(1000.0, 7.246e16, 250.0), 1.000, 1e-3);
}

TEST(RmsForResistor, NineKiloOhmIsThreeVolts) {
  EXPECT_NEAR(rms_for_resistor(9000.0, 7.246e16, 250.0), 3.000, 3e-3);
}

TEST(RmsForResistor, ZeroBandwidthGivesZero) {
  EXPECT_EQ(rms_for_resistor(1000.0, 7.246e16, 0.0), 0.0);
}

TEST(RmsForResistor, BackSolvedTemperature) {
  // T = U^2 / (4 k R B)
  const double t = 1.0 / (4.0 * kBoltzmann * 1000.0 * 250.0);
  EXPECT_NEAR(rms_for_resistor(1000.0, t, 250.0), 1.0, 1e-12);
  EXPECT_THROW(rms_for_resistor(-1.0, t, 250.0), DomainError);
}

TEST(RmsRatio, Examples) {
  EXPECT_NEAR(rms_ratio(1000.0, 9000.0), 1.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(rms_ratio(5.0, 5.0), 1.0);
  EXPECT_DOUBLE_EQ(rms_ratio(4.0, 1.0), 2.0);
  EXPECT_THROW(rms_ratio(0.0, 1.0), DomainError);
  EXPECT_THROW(rms_ratio(1.0, -2.0), DomainError);
}

TEST(Generate, NyquistViolationIsConfigError) {
  auto s = spec_of(1.0, 1000, 1.0 / 400.0, 1);  // Nyquist 200 Hz < 250 Hz
  EXPECT_THROW(generate(s), ConfigError);
}

TEST(Generate, ZeroRmsIsAllZero) {
  const auto w = generate(spec_of(0.0, 4096, 1e-3, 3));
  for (double v : w.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Generate, MillionSamplesSigma) {
  const auto w = generate(spec_of(1.0, 1'000'000, 1e-3, 11));
  const double s = stats::stddev(w.samples());
  EXPECT_GT(s, 0.98);
  EXPECT_LT(s, 1.02);
}

TEST(Generate, Deterministic) {
  const auto s = spec_of(1.0, 8192, 1e-3 / 32, 42);
  EXPECT_EQ(generate(s), generate(s));
  auto t = s;
  t.seed = 43;
  EXPECT_NE(generate(s), generate(t));
}

TEST(Generate, ScalesWithRms) {
  const auto a = generate(spec_of(1.0, 4096, 1e-3, 5));
  const auto b = generate(spec_of(2.0, 4096, 1e-3, 5));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i], 2.0 * a[i], 1e-12);
}

TEST(Generate, FinerGridSamplesSameSignal) {
  const double dt = 1e-3;
  const auto coarse = generate(spec_of(1.0, 2000, dt, 9));
  const auto fine = generate(spec_of(1.0, 4000, dt / 2, 9));
  for (std::size_t i = 0; i < coarse.size(); ++i) EXPECT_NEAR(fine[2 * i], coarse[i], 1e-12);
}

TEST(Generate, SpectrumConfinedToBand) {
  // Nyquist at 4 B so there is room above the band edge.
  const std::size_t n = 4096;
  const double dt = 1.0 / (8.0 * 250.0);
  const auto w = generate(spec_of(1.0, n, dt, 21));
  const auto p = naive_power(w.samples());
  const double df = 1.0 / (static_cast<double>(n) * dt);
  double total = 0.0, above = 0.0;
  for (std::size_t k = 1; k < p.size(); ++k) {
    total += p[k];
    if (k * df > 250.0) above += p[k];
  }
  EXPECT_LT(above / total, 1e-12);
}

TEST(Generate, PeriodogramAboveBandEdge) {
  const std::size_t n = 1 << 18;
  const double dt = 1.0 / (8.0 * 250.0);
  const auto w = generate(spec_of(1.0, n, dt, 22));
  const std::size_t seg = 4096;
  const auto psd = kernels::welch_psd_serial(w.samples(), seg);
  const double bin = 1.0 / (static_cast<double>(seg) * dt);
  EXPECT_LT(kernels::power_fraction_above(psd, bin, 1.2 * 250.0), 1e-3);
}

TEST(Generate, Autocorrelation) {
  const std::size_t n = 200'000;
  const double dt = 1e-3 / 8;  // lag 1/(4B) = 8 samples
  const auto w = generate(spec_of(1.0, n, dt, 31));
  // Brick-wall band: r(tau) = sinc(2 B tau), 2/pi at tau = 1/(4B).
  EXPECT_NEAR(autocorr(w.samples(), 8), 2.0 / std::numbers::pi, 0.02);
  EXPECT_LT(std::abs(autocorr(w.samples(), 8 * 400 + 3)), 5.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Gaussianity, StandardNormalQuantiles) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  std::vector<double> x(1'000'000);
  for (double& v : x) v = nd(rng);
  const auto rep = gaussianity_report(Waveform(x, 1.0), 50);
  EXPECT_LT(rep.max_quantile_deviation, 0.05);
  EXPECT_EQ(rep.quantiles.size(), 99u);
  EXPECT_GT(rep.chi2_pvalue, 0.001);
}

TEST(Gaussianity, ConstantInputSingleBin) {
  const auto rep = gaussianity_report(Waveform(std::vector<double>(100, 3.5), 1.0), 10);
  int occupied = 0;
  for (auto c : rep.counts) occupied += c > 0;
  EXPECT_EQ(occupied, 1);
}

TEST(Gaussianity, TooFewBins) {
  EXPECT_THROW(gaussianity_report(Waveform({1.0, 2.0}, 1.0), 1), ArgumentError);
}

TEST(Gaussianity, GeneratedNoisePassesChiSquare) {
  const auto w = generate(spec_of(1.0, 1'000'000, 1e-3, 2016));
  const auto rep = gaussianity_report(w, 50);
  EXPECT_GT(rep.chi2_pvalue, 0.01);
}

TEST(Gaussianity, UniformFailsChiSquare) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<double> x(100'000);
  for (double& v : x) v = ud(rng);
  EXPECT_LT(gaussianity_report(Waveform(x, 1.0), 50).chi2_pvalue, 1e-6);
}
