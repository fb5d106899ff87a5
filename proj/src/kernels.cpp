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

#include "kljn/kernels.hpp"

#include <cmath>
#include <complex>
#include <exception>
#include <numbers>

#include "kljn/attack.hpp"
#include "kljn/error.hpp"

namespace kljn::kernels {

namespace {

RhoPair correlate_one(const BepMeasurement& m, std::vector<double>& scratch) {
  const std::size_t n = m.u_cha.size();
  if (m.i_cha.size() != n || m.u_chb.size() != n || m.i_chb.size() != n)
    throw ArgumentError("BEP probe records differ in length");
  scratch.resize(n);
  RhoPair r;
  time_derivative(m.u_cha, m.t_s, scratch);
  r.rho_a = cross_correlation(m.i_cha, scratch);
  time_derivative(m.u_chb, m.t_s, scratch);
  r.rho_b = cross_correlation(m.i_chb, scratch);
  return r;
}

void fft_in_place(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<double> segment_power(std::span<const double> seg) {
  const std::size_t n = seg.size();
  std::vector<std::complex<double>> buf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    buf[i] = seg[i] * w;
  }
  fft_in_place(buf);
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) p[k] = std::norm(buf[k]);
  return p;
}

void check_segment(std::size_t n, std::size_t segment) {
  if (segment < 2 || (segment & (segment - 1)) != 0) throw ArgumentError("Welch segment must be a power of two");
  if (n < segment) throw ArgumentError("series shorter than one Welch segment");
}

}  // namespace

std::vector<RhoPair> correlate_serial(std::span<const BepMeasurement> beps) {
  std::vector<RhoPair> out(beps.size());
  std::vector<double> scratch;
  for (std::size_t i = 0; i < beps.size(); ++i) out[i] = correlate_one(beps[i], scratch);
  return out;
}

std::vector<RhoPair> correlate_omp(std::span<const BepMeasurement> beps) {
  // Exceptions must not escape an OpenMP region; validate up front.
  for (const auto& m : beps) {
    const std::size_t n = m.u_cha.size();
    if (n < 3 || m.i_cha.size() != n || m.u_chb.size() != n || m.i_chb.size() != n)
      throw ArgumentError("BEP probe records differ in length or are shorter than 3 samples");
  }
  std::vector<RhoPair> out(beps.size());
  const auto n = static_cast<std::ptrdiff_t>(beps.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = correlate_one(beps[i], scratch);
  }
  return out;
}

std::vector<Waveform> generate_batch_serial(std::span<const NoiseSpec> specs) {
  std::vector<Waveform> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(generate(s));
  return out;
}

std::vector<Waveform> generate_batch_omp(std::span<const NoiseSpec> specs) {
  std::vector<std::vector<double>> samples(specs.size());
  std::vector<double> dts(specs.size());
  std::vector<std::exception_ptr> errors(specs.size());
  const auto n = static_cast<std::ptrdiff_t>(specs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const Waveform w = generate(specs[i]);
      samples[i].assign(w.samples().begin(), w.samples().end());
      dts[i] = w.sample_interval();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  // Rethrow the first failure in spec order, as the serial path would.
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<Waveform> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) out.emplace_back(std::move(samples[i]), dts[i]);
  return out;
}

std::vector<double> welch_psd_serial(std::span<const double> x, std::size_t segment) {
  check_segment(x.size(), segment);
  const std::size_t n_seg = x.size() / segment;
  std::vector<double> acc(segment / 2 + 1, 0.0);
  for (std::size_t s = 0; s < n_seg; ++s) {
    const auto p = segment_power(x.subspan(s * segment, segment));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
  }
  for (double& v : acc) v /= static_cast<double>(n_seg);
  return acc;
}

std::vector<double> welch_psd_omp(std::span<const double> x, std::size_t segment) {
  check_segment(x.size(), segment);
  const std::size_t n_seg = x.size() / segment;
  // Per-segment spectra are kept and summed in segment order so the result
  // matches the serial reference bit for bit.
  std::vector<std::vector<double>> parts(n_seg);
  const auto ns = static_cast<std::ptrdiff_t>(n_seg);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t s = 0; s < ns; ++s) parts[s] = segment_power(x.subspan(s * segment, segment));
  std::vector<double> acc(segment / 2 + 1, 0.0);
  for (const auto& p : parts)
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += p[k];
  for (double& v : acc) v /= static_cast<double>(n_seg);
  return acc;
}

double power_fraction_above(std::span<const double> psd, double bin_hz, double cutoff_hz) {
  double total = 0.0;
  double above = 0.0;
  for (std::size_t k = 1; k < psd.size(); ++k) {
    total += psd[k];
    if (static_cast<double>(k) * bin_hz > cutoff_hz) above += psd[k];
  }
  return total > 0.0 ? above / total : 0.0;
}

}  // namespace kljn::kernels
