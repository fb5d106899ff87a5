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

// Data-parallel kernels. Each has a serial reference kept for testing and an
// OpenMP version; both must produce bit-identical output.

#include <cstddef>
#include <span>
#include <vector>

#include "kljn/noise.hpp"
#include "kljn/protocol.hpp"

namespace kljn::kernels {

struct RhoPair {
  double rho_a = 0.0;
  double rho_b = 0.0;
};

/// rho_a = <I_cha dU_cha/dt>, rho_b = <I_chb dU_chb/dt> for every BEP.
std::vector<RhoPair> correlate_serial(std::span<const BepMeasurement> beps);
std::vector<RhoPair> correlate_omp(std::span<const BepMeasurement> beps);

std::vector<Waveform> generate_batch_serial(std::span<const NoiseSpec> specs);
std::vector<Waveform> generate_batch_omp(std::span<const NoiseSpec> specs);

/// Welch power spectral density: Hann-windowed, non-overlapping segments of
/// `segment` samples (a power of two), averaged. Returns segment/2 + 1 bins
/// spaced 1 / (segment dt). Uses its own radix-2 FFT.
std::vector<double> welch_psd_serial(std::span<const double> x, std::size_t segment);
std::vector<double> welch_psd_omp(std::span<const double> x, std::size_t segment);

/// Fraction of PSD power in bins above `cutoff_hz` (DC bin excluded).
double power_fraction_above(std::span<const double> psd, double bin_hz, double cutoff_hz);

}  // namespace kljn::kernels
