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

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kljn/error.hpp"

namespace kljn {

/// Uniformly sampled real series. Immutable once built; the constructor
/// rejects empty or non-finite data.
class Waveform {
 public:
  Waveform(std::vector<double> samples, double sample_interval_s, double start_time_s = 0.0)
      : samples_(std::move(samples)), dt_(sample_interval_s), t0_(start_time_s) {
    if (samples_.empty()) throw ArgumentError("waveform must hold at least one sample");
    if (!(dt_ > 0.0)) throw ArgumentError("waveform sample interval must be positive");
    for (double v : samples_)
      if (!std::isfinite(v)) throw ArgumentError("waveform contains a non-finite sample");
  }

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  double sample_interval() const noexcept { return dt_; }
  double start_time() const noexcept { return t0_; }
  double time_at(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }

  Waveform scaled(double factor) const {
    std::vector<double> out(samples_);
    for (double& v : out) v *= factor;
    return Waveform(std::move(out), dt_, t0_);
  }

  bool operator==(const Waveform&) const = default;

 private:
  std::vector<double> samples_;
  double dt_;
  double t0_;
};

}  // namespace kljn
