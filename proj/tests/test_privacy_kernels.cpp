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
#include <random>

#include "kljn/error.hpp"
#include "kljn/kernels.hpp"
#include "kljn/noise.hpp"
#include "kljn/privacy.hpp"

using namespace kljn;

namespace {

AttackOutcome outcome_with(const std::vector<int>& q) {
  AttackOutcome o;
  std::mt19937_64 rng(4);
  for (std::size_t k = 0; k < q.size(); ++k) {
    BitAttack b;
    b.bit = k;
    b.truth = (rng() >> 63) ? kLH : kHL;
    b.guess = q[k] ? b.truth : b.truth.mirrored();
    b.q = q[k];
    o.bits.push_back(b);
  }
  o.summary = success_rate(q);
  return o;
}

}  // namespace

TEST(XorHalve, Examples) {
  EXPECT_EQ(xor_halve({{1, 0, 1, 1}, 0}).bits, (std::vector<std::uint8_t>{1, 0}));
  EXPECT_EQ(xor_halve({std::vector<std::uint8_t>(8, 0), 0}).bits, std::vector<std::uint8_t>(4, 0));
  EXPECT_EQ(xor_halve({{1, 1, 0}, 2}).round, 3);
  EXPECT_THROW(xor_halve({{1}, 0}), ArgumentError);
}

TEST(XorHalve, LengthFloorDivision) {
  for (std::size_t n = 4; n <= 41; ++n) {
    Key k{std::vector<std::uint8_t>(n, 1), 0};
    EXPECT_EQ(xor_halve(xor_halve(k)).bits.size(), n / 4);
  }
}

TEST(Predictor, Examples) {
  EXPECT_NEAR(predicted_leak_after_xor(0.769), 0.6447, 1e-4);
  EXPECT_NEAR(predicted_leak_after_xor(0.6447), 0.5418, 1e-4);
  EXPECT_DOUBLE_EQ(predicted_leak_after_xor(0.5), 0.5);
  EXPECT_THROW(predicted_leak_after_xor(1.1), DomainError);
  EXPECT_THROW(predicted_leak_after_xor(-0.1), DomainError);
}

TEST(Predictor, ContractsTowardHalf) {
  for (double p = 0.51; p < 1.0; p += 0.01) {
    double x = p;
    for (int k = 0; k < 20; ++k) {
      const double next = predicted_leak_after_xor(x);
      EXPECT_LE(next, x);
      EXPECT_GE(next, 0.5);
      x = next;
    }
    EXPECT_NEAR(x, 0.5, 1e-3);
  }
}

TEST(Amplification, PerfectEveStaysPerfect) {
  const auto rounds = empirical_amplification(outcome_with(std::vector<int>(64, 1)), 3);
  ASSERT_EQ(rounds.size(), 4u);
  for (const auto& r : rounds) {
    EXPECT_EQ(r.p_e, 1.0);
    EXPECT_EQ(r.n_bits, 64u >> r.round);
  }
}

TEST(Amplification, RequiresEnoughBits) {
  EXPECT_THROW(empirical_amplification(outcome_with({1, 0, 1}), 2), ArgumentError);
}

TEST(Amplification, IndependentErrorsFollowPredictor) {
  std::mt19937_64 rng(12);
  std::bernoulli_distribution hit(0.77);
  std::vector<int> q(20000);
  for (int& v : q) v = hit(rng);
  const auto rounds = empirical_amplification(outcome_with(q), 2);
  for (std::size_t k = 1; k < rounds.size(); ++k)
    EXPECT_NEAR(rounds[k].p_e, rounds[k].predicted, 3.0 * rounds[k].binomial_std);
}

TEST(Kernels, SerialAndParallelMatch) {
  std::vector<NoiseSpec> specs(6);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    specs[k].duration_s = 0.2;
    specs[k].seed = k;
  }
  const auto a = kernels::generate_batch_serial(specs);
  const auto b = kernels::generate_batch_omp(specs);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);

  const auto pa = kernels::welch_psd_serial(a[0].samples(), 256);
  const auto pb = kernels::welch_psd_omp(a[0].samples(), 256);
  EXPECT_EQ(pa, pb);
}

TEST(Kernels, BatchErrorPropagates) {
  std::vector<NoiseSpec> specs(3);
  for (auto& s : specs) s.duration_s = 0.1;
  specs[2].duration_s = 1e-3;  // shorter than one band-edge period
  EXPECT_THROW(kernels::generate_batch_serial(specs), ConfigError);
  EXPECT_THROW(kernels::generate_batch_omp(specs), ConfigError);
}

TEST(Kernels, WelchSineLandsInItsBin) {
  const std::size_t seg = 256;
  std::vector<double> x(seg * 16);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(2.0 * M_PI * 32.0 * static_cast<double>(k) / seg);
  const auto p = kernels::welch_psd_serial(x, seg);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < p.size(); ++k)
    if (p[k] > p[peak]) peak = k;
  EXPECT_EQ(peak, 32u);
  EXPECT_NEAR(kernels::power_fraction_above(p, 1.0, 40.0), 0.0, 1e-6);
}
