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

#include "kljn/attack.hpp"
#include "kljn/cable.hpp"
#include "kljn/error.hpp"
#include "kljn/seed.hpp"

using namespace kljn;

namespace {

Waveform sampled(double dt, std::size_t n, auto f) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = f(static_cast<double>(k) * dt);
  return Waveform(std::move(x), dt);
}

std::vector<BepMeasurement> record(const Netlist& net, Arrangement arr, bool mirror_seeds, int n_bits) {
  ProtocolConfig c;
  c.bep_units = 50;
  TransientSolver s(net, SolverConfig{});
  std::vector<BepMeasurement> out;
  for (int k = 0; k < n_bits; ++k) {
    BepSeeds seeds{derive_seed(99, {1, static_cast<std::uint64_t>(k)}), derive_seed(99, {2, static_cast<std::uint64_t>(k)})};
    out.push_back(run_bep(s, c, k, arr, mirror_seeds ? seeds.mirrored() : seeds));
  }
  return out;
}

}  // namespace

TEST(Derivative, RampIsConstant) {
  const auto d = time_derivative(sampled(1e-3, 50, [](double t) { return 3.0 * t - 1.0; }));
  for (double v : d.samples()) EXPECT_NEAR(v, 3.0, 1e-9);
}

TEST(Derivative, ConstantIsZero) {
  const auto d = time_derivative(Waveform(std::vector<double>(10, 4.2), 1e-3));
  for (double v : d.samples()) EXPECT_EQ(v, 0.0);
}

TEST(Derivative, SineSmallStep) {
  const double f = 10.0, dt = 1e-3;  // f dt = 0.01
  const double w = 2.0 * std::numbers::pi * f;
  const auto d = time_derivative(sampled(dt, 400, [&](double t) { return std::sin(w * t); }));
  for (std::size_t k = 1; k + 1 < d.size(); ++k)
    EXPECT_NEAR(d[k], w * std::cos(w * static_cast<double>(k) * dt), 1e-3 * w);
}

TEST(Derivative, TooShort) {
  EXPECT_THROW(time_derivative(Waveform({1.0, 2.0}, 1.0)), ArgumentError);
}

TEST(CrossCorrelation, OrthogonalSinusoids) {
  const double dt = 1e-3, f = 10.0, w = 2.0 * std::numbers::pi * f;
  const auto a = sampled(dt, 1000, [&](double t) { return std::sin(w * t); });
  const auto b = sampled(dt, 1000, [&](double t) { return std::sin(w * t + std::numbers::pi / 2); });
  EXPECT_NEAR(cross_correlation(a, b), 0.0, 1e-12);
}

TEST(CrossCorrelation, CapacitorOracle) {
  const double c = 100e-9, amp = 2.0, f = 10.0, w = 2.0 * std::numbers::pi * f, dt = 1e-3;
  const auto u = sampled(dt, 1000, [&](double t) { return amp * std::sin(w * t); });
  const auto i = sampled(dt, 1000, [&](double t) { return c * amp * w * std::cos(w * t); });
  const double expected = c * amp * amp * w * w / 2.0;
  EXPECT_NEAR(cross_correlation(i, time_derivative(u)), expected, 2e-3 * expected);
}

TEST(CrossCorrelation, LengthMismatch) {
  EXPECT_THROW(cross_correlation(Waveform({1.0, 2.0, 3.0}, 1.0), Waveform({1.0, 2.0}, 1.0)), ArgumentError);
}

TEST(CrossCorrelation, IdealCableEndsAntisymmetric) {
  CableSpec ideal = CableSpec::rg58(1000.0);
  ideal.r_per_m = ideal.l_per_m = ideal.c_per_m = 0.0;
  const auto beps = record(build_distributed(1e3, 9e3, ideal), kLH, false, 4);
  for (const auto& m : beps) {
    const double dt = m.t_s;
    std::vector<double> da(m.u_cha.size()), db(m.u_chb.size());
    time_derivative(m.u_cha, dt, da);
    time_derivative(m.u_chb, dt, db);
    const double ra = cross_correlation(m.i_cha, da);
    const double rb = cross_correlation(m.i_chb, db);
    EXPECT_NEAR(ra, -rb, 1e-12 * std::abs(ra) + 1e-30);
  }
}

TEST(EveDecide, SignRule) {
  EXPECT_EQ(eve_decide(1e-9, 0), kLH);
  EXPECT_EQ(eve_decide(-1e-9, 0), kHL);
}

TEST(EveDecide, TiesAreFair) {
  const int n = 10000;
  int lh = 0;
  for (int k = 0; k < n; ++k) lh += eve_decide(0.0, derive_seed(5, {static_cast<std::uint64_t>(k)})) == kLH;
  EXPECT_NEAR(static_cast<double>(lh) / n, 0.5, 3.0 * 0.5 / std::sqrt(n));
}

TEST(SuccessRate, Examples) {
  const std::vector<int> ones(100, 1);
  const auto r = success_rate(ones);
  EXPECT_EQ(r.p_e, 1.0);
  EXPECT_EQ(r.epsilon, 0.5);
  EXPECT_EQ(r.binomial_std, 0.0);
  EXPECT_THROW(success_rate(std::vector<int>{}), ArgumentError);

  std::mt19937_64 rng(3);
  std::vector<int> coin(1000);
  for (int& q : coin) q = static_cast<int>(rng() >> 63);
  EXPECT_NEAR(success_rate(coin).p_e, 0.5, 3.0 * 0.0158);
}

TEST(RunAttack, SignSymmetryUnderMirroring) {
  const auto net = build_distributed(1e3, 9e3, CableSpec::rg58(1000.0));
  const auto lh = record(net, kLH, false, 12);
  const auto hl = record(net, kHL, true, 12);
  const auto a = run_attack(lh, 1, Execution::Serial);
  const auto b = run_attack(hl, 1, Execution::Serial);
  ASSERT_EQ(a.bits.size(), b.bits.size());
  for (std::size_t k = 0; k < a.bits.size(); ++k) {
    EXPECT_NEAR(a.bits[k].rho, -b.bits[k].rho, 1e-9 * std::abs(a.bits[k].rho));
    EXPECT_EQ(a.bits[k].q, b.bits[k].q);
  }
  EXPECT_EQ(a.summary.p_e, b.summary.p_e);
}

TEST(RunAttack, ScaleInvariant) {
  const auto beps = record(build_distributed(1e3, 9e3, CableSpec::rg58(1000.0)), kLH, false, 8);
  auto scaled = beps;
  for (auto& m : scaled)
    for (auto* v : {&m.u_cha, &m.i_cha, &m.u_chb, &m.i_chb})
      for (double& x : *v) x *= 3.7;
  const auto a = run_attack(beps, 1, Execution::Serial);
  const auto b = run_attack(scaled, 1, Execution::Serial);
  for (std::size_t k = 0; k < a.bits.size(); ++k) EXPECT_EQ(a.bits[k].guess, b.bits[k].guess);
}

TEST(RunAttack, SkipsDiscardsAndNeedsSecureBits) {
  auto beps = record(build_distributed(1e3, 9e3, CableSpec::rg58(100.0)), kLH, false, 3);
  beps[1].arrangement = {Choice::L, Choice::L};
  EXPECT_EQ(run_attack(beps, 1).bits.size(), 2u);
  for (auto& m : beps) m.arrangement = {Choice::H, Choice::H};
  EXPECT_THROW(run_attack(beps, 1), ArgumentError);
}

TEST(RunAttack, SerialEqualsParallel) {
  const auto beps = record(build_distributed(1e3, 9e3, CableSpec::rg58(1000.0)), kLH, false, 10);
  const auto a = run_attack(beps, 7, Execution::Serial);
  const auto b = run_attack(beps, 7, Execution::Parallel);
  for (std::size_t k = 0; k < a.bits.size(); ++k) {
    EXPECT_EQ(a.bits[k].rho, b.bits[k].rho);
    EXPECT_EQ(a.bits[k].q, b.bits[k].q);
  }
}
