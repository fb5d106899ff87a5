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

// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kljn/kernels.hpp"

using namespace kljn;

namespace {

std::vector<BepMeasurement> synthetic_beps(std::size_t n, std::size_t len) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<BepMeasurement> out(n);
  for (auto& m : out)
    for (auto* v : {&m.u_cha, &m.i_cha, &m.u_chb, &m.i_chb}) {
      v->resize(len);
      for (double& x : *v) x = g(rng);
    }
  return out;
}

std::vector<NoiseSpec> noise_specs(std::size_t n) {
  std::vector<NoiseSpec> specs(n);
  for (std::size_t k = 0; k < n; ++k) {
    specs[k].duration_s = 0.1;
    specs[k].seed = k;
  }
  return specs;
}

void BM_CorrelateSerial(benchmark::State& st) {
  const auto beps = synthetic_beps(static_cast<std::size_t>(st.range(0)), 100);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::correlate_serial(beps));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_CorrelateOmp(benchmark::State& st) {
  const auto beps = synthetic_beps(static_cast<std::size_t>(st.range(0)), 100);
  for (auto _ : st) benchmark::DoNotOptimize(kernels::correlate_omp(beps));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_GenerateSerial(benchmark::State& st) {
  const auto specs = noise_specs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::generate_batch_serial(specs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_GenerateOmp(benchmark::State& st) {
  const auto specs = noise_specs(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::generate_batch_omp(specs));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

std::vector<double> series(std::size_t n) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

void BM_WelchSerial(benchmark::State& st) {
  const auto x = series(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::welch_psd_serial(x, 4096));
  st.SetBytesProcessed(st.iterations() * st.range(0) * 8);
}

void BM_WelchOmp(benchmark::State& st) {
  const auto x = series(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(kernels::welch_psd_omp(x, 4096));
  st.SetBytesProcessed(st.iterations() * st.range(0) * 8);
}

}  // namespace

BENCHMARK(BM_CorrelateSerial)->Arg(1000)->Arg(10000);
BENCHMARK(BM_CorrelateOmp)->Arg(1000)->Arg(10000);
BENCHMARK(BM_GenerateSerial)->Arg(16);
BENCHMARK(BM_GenerateOmp)->Arg(16);
BENCHMARK(BM_WelchSerial)->Arg(1 << 20);
BENCHMARK(BM_WelchOmp)->Arg(1 << 20);

BENCHMARK_MAIN();
