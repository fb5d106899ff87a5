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

#include <span>

namespace kljn::stats {

double mean(std::span<const double> x);
/// Sample standard deviation (n - 1 denominator).
double stddev(std::span<const double> x);
double mean_square(std::span<const double> x);
double rms(std::span<const double> x);

double normal_cdf(double x);
double normal_quantile(double p);

/// Upper tail P[X >= x] for X ~ chi-square with `dof` degrees of freedom.
double chi2_sf(double x, int dof);

/// Asymptotic Kolmogorov survival function Q_KS(lambda).
double kolmogorov_sf(double lambda);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the usual effective-n correction.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace kljn::stats
