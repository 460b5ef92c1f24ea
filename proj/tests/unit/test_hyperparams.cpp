// Copyright 2026 The TreeDOX Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "treedox/hyperparams.hpp"
#include "treedox/random.hpp"
#include "treedox/systems.hpp"

namespace treedox::hyperparams {
namespace {

std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

// Plug-in entropy of the equal-width histogram, computed independently.
double entropy_oracle(const std::vector<double>& a, std::size_t bins) {
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  std::vector<double> counts(bins, 0.0);
  for (double v : a) {
    auto b = static_cast<std::size_t>((v - *lo) / (*hi - *lo) * static_cast<double>(bins));
    counts[std::min(b, bins - 1)] += 1.0;
  }
  double h = 0.0;
  for (double c : counts) {
    if (c > 0) h -= c / a.size() * std::log(c / a.size());
  }
  return h;
}

TEST(Ami, SelfInformationIsHistogramEntropy) {
  const auto a = uniform_noise(5000, 1);
  for (std::size_t bins : {4u, 13u, 32u}) {
    const double h = entropy_oracle(a, bins);
    EXPECT_NEAR(average_mutual_information(a, a, bins), h, 1e-12);
    EXPECT_NEAR(histogram_entropy(a, bins), h, 1e-12);
  }
}

TEST(Ami, IndependentUniformsNearZero) {
  const auto a = uniform_noise(100000, 2);
  const auto b = uniform_noise(100000, 3);
  const double i = average_mutual_information(a, b, 16);
  EXPECT_GE(i, 0.0);
  // Plug-in bias is about (bins - 1)^2 / (2N) = 1.1e-3.
  EXPECT_LT(i, 0.01);
}

TEST(Ami, TwoPointDiagonalIsLn2) {
  std::vector<double> a, b;
  for (int i = 0; i < 1000; ++i) {
    a.push_back(i % 2);
    b.push_back(i % 2);
  }
  EXPECT_NEAR(average_mutual_information(a, b, 2), std::numbers::ln2, 1e-12);
}

TEST(Ami, SymmetricAndNonNegative) {
  auto run = systems::henon(1.4, 0.3, 0.0, 0.0, 3000, 10);
  const auto x = run.series.component(0);
  const auto y = run.series.component(1);
  const auto noise = uniform_noise(3000, 4);
  EXPECT_EQ(average_mutual_information(x, y), average_mutual_information(y, x));
  EXPECT_EQ(average_mutual_information(x, noise, 9), average_mutual_information(noise, x, 9));
  EXPECT_GE(average_mutual_information(x, noise), 0.0);
  const std::vector<double> constant(50, 2.0);
  EXPECT_EQ(average_mutual_information(constant, std::span<const double>(noise).first(50)), 0.0);
}

TEST(Ami, SturgesBins) {
  EXPECT_EQ(sturges_bins(1024), 11u);
  EXPECT_EQ(sturges_bins(1000), 11u);
  EXPECT_EQ(sturges_bins(2), 2u);
}

TEST(AmiCurve, WhiteNoiseIsFlat) {
  const auto s = TimeSeries::scalar(uniform_noise(20000, 5));
  const auto c = ami_curve(s, 0, 20);
  for (double v : c.values) EXPECT_LT(v, 0.01);
}

TEST(AmiCurve, PeriodTwoRecursEvenLags) {
  std::vector<double> v;
  for (int i = 0; i < 400; ++i) v.push_back(i % 2 ? 1.5 : -0.5);
  const auto s = TimeSeries::scalar(v);
  const auto c = ami_curve(s, 0, 10, 8);
  const double lag0 = average_mutual_information(v, v, 8);
  for (std::size_t tau = 2; tau <= 10; tau += 2) EXPECT_NEAR(c.at(tau), lag0, 1e-12);
  // Odd lags leave unequal class counts; compare against the truncated pair.
  for (std::size_t tau = 1; tau <= 10; ++tau) {
    const std::vector<double> a(v.begin(), v.end() - static_cast<long>(tau));
    const std::vector<double> b(v.begin() + static_cast<long>(tau), v.end());
    EXPECT_NEAR(c.at(tau), average_mutual_information(a, b, 8), 1e-12);
  }
}

TEST(AmiCurve, LorenzDropsBeforePlateau) {
  const auto run = systems::lorenz({}, {1, 1, 1}, 0.01, 20000, 1000);
  const auto c = ami_curve(run.series, 0, 60);
  std::size_t first_min = 1;
  while (first_min < 60 && c.at(first_min + 1) < c.at(first_min)) ++first_min;
  EXPECT_GE(first_min, 10u);
  EXPECT_LT(c.at(first_min), 0.5 * c.at(1));
  for (std::size_t tau = first_min; tau <= 60; ++tau) EXPECT_LT(c.at(tau), 0.6 * c.at(1));
}

TEST(TauCritical, FirstCrossing) {
  AmiCurve c;
  c.values = {0.9, 0.5, 0.2, 0.05, 0.3, 0.01};
  const auto t = tau_critical(c, 0.1);
  EXPECT_EQ(t.tau, 3u);
  EXPECT_FALSE(t.saturated);
  EXPECT_EQ(tau_critical(c, 0.95).tau, 0u);
}

TEST(TauCritical, NeverDecayingCurveSaturates) {
  AmiCurve c;
  c.values = std::vector<double>(25, 0.7);
  const auto t = tau_critical(c, 0.1);
  EXPECT_TRUE(t.saturated);
  EXPECT_EQ(t.tau, 25u);

  std::vector<double> v;
  for (int i = 0; i < 500; ++i) v.push_back(i % 2);
  PrescriptionOptions o;
  o.tau_max = 30;
  const auto p = prescribe_k_detailed(TimeSeries::scalar(v), 1, 0.05, o);
  EXPECT_EQ(p.per_dim[0].tau, 30u);
  EXPECT_TRUE(p.per_dim[0].saturated);
  EXPECT_FALSE(p.warnings.empty());
}

TEST(TauCritical, WhiteNoiseIsZeroUnderEveryRule) {
  const auto s = TimeSeries::scalar(uniform_noise(20000, 6));
  for (auto rule : {ThresholdRule::kNormalized, ThresholdRule::kSurrogate}) {
    PrescriptionOptions o;
    o.rule = rule;
    const auto p = prescribe_k_detailed(s, 1, 0.05, o);
    EXPECT_EQ(p.per_dim[0].tau, 0u) << to_string(rule);
    EXPECT_EQ(p.k, 2u);
  }
}

TEST(Thresholds, RuleDefinitions) {
  const auto x = uniform_noise(4000, 7);
  const std::size_t bins = sturges_bins(x.size());
  EXPECT_EQ(ami_threshold(ThresholdRule::kAbsolute, x, 0.05, bins), 0.05);
  EXPECT_NEAR(ami_threshold(ThresholdRule::kNormalized, x, 0.05, bins),
              0.05 * entropy_oracle(x, bins), 1e-12);
  const double s = ami_threshold(ThresholdRule::kSurrogate, x, 0.05, bins, 100, 3);
  EXPECT_EQ(s, surrogate_threshold(x, 0.05, 100, bins, 3));
  // Shuffled pairs sit near the plug-in bias (B - 1)^2 / 2N.
  const double bias = (bins - 1.0) * (bins - 1.0) / (2.0 * static_cast<double>(x.size()));
  EXPECT_GT(s, 0.5 * bias);
  EXPECT_LT(s, 3.0 * bias);
  EXPECT_EQ(threshold_rule_from_string("normalized"), ThresholdRule::kNormalized);
  EXPECT_THROW(threshold_rule_from_string("bogus"), std::invalid_argument);
}

TEST(KFromTau, Arithmetic) {
  EXPECT_EQ(k_from_tau(9, 3), 4u);
  EXPECT_EQ(k_from_tau(7, 1), 8u);
  EXPECT_EQ(k_from_tau(0, 1), 2u);
  EXPECT_EQ(k_from_tau(10, 3), 5u);
}

TEST(PrescribeK, HenonNearEight) {
  const auto run = systems::henon(1.4, 0.3, 0.0, 0.0, 20000, 10);
  const auto p = prescribe_k_detailed(run.series, 1, 0.05);
  EXPECT_GE(p.k, 4u);
  EXPECT_LE(p.k, 16u);
  std::size_t max_tau = 0;
  for (const auto& t : p.per_dim) max_tau = std::max(max_tau, t.tau);
  EXPECT_EQ(p.k, max_tau + 1);
}

TEST(PrescribeK, SpanConstantAcrossXi) {
  const auto run = systems::lorenz({}, {1, 1, 1}, 0.01, 20000, 1000);
  const auto base = prescribe_k_detailed(run.series, 1, 0.1);
  const std::size_t tau = base.k - 1;
  for (std::size_t xi : {2u, 5u, 10u, 20u}) {
    const auto k = prescribe_k(run.series, xi, 0.1);
    const std::size_t span = (k - 1) * xi;
    EXPECT_GE(span, tau) << "xi " << xi;
    EXPECT_LT(span, tau + xi) << "xi " << xi;
  }
}

TEST(PrescribeK, LorenzWithinFactorTwoOf319) {
  const auto run = systems::lorenz({}, {1, 1, 1}, 0.01, 30000, 10000);
  const auto k = prescribe_k(run.series, 1, 0.05);
  EXPECT_GE(k, 160u);
  EXPECT_LE(k, 638u);
}

TEST(SelectFeatures, ThresholdArithmetic) {
  const std::vector<double> fi = {0.7, 0.3, 0.0, 0.0};
  const auto s = select_features(fi);
  EXPECT_EQ(s.columns, (std::vector<std::size_t>{0, 1}));
  EXPECT_DOUBLE_EQ(s.fi0, 0.25);
  const std::vector<double> uniform(8, 1.0 / 8.0);
  EXPECT_EQ(select_features(uniform).columns.size(), 8u);
  const auto zero = select_features(std::vector<double>(3, 0.0));
  EXPECT_TRUE(zero.fallback);
  EXPECT_EQ(zero.columns.size(), 3u);
  EXPECT_THROW(select_features(std::vector<double>{0.5, 0.1}), std::invalid_argument);
}

TEST(SelectFeatures, PartitionInvariant) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> fi(12);
    double sum = 0.0;
    for (double& v : fi) sum += (v = rng.uniform() * rng.uniform());
    for (double& v : fi) v /= sum;
    const auto s = select_features(fi);
    std::vector<bool> in(fi.size(), false);
    for (auto c : s.columns) in[c] = true;
    for (std::size_t j = 0; j < fi.size(); ++j) {
      if (in[j]) {
        EXPECT_GE(fi[j], 1.0 / 12.0);
      } else {
        EXPECT_LT(fi[j], 1.0 / 12.0);
      }
    }
  }
}

TEST(PrescriptionReport, JsonRoundTrip) {
  PrescriptionReport r;
  r.tau_crit = {7, 3};
  r.thresholds = {0.1, 0.2};
  r.k = 8;
  r.p_value = 0.05;
  r.feature_importances = {0.5, 0.5};
  r.fi0 = 0.5;
  r.selected_columns = {0, 1};
  r.warnings = {"w"};
  const auto back = PrescriptionReport::from_json(r.to_json());
  EXPECT_EQ(back.tau_crit, r.tau_crit);
  EXPECT_EQ(back.k, 8u);
  EXPECT_EQ(back.selected_columns, r.selected_columns);
  EXPECT_EQ(back.rule, r.rule);
  EXPECT_NE(r.to_json().find("\"schema_version\""), std::string::npos);
}

}  // namespace
}  // namespace treedox::hyperparams
