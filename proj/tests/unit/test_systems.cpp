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

#include "treedox/errors.hpp"
#include "treedox/systems.hpp"

namespace treedox::systems {
namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

TEST(Henon, FixedPointFromOrigin) {
  const auto run = henon(0.0, 0.0, 0.0, 0.0, 5, 0);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(run.series.state(i)[0], 1.0);
    EXPECT_EQ(run.series.state(i)[1], 0.0);
  }
}

TEST(Henon, OneStepByHand) {
  const auto run = henon(1.4, 0.3, 1.0, 1.0, 1, 0);
  EXPECT_DOUBLE_EQ(run.series.state(0)[0], 0.6);
  EXPECT_DOUBLE_EQ(run.series.state(0)[1], 0.3);
}

TEST(Henon, ClassicOrbitIsBounded) {
  const auto run = henon(1.4, 0.3, 0.0, 0.0, 50000, 10);
  for (std::size_t i = 0; i < run.series.t_len(); ++i) {
    EXPECT_LT(std::abs(run.series.state(i)[0]), 1.5);
    EXPECT_LT(std::abs(run.series.state(i)[1]), 0.45);
  }
  EXPECT_EQ(run.transient_removed, 10u);
}

TEST(Henon, DivergenceIsNumericalError) {
  EXPECT_THROW(henon(3.0, 0.3, 1.0, 1.0, 100, 0), NumericalError);
}

TEST(Logistic, OneStepByHand) {
  EXPECT_DOUBLE_EQ(logistic(3.9, 0.25, 1, 0).series.state(0)[0], 0.73125);
}

TEST(Logistic, StableFixedPoint) {
  const auto run = logistic(2.0, 0.25, 10, 100);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(run.series.state(i)[0], 0.5, 1e-12);
}

TEST(Logistic, PeriodTwo) {
  const auto run = logistic(3.2, 0.25, 20, 1000);
  const double a = run.series.state(0)[0];
  const double b = run.series.state(1)[0];
  EXPECT_GT(std::abs(a - b), 0.1);
  for (std::size_t i = 2; i < 20; ++i) {
    EXPECT_NEAR(run.series.state(i)[0], i % 2 ? b : a, 1e-12);
  }
}

TEST(Logistic, RejectsBadInputs) {
  EXPECT_THROW(logistic(4.5, 0.25, 10, 0), std::invalid_argument);
  EXPECT_THROW(logistic(3.0, 1.5, 10, 0), std::invalid_argument);
}

TEST(Integrator, ExponentialDecayMatchesClosedForm) {
  const OdeRhs rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = -0.7 * y[0];
    dy[1] = y[0];
  };
  const std::vector<double> y0 = {1.0, 0.0};
  const Matrix m = integrate_uniform(rhs, y0, 0.1, 51);
  for (std::size_t j = 0; j < 51; ++j) {
    const double t = 0.1 * static_cast<double>(j);
    EXPECT_NEAR(m(j, 0), std::exp(-0.7 * t), 1e-8);
    EXPECT_NEAR(m(j, 1), (1.0 - std::exp(-0.7 * t)) / 0.7, 1e-8);
  }
}

TEST(Lorenz, ZAxisIsInvariantAndDecays) {
  const auto run = lorenz({}, {0.0, 0.0, 20.0}, 0.01, 500, 0);
  for (std::size_t i = 0; i < 500; ++i) {
    EXPECT_EQ(run.series.state(i)[0], 0.0);
    EXPECT_EQ(run.series.state(i)[1], 0.0);
  }
  const double t = 499 * 0.01;
  EXPECT_NEAR(run.series.state(499)[2], 20.0 * std::exp(-8.0 / 3.0 * t), 1e-6);
}

TEST(Lorenz, AttractorBounds) {
  const auto run = lorenz({}, {1, 1, 1}, 0.01, 20000, 10000);
  EXPECT_EQ(run.series.dt(), 0.01);
  for (std::size_t i = 0; i < run.series.t_len(); ++i) {
    EXPECT_GT(run.series.state(i)[2], 0.0);
    EXPECT_LT(run.series.state(i)[2], 50.0);
  }
}

TEST(Lorenz, SelfConvergenceUnderTighterTolerances) {
  IntegratorOptions tight;
  tight.rtol = 0.5e-9;
  tight.atol = 0.5e-9;
  const auto a = lorenz({}, {1, 1, 1}, 0.01, 1001, 0);
  const auto b = lorenz({}, {1, 1, 1}, 0.01, 1001, 0, tight);
  double worst = 0.0;
  for (std::size_t i = 0; i < 1001; ++i) {
    for (std::size_t d = 0; d < 3; ++d) {
      worst = std::max(worst, std::abs(a.series.state(i)[d] - b.series.state(i)[d]));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(Ks, LinearModesGrowAsClosedForm) {
  KsParams p;
  p.length = 22.0;
  p.grid_points = 32;
  p.nonlinear = false;
  const auto u0 = ks_initial_condition(p.grid_points, 3, 1.0);
  KsSolver solver(p, u0);
  const auto before = solver.spectrum();
  for (int step = 0; step < 4; ++step) solver.advance();
  const auto after = solver.spectrum();
  for (std::size_t m = 1; m < before.size(); ++m) {
    if (std::abs(before[m]) < 1e-12) continue;
    const double q = 2.0 * std::numbers::pi * static_cast<double>(m) / p.length;
    EXPECT_DOUBLE_EQ(solver.wavenumber(m), q);
    const double expected = std::exp((q * q - q * q * q * q) * 4 * p.dt);
    EXPECT_NEAR(std::abs(after[m] / before[m] - expected) / expected, 0.0, 1e-6) << "mode " << m;
  }
}

TEST(Ks, ChaoticRegimeStatistics) {
  KsParams p;  // L = 22, Q = 64, dt = 0.25
  const auto run = kuramoto_sivashinsky(p, 2000, 1000, 1);
  const auto& data = run.series.data();
  const std::vector<double> all(data.data().begin(), data.data().end());
  const double s = std_of(all);
  EXPECT_GT(s, 0.5);
  EXPECT_LT(s, 2.5);
  EXPECT_EQ(run.series.dim(), 64u);
  // Still moving at the end: not a steady state.
  double change = 0.0;
  for (std::size_t q = 0; q < 64; ++q) change += std::abs(data(1999, q) - data(1900, q));
  EXPECT_GT(change / 64.0, 0.1);
}

TEST(Ks, SmallDomainSettles) {
  KsParams p;
  p.length = 10.0;
  p.grid_points = 32;
  const auto run = kuramoto_sivashinsky(p, 400, 2000, 1);
  const auto& data = run.series.data();
  double change = 0.0;
  for (std::size_t q = 0; q < 32; ++q) change = std::max(change, std::abs(data(399, q) - data(300, q)));
  EXPECT_LT(change, 1e-3);
}

TEST(Ks, MeanIsConserved) {
  KsParams p;
  p.grid_points = 32;
  auto u0 = ks_initial_condition(p.grid_points, 5, 1.0);
  KsSolver solver(p, u0);
  double prev = mean_of(solver.field());
  for (int step = 0; step < 400; ++step) {
    solver.advance();
    const double m = mean_of(solver.field());
    EXPECT_LT(std::abs(m - prev), 1e-6);
    prev = m;
  }
}

TEST(Ks, DeterministicUnderSeed) {
  KsParams p;
  p.grid_points = 32;
  const auto a = kuramoto_sivashinsky(p, 100, 50, 9);
  const auto b = kuramoto_sivashinsky(p, 100, 50, 9);
  const auto c = kuramoto_sivashinsky(p, 100, 50, 10);
  EXPECT_EQ(a.series.data(), b.series.data());
  EXPECT_NE(a.series.data(), c.series.data());
  EXPECT_EQ(a.seed, 9u);
}

}  // namespace
}  // namespace treedox::systems
