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

#include "treedox/embedding.hpp"

namespace treedox {
namespace {

TimeSeries ramp(std::size_t n, double start = 1.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i);
  return TimeSeries::scalar(v);
}

TimeSeries two_dim(std::size_t n) {
  Matrix m(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, 0) = static_cast<double>(i);
    m(i, 1) = 100.0 + static_cast<double>(i);
  }
  return TimeSeries(m);
}

TEST(Overembedding, ScalarRowsFollowDelays) {
  const Matrix f = build_overembedding(ramp(10), 3, 2);
  ASSERT_EQ(f.rows(), 6u);
  ASSERT_EQ(f.cols(), 3u);
  EXPECT_EQ(f, (Matrix{{1, 3, 5}, {2, 4, 6}, {3, 5, 7}, {4, 6, 8}, {5, 7, 9}, {6, 8, 10}}));
}

TEST(Overembedding, KOneIsIdentityForAnyXi) {
  const auto s = two_dim(12);
  for (std::size_t xi : {1u, 2u, 7u}) EXPECT_EQ(build_overembedding(s, 1, xi), s.data());
}

TEST(Overembedding, DelayMajorLayout) {
  const auto s = two_dim(5);
  const Matrix f = build_overembedding(s, 2, 1);
  ASSERT_EQ(f.rows(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(f(i, 0), s.data()(i, 0));
    EXPECT_EQ(f(i, 1), s.data()(i, 1));
    EXPECT_EQ(f(i, 2), s.data()(i + 1, 0));
    EXPECT_EQ(f(i, 3), s.data()(i + 1, 1));
  }
}

TEST(Overembedding, ShiftEquivariance) {
  const auto s = two_dim(40);
  const auto shifted = s.slice(3, 40);
  const Matrix a = build_overembedding(s, 4, 3);
  const Matrix b = build_overembedding(shifted, 4, 3);
  ASSERT_EQ(a.rows(), b.rows() + 3);
  for (std::size_t i = 0; i < b.rows(); ++i) {
    for (std::size_t c = 0; c < b.cols(); ++c) EXPECT_EQ(b(i, c), a(i + 3, c));
  }
}

TEST(TrainingPairs, LeadOneLabelFollowsNewestState) {
  const auto p = build_training_pairs(ramp(10), {3, 2, 1, {}});
  ASSERT_EQ(p.features.rows(), 5u);
  ASSERT_EQ(p.labels.rows(), 5u);
  EXPECT_EQ(p.features(0, 0), 1.0);
  EXPECT_EQ(p.features(0, 1), 3.0);
  EXPECT_EQ(p.features(0, 2), 5.0);
  EXPECT_EQ(p.labels(0, 0), 6.0);
}

TEST(TrainingPairs, LeadThree) {
  const auto p = build_training_pairs(ramp(10), {2, 1, 3, {}});
  EXPECT_EQ(p.features(0, 0), 1.0);
  EXPECT_EQ(p.features(0, 1), 2.0);
  EXPECT_EQ(p.labels(0, 0), 5.0);
  EXPECT_EQ(p.features.rows(), 10u - 1u - 3u);
}

TEST(TrainingPairs, ClassicOneStep) {
  const auto p = build_training_pairs(ramp(6), {1, 1, 1, {}});
  ASSERT_EQ(p.features.rows(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(p.labels(i, 0), p.features(i, 0) + 1.0);
}

// On ramp data every value is its own time index, so the offset between the
// label and the newest feature can be read off directly.
TEST(TrainingPairs, LabelIndexOffsetEqualsLead) {
  const auto s = two_dim(60);
  for (std::size_t k : {1u, 2u, 5u}) {
    for (std::size_t xi : {1u, 3u}) {
      for (std::size_t lead : {1u, 2u, 6u}) {
        const auto p = build_training_pairs(s, {k, xi, lead, {}});
        EXPECT_EQ(p.features.rows(), 60 - (k - 1) * xi - lead);
        for (std::size_t i = 0; i < p.features.rows(); ++i) {
          const double newest = p.features(i, (k - 1) * 2);
          EXPECT_EQ(p.labels(i, 0) - newest, static_cast<double>(lead));
          EXPECT_EQ(p.labels(i, 1) - 100.0, p.labels(i, 0));
        }
      }
    }
  }
}

TEST(TrainingPairs, SelectedColumnsAreLeftToReduction) {
  const OverembeddingSpec spec{3, 1, 1, std::vector<std::size_t>{0, 2}};
  const auto p = build_training_pairs(ramp(10), spec);
  ASSERT_EQ(p.features.cols(), 3u);
  const Matrix r = reduce_features(p.features, *spec.selected_columns);
  ASSERT_EQ(r.cols(), 2u);
  EXPECT_EQ(r(0, 0), p.features(0, 0));
  EXPECT_EQ(r(0, 1), p.features(0, 2));
}

TEST(TrainingPairs, TooShortSeriesThrows) {
  EXPECT_THROW(build_training_pairs(ramp(4), {3, 2, 1, {}}), std::invalid_argument);
}

TEST(ReduceFeatures, Projections) {
  const Matrix f{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(reduce_features(f, {0, 1, 2}), f);
  EXPECT_EQ(reduce_features(f, {0}), (Matrix{{1}, {4}}));
  EXPECT_EQ(reduce_features(f, {0, 2}), (Matrix{{1, 3}, {4, 6}}));
}

TEST(OverembeddingSpec, Validation) {
  EXPECT_THROW((OverembeddingSpec{0, 1, 1, {}}.validate(1)), std::invalid_argument);
  EXPECT_THROW((OverembeddingSpec{2, 1, 1, std::vector<std::size_t>{}}.validate(1)),
               std::invalid_argument);
  EXPECT_THROW((OverembeddingSpec{2, 1, 1, std::vector<std::size_t>{2}}.validate(1)),
               std::invalid_argument);
  EXPECT_NO_THROW((OverembeddingSpec{2, 1, 1, std::vector<std::size_t>{1}}.validate(1)));
}

TEST(TimeSeries, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(TimeSeries(Matrix{{1.0}, {std::numeric_limits<double>::infinity()}}),
               std::invalid_argument);
  EXPECT_THROW(TimeSeries(Matrix(0, 2)), std::invalid_argument);
  EXPECT_THROW(TimeSeries(Matrix{{1.0}}, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace treedox
