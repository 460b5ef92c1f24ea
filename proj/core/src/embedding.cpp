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

#include "treedox/embedding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace treedox {

TimeSeries::TimeSeries(Matrix data, std::optional<double> dt)
    : data_(std::move(data)), dt_(dt) {
  if (data_.rows() == 0 || data_.cols() == 0) {
    throw std::invalid_argument("TimeSeries: empty data");
  }
  if (!data_.all_finite()) {
    throw std::invalid_argument("TimeSeries: non-finite entry");
  }
  if (dt_ && !(*dt_ > 0.0)) throw std::invalid_argument("TimeSeries: dt must be > 0");
}

TimeSeries TimeSeries::scalar(const std::vector<double>& values,
                              std::optional<double> dt) {
  return TimeSeries(Matrix(values.size(), 1, values), dt);
}

TimeSeries TimeSeries::slice(std::size_t begin, std::size_t end) const {
  return TimeSeries(data_.slice_rows(begin, end), dt_);
}

void OverembeddingSpec::validate(std::size_t dim) const {
  if (k < 1 || xi < 1 || lead < 1) {
    throw std::invalid_argument("OverembeddingSpec: k, xi and lead must be >= 1");
  }
  if (!selected_columns) return;
  const auto& c = *selected_columns;
  if (c.empty()) throw std::invalid_argument("OverembeddingSpec: empty column set");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] >= k * dim) {
      throw std::invalid_argument("OverembeddingSpec: column " +
                                  std::to_string(c[i]) + " >= kD = " +
                                  std::to_string(k * dim));
    }
    if (i > 0 && c[i] <= c[i - 1]) {
      throw std::invalid_argument(
          "OverembeddingSpec: columns must be sorted and unique");
    }
  }
}

Matrix build_overembedding(const TimeSeries& series, std::size_t k,
                           std::size_t xi) {
  OverembeddingSpec spec{k, xi, 1, std::nullopt};
  spec.validate(series.dim());
  const std::size_t t = series.t_len();
  if (t <= spec.span()) {
    throw std::invalid_argument(
        "build_overembedding: series of length " + std::to_string(t) +
        " too short for window span (k-1)*xi = " + std::to_string(spec.span()));
  }
  const std::size_t dim = series.dim();
  const std::size_t rows = t - spec.span();
  Matrix out(rows, k * dim);
  auto state = [&](std::size_t i) { return series.state(i); };
  for (std::size_t i = 0; i < rows; ++i) {
    delay_vector(state, i + spec.span(), spec, dim, out.row(i));
  }
  return out;
}

TrainingPairs build_training_pairs(const TimeSeries& series,
                                   const OverembeddingSpec& spec) {
  spec.validate(series.dim());
  const std::size_t t = series.t_len();
  if (t <= spec.span() + spec.lead) {
    throw std::invalid_argument(
        "build_training_pairs: series of length " + std::to_string(t) +
        " too short; need more than (k-1)*xi + lead = " +
        std::to_string(spec.span() + spec.lead));
  }
  const std::size_t dim = series.dim();
  const std::size_t n = t - spec.span() - spec.lead;
  TrainingPairs pairs{Matrix(n, spec.k * dim), Matrix(n, dim)};
  auto state = [&](std::size_t i) { return series.state(i); };
  for (std::size_t i = 0; i < n; ++i) {
    delay_vector(state, i + spec.span(), spec, dim, pairs.features.row(i));
    const auto label = series.state(i + spec.span() + spec.lead);
    std::copy(label.begin(), label.end(), pairs.labels.row(i).begin());
  }
  return pairs;
}

Matrix reduce_features(const Matrix& features,
                       const std::vector<std::size_t>& columns) {
  for (auto c : columns) {
    if (c >= features.cols()) {
      throw std::invalid_argument("reduce_features: column " +
                                  std::to_string(c) + " out of range (" +
                                  std::to_string(features.cols()) + " columns)");
    }
  }
  Matrix out(features.rows(), columns.size());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto src = features.row(i);
    auto dst = out.row(i);
    for (std::size_t j = 0; j < columns.size(); ++j) dst[j] = src[columns[j]];
  }
  return out;
}

}  // namespace treedox
