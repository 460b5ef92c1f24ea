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

// Time-delay overembedding.
//
// Column layout is delay-major, dimension-minor: feature j of an embedded row
// is state dimension j % D at delay j / D, where delay 0 is the OLDEST state
// of the window and delay k-1 the newest.

#ifndef TREEDOX_EMBEDDING_HPP_
#define TREEDOX_EMBEDDING_HPP_

#include <cstddef>
#include <optional>
#include <vector>

#include "treedox/matrix.hpp"

namespace treedox {

// t x D series of states, one row per time index.
class TimeSeries {
 public:
  TimeSeries() = default;
  // Throws std::invalid_argument on empty or non-finite data.
  explicit TimeSeries(Matrix data, std::optional<double> dt = std::nullopt);
  static TimeSeries scalar(const std::vector<double>& values,
                           std::optional<double> dt = std::nullopt);

  [[nodiscard]] const Matrix& data() const noexcept { return data_; }
  [[nodiscard]] std::size_t t_len() const noexcept { return data_.rows(); }
  [[nodiscard]] std::size_t dim() const noexcept { return data_.cols(); }
  [[nodiscard]] std::optional<double> dt() const noexcept { return dt_; }
  [[nodiscard]] std::span<const double> state(std::size_t i) const noexcept {
    return data_.row(i);
  }
  [[nodiscard]] std::vector<double> component(std::size_t d) const {
    return data_.column(d);
  }
  // Rows [begin, end) as a new series with the same dt.
  [[nodiscard]] TimeSeries slice(std::size_t begin, std::size_t end) const;

 private:
  Matrix data_;
  std::optional<double> dt_;
};

struct OverembeddingSpec {
  std::size_t k = 1;     // number of delayed states per feature row
  std::size_t xi = 1;    // lag between consecutive delays
  std::size_t lead = 1;  // label offset past the newest window state
  // Sorted feature columns kept after reduction; empty optional = all.
  std::optional<std::vector<std::size_t>> selected_columns;

  // Span of the window in time steps, (k - 1) * xi.
  [[nodiscard]] std::size_t span() const noexcept { return (k - 1) * xi; }
  [[nodiscard]] std::size_t window_length() const noexcept { return span() + 1; }

  // Throws std::invalid_argument unless k, xi, lead >= 1 and the selected
  // columns are non-empty, sorted, unique and < k * dim.
  void validate(std::size_t dim) const;
};

struct TrainingPairs {
  Matrix features;  // N x kD
  Matrix labels;    // N x D
};

// Row i is [x_i, x_{i+xi}, ..., x_{i+(k-1)xi}], (t - (k-1)xi) rows.
Matrix build_overembedding(const TimeSeries& series, std::size_t k,
                           std::size_t xi);

// N = t - (k-1)xi - lead pairs; label row i is the state at time
// i + (k-1)xi + lead. Selected columns in `spec` are ignored here.
TrainingPairs build_training_pairs(const TimeSeries& series,
                                   const OverembeddingSpec& spec);

// Column projection onto `columns` (in the given sorted order).
Matrix reduce_features(const Matrix& features,
                       const std::vector<std::size_t>& columns);

// Writes the delay vector whose newest state is `window_end` into `out`
// (size k * D), reading states through `state(i)`.
template <typename StateFn>
void delay_vector(StateFn&& state, std::size_t window_end,
                  const OverembeddingSpec& spec, std::size_t dim,
                  std::span<double> out) {
  const std::size_t first = window_end - spec.span();
  for (std::size_t j = 0; j < spec.k; ++j) {
    const auto s = state(first + j * spec.xi);
    for (std::size_t d = 0; d < dim; ++d) out[j * dim + d] = s[d];
  }
}

}  // namespace treedox

#endif  // TREEDOX_EMBEDDING_HPP_
