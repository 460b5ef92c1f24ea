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

// Two-stage TreeDOX training and forecasting.
//
// Training: prescribe k from AMI, build delay-overembedded pairs, fit a
// stage-1 ensemble on all kD columns, keep the columns whose importance
// reaches 1/(kD), and fit the stage-2 ensemble on those columns only.
//
// Forecasting either feeds predictions back into the delay window (closed
// loop) or slides the window over observed states (open loop).

#ifndef TREEDOX_FORECAST_HPP_
#define TREEDOX_FORECAST_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "treedox/embedding.hpp"
#include "treedox/etr.hpp"
#include "treedox/hyperparams.hpp"

namespace treedox::forecast {

struct TrainOptions {
  std::size_t xi = 1;
  double p_value = 0.05;
  std::size_t lead = 1;
  // Skips the AMI prescription when set (k = 1 gives a memoryless model).
  std::optional<std::size_t> k;
  hyperparams::PrescriptionOptions prescription;
  etr::EtrConfig stage1;
  // Defaults to stage1 when unset.
  std::optional<etr::EtrConfig> stage2;
};

class TreeDoxModel {
 public:
  TreeDoxModel(OverembeddingSpec spec, etr::EtrEnsemble stage2,
               hyperparams::PrescriptionReport report, Matrix training_tail);

  [[nodiscard]] const OverembeddingSpec& spec() const noexcept { return spec_; }
  [[nodiscard]] const std::vector<std::size_t>& columns() const noexcept {
    return *spec_.selected_columns;
  }
  [[nodiscard]] const etr::EtrEnsemble& stage2() const noexcept { return stage2_; }
  [[nodiscard]] const hyperparams::PrescriptionReport& report() const noexcept {
    return report_;
  }
  // Last (k-1)xi + 1 training states; the default closed-loop seed.
  [[nodiscard]] const Matrix& training_tail() const noexcept { return tail_; }
  [[nodiscard]] std::size_t dim() const noexcept { return tail_.cols(); }

  // Predicts the state `lead` steps past the window whose newest state has
  // index `window_end`; state(i) must return the state at index i.
  template <typename StateFn>
  void predict_next(StateFn&& state, std::size_t window_end,
                    std::span<double> out) const {
    const std::size_t d = dim();
    const std::size_t first = window_end - spec_.span();
    std::vector<double> reduced(columns().size());
    for (std::size_t j = 0; j < reduced.size(); ++j) {
      const std::size_t c = columns()[j];
      reduced[j] = state(first + (c / d) * spec_.xi)[c % d];
    }
    stage2_.predict_row(reduced, out);
  }

  // Binary model file (magic, version, JSON envelope, ensemble). A path
  // ending in ".json" is written as a single JSON document instead.
  void save(const std::filesystem::path& path) const;
  static TreeDoxModel load(const std::filesystem::path& path);
  void write(std::ostream& out) const;
  static TreeDoxModel read(std::istream& in);
  [[nodiscard]] std::string to_json() const;
  static TreeDoxModel from_json(const std::string& text);

 private:
  OverembeddingSpec spec_;
  etr::EtrEnsemble stage2_;
  hyperparams::PrescriptionReport report_;
  Matrix tail_;
};

// Throws std::invalid_argument when the series is shorter than
// (k-1)xi + lead + 1 for the prescribed (or forced) k.
TreeDoxModel train(const TimeSeries& series, const TrainOptions& options);

enum class ForecastMode { kClosedLoop, kOpenLoop };
const char* to_string(ForecastMode mode) noexcept;

struct ForecastResult {
  Matrix predicted;  // n_steps x D
  ForecastMode mode = ForecastMode::kClosedLoop;
  std::size_t lead = 1;
  // Open loop: context index of the first prediction's target.
  std::size_t first_target = 0;
  std::optional<Matrix> truth;
  std::optional<std::vector<double>> per_step_rmse;
};

// Self-evolving forecast of n_steps states following the seed window
// (default: the training tail). Requires a lead-1 model and a seed window of
// (k-1)xi + 1 rows of width D.
ForecastResult forecast_closed_loop(const TreeDoxModel& model,
                                    std::size_t n_steps,
                                    const std::optional<Matrix>& seed_window = {});

// Prediction m targets context index first_target + m with first_target =
// (k-1)xi + lead, and reads only context rows [m, m + (k-1)xi]. Requires
// n_steps <= t_len - (k-1)xi.
ForecastResult forecast_open_loop(const TreeDoxModel& model,
                                  const TimeSeries& context, std::size_t n_steps);

// Context for open-loop testing: the last (k-1)xi + lead training states
// followed by the test states. Predictions then align one-to-one with test.
TimeSeries open_loop_context(const TreeDoxModel& model, const TimeSeries& train,
                             const TimeSeries& test);

// Attaches truth rows and per-step RMSE. Throws on shape mismatch.
void attach_truth(ForecastResult& result, const Matrix& truth);

}  // namespace treedox::forecast

#endif  // TREEDOX_FORECAST_HPP_
