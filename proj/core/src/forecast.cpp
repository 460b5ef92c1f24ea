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

#include "treedox/forecast.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace treedox::forecast {

TreeDoxModel::TreeDoxModel(OverembeddingSpec spec, etr::EtrEnsemble stage2,
                           hyperparams::PrescriptionReport report,
                           Matrix training_tail)
    : spec_(std::move(spec)),
      stage2_(std::move(stage2)),
      report_(std::move(report)),
      tail_(std::move(training_tail)) {
  spec_.validate(tail_.cols());
  if (!spec_.selected_columns) {
    throw std::invalid_argument("TreeDoxModel: selected columns are required");
  }
  if (stage2_.n_input_features() != spec_.selected_columns->size()) {
    throw std::invalid_argument(
        "TreeDoxModel: stage-2 ensemble expects " +
        std::to_string(stage2_.n_input_features()) + " features but |C| = " +
        std::to_string(spec_.selected_columns->size()));
  }
  if (stage2_.n_outputs() != tail_.cols()) {
    throw std::invalid_argument("TreeDoxModel: output width differs from state dim");
  }
  if (tail_.rows() != spec_.window_length()) {
    throw std::invalid_argument(
        "TreeDoxModel: training tail has " + std::to_string(tail_.rows()) +
        " rows, expected (k-1)xi+1 = " + std::to_string(spec_.window_length()));
  }
}

TreeDoxModel train(const TimeSeries& series, const TrainOptions& options) {
  if (options.xi < 1 || options.lead < 1) {
    throw std::invalid_argument("train: xi and lead must be >= 1");
  }
  hyperparams::PrescriptionReport report;
  report.xi = options.xi;
  report.lead = options.lead;
  report.p_value = options.p_value;
  report.rule = options.prescription.rule;

  std::size_t k = 0;
  if (options.k) {
    k = *options.k;
    if (k < 1) throw std::invalid_argument("train: forced k must be >= 1");
    report.k_forced = true;
  } else {
    const auto pres = hyperparams::prescribe_k_detailed(
        series, options.xi, options.p_value, options.prescription);
    k = pres.k;
    for (const auto& tc : pres.per_dim) {
      report.tau_crit.push_back(tc.tau);
      report.thresholds.push_back(tc.threshold);
    }
    report.warnings = pres.warnings;
  }
  report.k = k;

  OverembeddingSpec spec{k, options.xi, options.lead, std::nullopt};
  const std::size_t needed = spec.span() + spec.lead + 1;
  if (series.t_len() < needed) {
    throw std::invalid_argument(
        "train: series of length " + std::to_string(series.t_len()) +
        " is too short for prescribed k = " + std::to_string(k) +
        " (need at least (k-1)xi + lead + 1 = " + std::to_string(needed) + ")");
  }

  auto pairs = build_training_pairs(series, spec);
  {
    const auto stage1 = etr::fit(pairs.features, pairs.labels, options.stage1);
    report.feature_importances = stage1.feature_importances();
  }
  const auto selection = hyperparams::select_features(report.feature_importances);
  report.fi0 = selection.fi0;
  report.selected_columns = selection.columns;
  if (selection.fallback) {
    report.warnings.push_back(
        "stage-1 importances are all zero; keeping every column");
  }
  spec.selected_columns = selection.columns;

  Matrix reduced = reduce_features(pairs.features, selection.columns);
  pairs.features = Matrix();
  auto stage2 = etr::fit(reduced, pairs.labels,
                         options.stage2.value_or(options.stage1));

  Matrix tail = series.data().slice_rows(series.t_len() - spec.window_length(),
                                         series.t_len());
  return TreeDoxModel(std::move(spec), std::move(stage2), std::move(report),
                      std::move(tail));
}

const char* to_string(ForecastMode mode) noexcept {
  return mode == ForecastMode::kClosedLoop ? "closed_loop" : "open_loop";
}

ForecastResult forecast_closed_loop(const TreeDoxModel& model,
                                    std::size_t n_steps,
                                    const std::optional<Matrix>& seed_window) {
  const auto& spec = model.spec();
  if (spec.lead != 1) {
    throw std::invalid_argument(
        "forecast_closed_loop: model was trained with lead " +
        std::to_string(spec.lead) + "; closed-loop forecasting needs lead 1");
  }
  const Matrix& seed = seed_window ? *seed_window : model.training_tail();
  if (seed.rows() != spec.window_length() || seed.cols() != model.dim()) {
    throw std::invalid_argument(
        "forecast_closed_loop: seed window must be " +
        std::to_string(spec.window_length()) + "x" + std::to_string(model.dim()) +
        ", got " + std::to_string(seed.rows()) + "x" + std::to_string(seed.cols()));
  }
  if (!seed.all_finite()) {
    throw std::invalid_argument("forecast_closed_loop: non-finite seed window");
  }

  ForecastResult result;
  result.mode = ForecastMode::kClosedLoop;
  result.lead = 1;
  result.predicted = Matrix(n_steps, model.dim());

  // history = seed rows followed by the predictions made so far.
  const std::size_t w = seed.rows();
  auto state = [&](std::size_t i) -> std::span<const double> {
    return i < w ? seed.row(i) : result.predicted.row(i - w);
  };
  for (std::size_t n = 0; n < n_steps; ++n) {
    model.predict_next(state, w - 1 + n, result.predicted.row(n));
  }
  return result;
}

ForecastResult forecast_open_loop(const TreeDoxModel& model,
                                  const TimeSeries& context,
                                  std::size_t n_steps) {
  const auto& spec = model.spec();
  if (context.dim() != model.dim()) {
    throw std::invalid_argument("forecast_open_loop: context has dimension " +
                                std::to_string(context.dim()) + ", model expects " +
                                std::to_string(model.dim()));
  }
  if (n_steps > 0 && context.t_len() < spec.span() + n_steps) {
    throw std::invalid_argument(
        "forecast_open_loop: context of length " + std::to_string(context.t_len()) +
        " supports at most " +
        std::to_string(context.t_len() > spec.span()
                           ? context.t_len() - spec.span()
                           : 0) +
        " predictions, requested " + std::to_string(n_steps));
  }
  ForecastResult result;
  result.mode = ForecastMode::kOpenLoop;
  result.lead = spec.lead;
  result.first_target = spec.span() + spec.lead;
  result.predicted = Matrix(n_steps, model.dim());
  auto state = [&](std::size_t i) { return context.state(i); };
  for (std::size_t m = 0; m < n_steps; ++m) {
    model.predict_next(state, m + spec.span(), result.predicted.row(m));
  }
  return result;
}

TimeSeries open_loop_context(const TreeDoxModel& model, const TimeSeries& train,
                             const TimeSeries& test) {
  const std::size_t history = model.spec().span() + model.spec().lead;
  if (train.t_len() < history) {
    throw std::invalid_argument("open_loop_context: training series shorter than " +
                                std::to_string(history) + " states");
  }
  if (train.dim() != test.dim()) {
    throw std::invalid_argument("open_loop_context: dimension mismatch");
  }
  Matrix rows = train.data().slice_rows(train.t_len() - history, train.t_len());
  for (std::size_t i = 0; i < test.t_len(); ++i) rows.append_row(test.state(i));
  return TimeSeries(std::move(rows), train.dt());
}

void attach_truth(ForecastResult& result, const Matrix& truth) {
  if (truth.rows() != result.predicted.rows() ||
      truth.cols() != result.predicted.cols()) {
    throw std::invalid_argument(
        "attach_truth: truth is " + std::to_string(truth.rows()) + "x" +
        std::to_string(truth.cols()) + " but prediction is " +
        std::to_string(result.predicted.rows()) + "x" +
        std::to_string(result.predicted.cols()));
  }
  std::vector<double> per_step(truth.rows());
  for (std::size_t n = 0; n < truth.rows(); ++n) {
    double ss = 0.0;
    for (std::size_t d = 0; d < truth.cols(); ++d) {
      const double e = truth(n, d) - result.predicted(n, d);
      ss += e * e;
    }
    per_step[n] = std::sqrt(ss / static_cast<double>(truth.cols()));
  }
  result.truth = truth;
  result.per_step_rmse = std::move(per_step);
}

}  // namespace treedox::forecast
