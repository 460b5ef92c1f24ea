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

// Forecast metrics and signal tools.

#ifndef TREEDOX_ANALYSIS_HPP_
#define TREEDOX_ANALYSIS_HPP_

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "treedox/embedding.hpp"
#include "treedox/errors.hpp"
#include "treedox/matrix.hpp"

namespace treedox::analysis {

struct RmseResult {
  double value = 0.0;             // sqrt of the mean over all entries
  std::vector<double> per_step;   // sqrt of the mean over dimensions
};

// Throws std::invalid_argument on shape mismatch.
RmseResult rmse(const Matrix& truth, const Matrix& pred);
RmseResult rmse(const TimeSeries& truth, const TimeSeries& pred);

// Per time point: mean_i |truth - forecast_i| / (train_max - train_min).
// Every realization must have truth.size() entries.
std::vector<double> nmae(std::span<const double> truth,
                         const std::vector<std::vector<double>>& forecasts,
                         double train_min, double train_max);

// AMI between truth and prediction, same estimator (and binning rule) as the
// lag prescription.
double ami_metric(std::span<const double> truth, std::span<const double> pred,
                  std::size_t n_bins = 0);

struct CorrelationDimensionOptions {
  std::size_t n_radii = 40;
  // Pairs with |i - j| <= theiler_window are excluded.
  std::size_t theiler_window = 0;
  // Larger point sets are thinned by a uniform stride; the Theiler window is
  // rescaled to the stride. 0 keeps every point.
  std::size_t max_points = 10000;
  // Radii below which fewer than this many pairs are counted are left out of
  // the scaling-region search.
  std::size_t min_pair_count = 50;
  // Largest (max - min) / mean of the local slopes inside the fit region.
  double slope_tolerance = 0.1;
  std::size_t min_fit_points = 4;
  std::size_t n_threads = 1;
};

struct CorrelationDimensionFit {
  std::vector<double> radii;
  std::vector<double> correlation_sums;
  std::pair<std::size_t, std::size_t> fit_range{0, 0};  // inclusive indices
  double d2 = 0.0;
  double fit_r2 = 0.0;
};

// Raised when no scaling region exists; fit() holds the full curve with an
// empty fit range.
class CorrelationDimensionError : public NumericalError {
 public:
  CorrelationDimensionError(const std::string& what, CorrelationDimensionFit fit)
      : NumericalError(what), fit_(std::move(fit)) {}
  [[nodiscard]] const CorrelationDimensionFit& fit() const noexcept { return fit_; }

 private:
  CorrelationDimensionFit fit_;
};

// Grassberger-Procaccia estimate on the rows of `points` (Euclidean norm).
// Radii are log-spaced between the smallest and largest nonzero pair
// distances found in a pilot sample.
CorrelationDimensionFit correlation_dimension(
    const Matrix& points, const CorrelationDimensionOptions& options = {});

// Least-squares local polynomial smoothing. Near the ends the fit uses the
// truncated window, widened to poly_order + 1 points when needed.
std::vector<double> savitzky_golay(std::span<const double> series,
                                   std::size_t window, std::size_t poly_order);

// axis[n] = n * dt * lambda_max.
std::vector<double> lyapunov_time_axis(std::size_t n_steps, double dt,
                                       double lambda_max);

}  // namespace treedox::analysis

#endif  // TREEDOX_ANALYSIS_HPP_
