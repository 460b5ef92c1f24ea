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

#include "treedox/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "treedox/hyperparams.hpp"

namespace treedox::analysis {

RmseResult rmse(const Matrix& truth, const Matrix& pred) {
  if (truth.rows() != pred.rows() || truth.cols() != pred.cols()) {
    throw std::invalid_argument(
        "rmse: shape mismatch " + std::to_string(truth.rows()) + "x" +
        std::to_string(truth.cols()) + " vs " + std::to_string(pred.rows()) +
        "x" + std::to_string(pred.cols()));
  }
  RmseResult r;
  r.per_step.resize(truth.rows());
  if (truth.empty()) return r;
  double total = 0.0;
  for (std::size_t n = 0; n < truth.rows(); ++n) {
    double ss = 0.0;
    for (std::size_t d = 0; d < truth.cols(); ++d) {
      const double e = truth(n, d) - pred(n, d);
      ss += e * e;
    }
    total += ss;
    r.per_step[n] = std::sqrt(ss / static_cast<double>(truth.cols()));
  }
  r.value = std::sqrt(total / static_cast<double>(truth.rows() * truth.cols()));
  return r;
}

RmseResult rmse(const TimeSeries& truth, const TimeSeries& pred) {
  return rmse(truth.data(), pred.data());
}

std::vector<double> nmae(std::span<const double> truth,
                         const std::vector<std::vector<double>>& forecasts,
                         double train_min, double train_max) {
  if (!(train_max > train_min)) {
    throw std::invalid_argument("nmae: training range is degenerate");
  }
  if (forecasts.empty()) throw std::invalid_argument("nmae: no forecasts");
  for (const auto& f : forecasts) {
    if (f.size() != truth.size()) {
      throw std::invalid_argument("nmae: forecast length " + std::to_string(f.size()) +
                                  " differs from truth length " +
                                  std::to_string(truth.size()));
    }
  }
  const double range = train_max - train_min;
  std::vector<double> out(truth.size());
  for (std::size_t n = 0; n < truth.size(); ++n) {
    double s = 0.0;
    for (const auto& f : forecasts) s += std::abs(truth[n] - f[n]);
    out[n] = s / static_cast<double>(forecasts.size()) / range;
  }
  return out;
}

double ami_metric(std::span<const double> truth, std::span<const double> pred,
                  std::size_t n_bins) {
  if (truth.size() != pred.size()) {
    throw std::invalid_argument("ami_metric: length mismatch");
  }
  return hyperparams::average_mutual_information(truth, pred, n_bins);
}

// ---------------------------------------------------------------------------
// Correlation dimension.

namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double e = a[d] - b[d];
    s += e * e;
  }
  return s;
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
  return f;
}

}  // namespace

CorrelationDimensionFit correlation_dimension(
    const Matrix& points, const CorrelationDimensionOptions& o) {
  if (o.n_radii < 4) throw std::invalid_argument("correlation_dimension: n_radii must be >= 4");
  if (!(o.slope_tolerance > 0.0)) {
    throw std::invalid_argument("correlation_dimension: slope_tolerance must be > 0");
  }
  if (!points.all_finite()) {
    throw std::invalid_argument("correlation_dimension: non-finite points");
  }

  std::size_t stride = 1;
  if (o.max_points > 0 && points.rows() > o.max_points) {
    stride = (points.rows() + o.max_points - 1) / o.max_points;
  }
  const std::size_t m = (points.rows() + stride - 1) / stride;
  const std::size_t w = (o.theiler_window + stride - 1) / stride;
  if (m < w + 3) {
    throw std::invalid_argument("correlation_dimension: need more than theiler_window + 2 points");
  }
  auto pt = [&](std::size_t i) { return points.row(i * stride); };

  // Pilot pass for the radius range.
  double d2_min = std::numeric_limits<double>::infinity();
  double d2_max = 0.0;
  const std::size_t pilot_step = std::max<std::size_t>(1, m / 200);
  for (std::size_t i = 0; i < m; i += pilot_step) {
    for (std::size_t j = 0; j < m; ++j) {
      if ((i > j ? i - j : j - i) <= w) continue;
      const double d2 = squared_distance(pt(i), pt(j));
      if (d2 > 0.0) d2_min = std::min(d2_min, d2);
      d2_max = std::max(d2_max, d2);
    }
  }
  if (!(d2_max > 0.0)) {
    CorrelationDimensionFit empty;
    throw CorrelationDimensionError("correlation_dimension: all points coincide", empty);
  }
  const double log_rmax = 0.5 * std::log(d2_max);
  const double log_rmin = std::max(0.5 * std::log(d2_min), log_rmax - 6.0 * std::log(10.0));
  const std::size_t nr = o.n_radii;
  const double step = (log_rmax - log_rmin) / static_cast<double>(nr - 1);

  CorrelationDimensionFit fit;
  fit.radii.resize(nr);
  for (std::size_t b = 0; b < nr; ++b) {
    fit.radii[b] = std::exp(log_rmin + step * static_cast<double>(b));
  }

  // hist[b] counts pairs whose distance lies in (r_{b-1}, r_b]; pairs beyond
  // r_max are dropped.
  const std::size_t n_threads =
      o.n_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : o.n_threads;
  std::vector<std::vector<std::uint64_t>> hist(n_threads,
                                               std::vector<std::uint64_t>(nr, 0));
  const double inv_step2 = step > 0.0 ? 0.5 / step : 0.0;
  const double rmax2 = fit.radii.back() * fit.radii.back() * (1.0 + 1e-12);
  auto count_rows = [&](std::size_t t) {
    auto& h = hist[t];
    for (std::size_t i = t; i < m; i += n_threads) {
      const auto pi = pt(i);
      for (std::size_t j = i + w + 1; j < m; ++j) {
        const double d2 = squared_distance(pi, pt(j));
        if (d2 > rmax2) continue;
        const double x = d2 > 0.0 ? (std::log(d2) - 2.0 * log_rmin) * inv_step2 : -1.0;
        const std::size_t b =
            x <= 0.0 ? 0 : std::min(nr - 1, static_cast<std::size_t>(std::ceil(x)));
        ++h[b];
      }
    }
  };
  if (n_threads == 1) {
    count_rows(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(count_rows, t);
  }

  const double n_pairs =
      static_cast<double>(m - w) * static_cast<double>(m - w - 1) / 2.0;
  std::vector<std::uint64_t> cum(nr, 0);
  std::uint64_t running = 0;
  fit.correlation_sums.resize(nr);
  for (std::size_t b = 0; b < nr; ++b) {
    for (std::size_t t = 0; t < n_threads; ++t) running += hist[t][b];
    cum[b] = running;
    fit.correlation_sums[b] = static_cast<double>(running) / n_pairs;
  }

  // Candidate region: enough pairs counted and C(r) still below saturation.
  std::vector<double> lx(nr), ly(nr);
  std::size_t first = nr;
  for (std::size_t b = 0; b < nr; ++b) {
    lx[b] = std::log(fit.radii[b]);
    ly[b] = fit.correlation_sums[b] > 0.0 ? std::log(fit.correlation_sums[b]) : 0.0;
    if (first == nr && cum[b] >= o.min_pair_count) first = b;
  }
  std::size_t last = nr;  // exclusive
  while (last > first && fit.correlation_sums[last - 1] >= 1.0 - 1e-12) --last;
  // keep the first saturated radius as the endpoint of the last slope
  if (last < nr) ++last;

  std::vector<double> slope(nr, 0.0);
  for (std::size_t b = first; b + 1 < last; ++b) {
    slope[b] = (ly[b + 1] - ly[b]) / (lx[b + 1] - lx[b]);
  }

  std::size_t best_a = 0, best_len = 0;
  for (std::size_t a = first; a + 1 < last; ++a) {
    double lo = slope[a], hi = slope[a], sum = 0.0;
    for (std::size_t b = a; b + 1 < last; ++b) {
      lo = std::min(lo, slope[b]);
      hi = std::max(hi, slope[b]);
      sum += slope[b];
      const double mean = sum / static_cast<double>(b - a + 1);
      if (!(mean > 0.0) || (hi - lo) > o.slope_tolerance * mean) break;
      const std::size_t len = b - a + 2;  // radii in the run
      if (len >= best_len) {
        best_len = len;
        best_a = a;
      }
    }
  }
  if (best_len < o.min_fit_points) {
    throw CorrelationDimensionError(
        "correlation_dimension: no scaling region of " +
            std::to_string(o.min_fit_points) + " radii with slope variation < " +
            std::to_string(o.slope_tolerance),
        fit);
  }
  fit.fit_range = {best_a, best_a + best_len - 1};
  const auto lf = fit_line(std::span(lx).subspan(best_a, best_len),
                           std::span(ly).subspan(best_a, best_len));
  fit.d2 = lf.slope;
  fit.fit_r2 = lf.r2;
  return fit;
}

// ---------------------------------------------------------------------------
// Savitzky-Golay.

namespace {

// Weights w such that sum_j w_j y(x_j) is the value at x0 of the least-squares
// polynomial of degree p through offsets x_j = lo..hi.
std::vector<double> sg_weights(long lo, long hi, long x0, std::size_t p) {
  const std::size_t n = static_cast<std::size_t>(hi - lo + 1);
  const std::size_t q = p + 1;
  const double centre = 0.5 * static_cast<double>(lo + hi);
  const double scale = std::max(1.0, 0.5 * static_cast<double>(hi - lo));
  // Normal matrix A^T A and right-hand side v(x0).
  std::vector<double> ata(q * q, 0.0);
  std::vector<std::vector<double>> basis(n, std::vector<double>(q));
  for (std::size_t j = 0; j < n; ++j) {
    const double x = (static_cast<double>(lo + static_cast<long>(j)) - centre) / scale;
    double pw = 1.0;
    for (std::size_t c = 0; c < q; ++c) {
      basis[j][c] = pw;
      pw *= x;
    }
    for (std::size_t r = 0; r < q; ++r) {
      for (std::size_t c = 0; c < q; ++c) ata[r * q + c] += basis[j][r] * basis[j][c];
    }
  }
  std::vector<double> v(q);
  {
    const double x = (static_cast<double>(x0) - centre) / scale;
    double pw = 1.0;
    for (std::size_t c = 0; c < q; ++c) {
      v[c] = pw;
      pw *= x;
    }
  }
  // Solve (A^T A) z = v by Gaussian elimination with partial pivoting.
  for (std::size_t col = 0; col < q; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < q; ++r) {
      if (std::abs(ata[r * q + col]) > std::abs(ata[piv * q + col])) piv = r;
    }
    if (ata[piv * q + col] == 0.0) {
      throw std::invalid_argument("savitzky_golay: singular fit");
    }
    if (piv != col) {
      for (std::size_t c = 0; c < q; ++c) std::swap(ata[col * q + c], ata[piv * q + c]);
      std::swap(v[col], v[piv]);
    }
    for (std::size_t r = col + 1; r < q; ++r) {
      const double f = ata[r * q + col] / ata[col * q + col];
      for (std::size_t c = col; c < q; ++c) ata[r * q + c] -= f * ata[col * q + c];
      v[r] -= f * v[col];
    }
  }
  std::vector<double> z(q);
  for (std::size_t r = q; r-- > 0;) {
    double s = v[r];
    for (std::size_t c = r + 1; c < q; ++c) s -= ata[r * q + c] * z[c];
    z[r] = s / ata[r * q + r];
  }
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t c = 0; c < q; ++c) s += basis[j][c] * z[c];
    w[j] = s;
  }
  return w;
}

}  // namespace

std::vector<double> savitzky_golay(std::span<const double> series,
                                   std::size_t window, std::size_t poly_order) {
  if (window % 2 == 0) throw std::invalid_argument("savitzky_golay: window must be odd");
  if (window <= poly_order) {
    throw std::invalid_argument("savitzky_golay: window must exceed poly_order");
  }
  if (window > series.size()) {
    throw std::invalid_argument("savitzky_golay: window " + std::to_string(window) +
                                " exceeds series length " + std::to_string(series.size()));
  }
  const long n = static_cast<long>(series.size());
  const long h = static_cast<long>(window / 2);
  const long need = static_cast<long>(poly_order) + 1;
  std::vector<double> out(series.size());
  const auto interior = sg_weights(-h, h, 0, poly_order);
  for (long i = 0; i < n; ++i) {
    if (i >= h && i + h < n) {
      double s = 0.0;
      for (long j = -h; j <= h; ++j) s += interior[j + h] * series[i + j];
      out[i] = s;
      continue;
    }
    long lo = std::max(0L, i - h);
    long hi = std::min(n - 1, i + h);
    while (hi - lo + 1 < need) {
      if (lo > 0) --lo;
      else ++hi;
    }
    const auto w = sg_weights(lo - i, hi - i, 0, poly_order);
    double s = 0.0;
    for (long j = lo; j <= hi; ++j) s += w[j - lo] * series[j];
    out[i] = s;
  }
  return out;
}

std::vector<double> lyapunov_time_axis(std::size_t n_steps, double dt,
                                       double lambda_max) {
  if (!(lambda_max > 0.0)) {
    throw std::invalid_argument("lyapunov_time_axis: lambda_max must be > 0");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("lyapunov_time_axis: dt must be > 0");
  std::vector<double> axis(n_steps);
  for (std::size_t i = 0; i < n_steps; ++i) {
    axis[i] = static_cast<double>(i) * dt * lambda_max;
  }
  return axis;
}

}  // namespace treedox::analysis
