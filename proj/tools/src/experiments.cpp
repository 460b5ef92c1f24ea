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

#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "treedox/analysis.hpp"
#include "treedox/errors.hpp"
#include "treedox/forecast.hpp"
#include "treedox/ingest.hpp"
#include "treedox/systems.hpp"

namespace treedox::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

class Stopwatch {
 public:
  Stopwatch(const RunContext& ctx, std::string label)
      : ctx_(ctx), label_(std::move(label)), start_(Clock::now()) {}
  ~Stopwatch() {
    if (ctx_.log) {
      const double s = std::chrono::duration<double>(Clock::now() - start_).count();
      *ctx_.log << "  " << label_ << ": " << s << " s\n";
    }
  }

 private:
  const RunContext& ctx_;
  std::string label_;
  Clock::time_point start_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write to " + path.string() + " failed");
}

void write_json(const fs::path& path, const json& doc) {
  write_text(path, doc.dump(2) + "\n");
}

// Columns of equal length under a header.
void write_columns(const fs::path& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& columns) {
  std::ostringstream out;
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << (c ? "," : "") << ingest::format_double(columns[c][r]);
    }
    out << '\n';
  }
  write_text(path, out.str());
}

void write_series(const fs::path& path, const TimeSeries& s) {
  std::ostringstream out;
  ingest::write_series_csv(out, s);
  write_text(path, out.str());
}

void write_matrix(const fs::path& path, const Matrix& m, std::optional<double> dt) {
  if (m.rows() == 0) {
    std::ostringstream out;
    out << "time";
    for (std::size_t d = 0; d < m.cols(); ++d) out << ",x" << d;
    out << '\n';
    write_text(path, out.str());
    return;
  }
  write_series(path, TimeSeries(m, dt));
}

json d2_json(const analysis::CorrelationDimensionFit& f) {
  return {{"d2", f.d2},
          {"fit_r2", f.fit_r2},
          {"fit_range", {f.fit_range.first, f.fit_range.second}},
          {"r_min_fit", f.radii[f.fit_range.first]},
          {"r_max_fit", f.radii[f.fit_range.second]}};
}

void write_d2(const fs::path& path, const analysis::CorrelationDimensionFit& f) {
  std::vector<double> in_fit(f.radii.size());
  for (std::size_t i = 0; i < f.radii.size(); ++i) {
    in_fit[i] = (i >= f.fit_range.first && i <= f.fit_range.second) ? 1.0 : 0.0;
  }
  write_columns(path, {"radius", "correlation_sum", "in_fit"},
                {f.radii, f.correlation_sums, in_fit});
}

analysis::CorrelationDimensionFit d2_of(const Matrix& points, const json& cfg,
                                        const RunContext& ctx) {
  analysis::CorrelationDimensionOptions o;
  o.theiler_window = cfg.at("theiler_window").get<std::size_t>();
  o.max_points = cfg.at("d2_max_points").get<std::size_t>();
  o.n_threads = ctx.threads;
  return analysis::correlation_dimension(points, o);
}

forecast::TrainOptions train_options(const json& cfg, std::uint64_t seed,
                                     const RunContext& ctx) {
  forecast::TrainOptions o;
  o.xi = cfg.value("xi", std::size_t{1});
  o.p_value = cfg.value("p_value", 0.05);
  o.lead = 1;
  if (cfg.contains("k") && cfg.at("k").get<std::size_t>() > 0) {
    o.k = cfg.at("k").get<std::size_t>();
  }
  if (cfg.contains("threshold_rule")) {
    o.prescription.rule =
        hyperparams::threshold_rule_from_string(cfg.at("threshold_rule").get<std::string>());
  }
  o.prescription.seed = seed;
  o.stage1.n_trees = cfg.value("n_trees", std::size_t{100});
  o.stage1.seed = seed;
  o.stage1.n_threads = ctx.threads;
  if (cfg.contains("stage2_trees")) {
    auto s2 = o.stage1;
    s2.n_trees = cfg.at("stage2_trees").get<std::size_t>();
    s2.seed = seed + 0x5EED;
    o.stage2 = s2;
  }
  return o;
}

std::vector<double> column_std(const Matrix& m) {
  std::vector<double> sd(m.cols());
  for (std::size_t d = 0; d < m.cols(); ++d) {
    double mean = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) mean += m(i, d);
    mean /= static_cast<double>(m.rows());
    double ss = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) ss += (m(i, d) - mean) * (m(i, d) - mean);
    sd[d] = std::sqrt(ss / static_cast<double>(m.rows()));
  }
  return sd;
}

double pooled_std(const Matrix& m) {
  double mean = 0.0;
  for (double v : m.data()) mean += v;
  mean /= static_cast<double>(m.data().size());
  double ss = 0.0;
  for (double v : m.data()) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(m.data().size()));
}

// sqrt(mean_d ((pred - truth) / scale_d)^2) per step.
std::vector<double> normalized_error(const Matrix& truth, const Matrix& pred,
                                     const std::vector<double>& scale) {
  std::vector<double> e(pred.rows());
  for (std::size_t n = 0; n < pred.rows(); ++n) {
    double ss = 0.0;
    for (std::size_t d = 0; d < pred.cols(); ++d) {
      const double z = (pred(n, d) - truth(n, d)) / scale[d];
      ss += z * z;
    }
    e[n] = std::sqrt(ss / static_cast<double>(pred.cols()));
  }
  return e;
}

// Number of leading steps with error below the threshold.
std::size_t steps_below(const std::vector<double>& err, double threshold) {
  std::size_t n = 0;
  while (n < err.size() && err[n] < threshold) ++n;
  return n;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void check_resources(std::size_t n, std::size_t n_features, std::size_t n_outputs,
                     std::size_t stage1_trees, std::size_t stage2_trees) {
  const double need = estimate_fit_bytes(n, n_features, n_outputs, stage1_trees, stage2_trees);
  const double have = available_memory_bytes();
  if (have > 0.0 && need > have) {
    std::ostringstream msg;
    msg.precision(3);
    msg << "estimated peak memory " << need / 1e9 << " GB for " << n << " samples x "
        << n_features << " features exceeds the " << have / 1e9
        << " GB available; use --scale desk or raise --xi";
    throw ResourceError(msg.str());
  }
}

json base_results(const std::string& name, const json& cfg) {
  return {{"schema_version", 1}, {"benchmark", name}, {"scale", cfg.at("scale")},
          {"seed", cfg.at("seed")}};
}

// ---------------------------------------------------------------------------

json run_henon(const json& cfg, const fs::path& out, const RunContext& ctx) {
  const auto n_train = cfg.at("n_train").get<std::size_t>();
  const auto n_test = cfg.at("n_test").get<std::size_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  auto run = systems::henon(cfg.at("a"), cfg.at("b"), cfg.at("x0"), cfg.at("y0"),
                            n_train + n_test, cfg.at("transient"));
  const auto train = run.series.slice(0, n_train);
  const auto test = run.series.slice(n_train, n_train + n_test);

  const auto opts = train_options(cfg, seed, ctx);
  const auto pres = hyperparams::prescribe_k_detailed(train, opts.xi, opts.p_value,
                                                      opts.prescription);
  check_resources(n_train, pres.k * 2, 2, opts.stage1.n_trees, opts.stage1.n_trees);

  std::optional<forecast::TreeDoxModel> model;
  {
    Stopwatch sw(ctx, "train");
    model.emplace(forecast::train(train, opts));
  }
  forecast::ForecastResult fc;
  {
    Stopwatch sw(ctx, "closed-loop forecast");
    fc = forecast::forecast_closed_loop(*model, n_test);
  }
  analysis::CorrelationDimensionFit d2_test, d2_pred;
  {
    Stopwatch sw(ctx, "correlation dimension");
    d2_test = d2_of(test.data(), cfg, ctx);
    d2_pred = d2_of(fc.predicted, cfg, ctx);
  }
  const auto err = analysis::rmse(test.data(), fc.predicted);

  write_series(out / "test.csv", test);
  write_matrix(out / "predicted.csv", fc.predicted, std::nullopt);
  write_d2(out / "d2_test.csv", d2_test);
  write_d2(out / "d2_predicted.csv", d2_pred);
  write_text(out / "report.json", model->report().to_json(2) + "\n");

  json r = base_results("henon", cfg);
  r["k"] = model->spec().k;
  r["p"] = model->columns().size();
  r["selected_columns"] = model->columns();
  r["d2_test"] = d2_json(d2_test);
  r["d2_predicted"] = d2_json(d2_pred);
  r["d2_abs_diff"] = std::abs(d2_test.d2 - d2_pred.d2);
  r["rmse"] = err.value;
  return r;
}

json run_logistic(const json& cfg, const fs::path& out, const RunContext& ctx) {
  const std::vector<double> r_values = {0.5, 2.0, 3.2, 3.5, 3.56, 3.6, 3.7, 3.8, 3.9};
  const auto n_train = cfg.at("n_train").get<std::size_t>();
  const auto n_test = cfg.at("n_test").get<std::size_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double tol = cfg.at("tolerance");
  json rows = json::array();
  std::vector<double> t_r, t_frac, t_max, t_mean;
  for (const double r : r_values) {
    Stopwatch sw(ctx, "r = " + ingest::format_double(r));
    auto run = systems::logistic(r, cfg.at("x0"), n_train + n_test, cfg.at("transient"));
    const auto train = run.series.slice(0, n_train);
    const auto test = run.series.slice(n_train, n_train + n_test);
    const auto model = forecast::train(train, train_options(cfg, seed, ctx));
    const auto fc = forecast::forecast_closed_loop(model, n_test);

    std::size_t within = 0;
    double max_res = 0.0, sum_res = 0.0;
    std::vector<double> xn, xn1, tn, tn1;
    for (std::size_t n = 0; n + 1 < n_test; ++n) {
      const double x = fc.predicted(n, 0), y = fc.predicted(n + 1, 0);
      const double res = std::abs(y - r * x * (1.0 - x));
      within += res <= tol ? 1 : 0;
      max_res = std::max(max_res, res);
      sum_res += res;
      xn.push_back(x);
      xn1.push_back(y);
      tn.push_back(test.state(n)[0]);
      tn1.push_back(test.state(n + 1)[0]);
    }
    const double pairs = static_cast<double>(n_test - 1);
    const double frac = n_test > 1 ? static_cast<double>(within) / pairs : 1.0;
    rows.push_back({{"r", r},
                    {"k", model.spec().k},
                    {"p", model.columns().size()},
                    {"fraction_on_parabola", frac},
                    {"max_residual", max_res},
                    {"mean_residual", n_test > 1 ? sum_res / pairs : 0.0}});
    t_r.push_back(r);
    t_frac.push_back(frac);
    t_max.push_back(max_res);
    t_mean.push_back(n_test > 1 ? sum_res / pairs : 0.0);
    write_columns(out / ("dynamics_r" + ingest::format_double(r) + ".csv"),
                  {"test_x_n", "test_x_next", "predicted_x_n", "predicted_x_next"},
                  {tn, tn1, xn, xn1});
  }
  write_columns(out / "parabola_residuals.csv",
                {"r", "fraction_on_parabola", "max_residual", "mean_residual"},
                {t_r, t_frac, t_max, t_mean});
  json res = base_results("logistic", cfg);
  res["tolerance"] = tol;
  res["per_r"] = rows;
  return res;
}

json run_lorenz(const json& cfg, const fs::path& out, const RunContext& ctx) {
  const auto n_train = cfg.at("n_train").get<std::size_t>();
  const auto n_test = cfg.at("n_test").get<std::size_t>();
  const auto n_climate = cfg.at("n_climate").get<std::size_t>();
  const auto n_seeds = cfg.at("n_seeds").get<std::size_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double dt = cfg.at("dt");
  const double lambda = cfg.at("lambda_max");
  const double skill_threshold = cfg.at("skill_threshold");
  if (n_seeds < 1) throw std::invalid_argument("lorenz: n_seeds must be >= 1");

  systems::SystemRun run;
  {
    Stopwatch sw(ctx, "integrate");
    run = systems::lorenz({}, {cfg.at("x0").get<double>(), cfg.at("y0").get<double>(), cfg.at("z0").get<double>()}, dt,
                          n_train + std::max(n_test, n_climate), cfg.at("transient"));
  }
  const auto train = run.series.slice(0, n_train);
  const auto test = run.series.slice(n_train, n_train + n_test);
  const auto climate = run.series.slice(n_train, n_train + n_climate);
  const auto sd = column_std(train.data());

  {
    const auto o = train_options(cfg, seed, ctx);
    const auto pres = hyperparams::prescribe_k_detailed(train, o.xi, o.p_value, o.prescription);
    check_resources(n_train, pres.k * 3, 3, o.stage1.n_trees, o.stage1.n_trees);
  }

  analysis::CorrelationDimensionFit d2_test;
  {
    Stopwatch sw(ctx, "test D2");
    d2_test = d2_of(climate.data(), cfg, ctx);
  }
  write_d2(out / "d2_test.csv", d2_test);

  json per_seed = json::array();
  std::vector<double> horizons, d2_diffs, d2_preds;
  for (std::size_t i = 0; i < n_seeds; ++i) {
    Stopwatch sw(ctx, "seed " + std::to_string(seed + i));
    const auto model = forecast::train(train, train_options(cfg, seed + i, ctx));
    const auto fc = forecast::forecast_closed_loop(model, n_test);
    const auto err = normalized_error(test.data(), fc.predicted, sd);
    const std::size_t good = steps_below(err, skill_threshold);
    const double horizon = static_cast<double>(good) * dt * lambda;
    const auto lt = analysis::lyapunov_time_axis(n_test + 1, dt, lambda);
    std::vector<double> axis(lt.begin() + 1, lt.end());  // prediction n is at step n + 1
    write_columns(out / ("skill_seed" + std::to_string(i) + ".csv"),
                  {"lyapunov_time", "normalized_rmse"}, {axis, err});
    if (i == 0) {
      std::vector<std::vector<double>> cols{axis};
      for (std::size_t d = 0; d < 3; ++d) cols.push_back(fc.predicted.column(d));
      for (std::size_t d = 0; d < 3; ++d) cols.push_back(test.data().column(d));
      write_columns(out / "forecast_seed0.csv",
                    {"lyapunov_time", "x_pred", "y_pred", "z_pred", "x_test", "y_test", "z_test"},
                    cols);
      write_text(out / "report_seed0.json", model.report().to_json(2) + "\n");
    }
    const auto climate_fc = forecast::forecast_closed_loop(model, n_climate);
    const auto d2_pred = d2_of(climate_fc.predicted, cfg, ctx);
    write_d2(out / ("d2_predicted_seed" + std::to_string(i) + ".csv"), d2_pred);
    if (i == 0) write_matrix(out / "climate_predicted_seed0.csv", climate_fc.predicted, dt);

    horizons.push_back(horizon);
    d2_preds.push_back(d2_pred.d2);
    d2_diffs.push_back(std::abs(d2_pred.d2 - d2_test.d2));
    per_seed.push_back({{"seed", seed + i},
                        {"k", model.spec().k},
                        {"p", model.columns().size()},
                        {"skill_steps", good},
                        {"skill_lyapunov_times", horizon},
                        {"d2_predicted", d2_json(d2_pred)},
                        {"d2_abs_diff", std::abs(d2_pred.d2 - d2_test.d2)}});
  }
  json r = base_results("lorenz", cfg);
  r["d2_test"] = d2_json(d2_test);
  r["per_seed"] = per_seed;
  r["median_skill_lyapunov_times"] = median(horizons);
  r["median_d2_predicted"] = median(d2_preds);
  r["median_d2_abs_diff"] = median(d2_diffs);
  return r;
}

// Ratio of one linear KS step to the closed form exp((q^2 - q^4) dt), worst
// relative deviation over the resolved modes.
double ks_linear_check(const json& cfg) {
  systems::KsParams p;
  p.length = cfg.at("length");
  p.grid_points = cfg.at("grid_points");
  p.dt = cfg.at("dt");
  p.nonlinear = false;
  const auto u0 = systems::ks_initial_condition(p.grid_points, 1, 1.0);
  systems::KsSolver solver(p, u0);
  const auto before = solver.spectrum();
  solver.advance();
  const auto after = solver.spectrum();
  double worst = 0.0;
  for (std::size_t m = 1; m < before.size(); ++m) {
    if (std::abs(before[m]) < 1e-12) continue;
    const double q = solver.wavenumber(m);
    const double expected = std::exp((q * q - q * q * q * q) * p.dt);
    const double rel = std::abs(after[m] / before[m] - expected) / expected;
    worst = std::max(worst, rel);
  }
  return worst;
}

json run_ks(const json& cfg, const fs::path& out, const RunContext& ctx) {
  const auto n_train = cfg.at("n_train").get<std::size_t>();
  const auto n_test = cfg.at("n_test").get<std::size_t>();
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const double lambda = cfg.at("lambda_max");
  const double skill_threshold = cfg.at("skill_threshold");
  systems::KsParams p;
  p.length = cfg.at("length");
  p.grid_points = cfg.at("grid_points");
  p.dt = cfg.at("dt");

  systems::SystemRun run;
  {
    Stopwatch sw(ctx, "integrate");
    run = systems::kuramoto_sivashinsky(p, n_train + n_test, cfg.at("transient"), seed);
  }
  const auto train = run.series.slice(0, n_train);
  const auto test = run.series.slice(n_train, n_train + n_test);
  const double sd = pooled_std(train.data());

  const auto opts = train_options(cfg, seed, ctx);
  {
    const std::size_t k = opts.k ? *opts.k
                                 : hyperparams::prescribe_k_detailed(train, opts.xi, opts.p_value,
                                                                     opts.prescription)
                                       .k;
    check_resources(n_train, k * p.grid_points, p.grid_points, opts.stage1.n_trees,
                    opts.stage2 ? opts.stage2->n_trees : opts.stage1.n_trees);
  }
  std::optional<forecast::TreeDoxModel> model;
  {
    Stopwatch sw(ctx, "train");
    model.emplace(forecast::train(train, opts));
  }
  const auto fc = forecast::forecast_closed_loop(*model, n_test);
  const auto err = normalized_error(test.data(), fc.predicted,
                                    std::vector<double>(p.grid_points, sd));
  const std::size_t good = steps_below(err, skill_threshold);
  const auto lt = analysis::lyapunov_time_axis(n_test + 1, p.dt, lambda);
  std::vector<double> axis(lt.begin() + 1, lt.end());
  write_columns(out / "error.csv", {"lyapunov_time", "normalized_rmse"}, {axis, err});
  write_series(out / "test.csv", test);
  write_matrix(out / "predicted.csv", fc.predicted, p.dt);
  Matrix diff(fc.predicted.rows(), fc.predicted.cols());
  for (std::size_t i = 0; i < diff.rows(); ++i) {
    for (std::size_t d = 0; d < diff.cols(); ++d) diff(i, d) = fc.predicted(i, d) - test.data()(i, d);
  }
  write_matrix(out / "difference.csv", diff, p.dt);
  write_text(out / "report.json", model->report().to_json(2) + "\n");

  json r = base_results("ks", cfg);
  r["k"] = model->spec().k;
  r["p"] = model->columns().size();
  r["field_std"] = sd;
  r["skill_steps"] = good;
  r["skill_lyapunov_times"] = static_cast<double>(good) * p.dt * lambda;
  r["test_lyapunov_times"] = static_cast<double>(n_test) * p.dt * lambda;
  r["linear_mode_max_rel_error"] = ks_linear_check(cfg);
  return r;
}

json run_soi(const json& cfg, const fs::path& out, const RunContext& ctx) {
  const auto path = cfg.at("data").get<std::string>();
  if (path.empty()) {
    throw std::invalid_argument("soi: a data file is required (--data PATH --format wide|long)");
  }
  const auto series =
      ingest::load_soi(path, ingest::soi_format_from_string(cfg.at("format")));
  const auto boundary = ingest::YearMonth::parse(cfg.at("split").get<std::string>());
  const auto [train, test] = ingest::split_at(series, boundary);
  if (train.t_len() == 0) throw std::invalid_argument("soi: empty training split");
  const auto seed = cfg.at("seed").get<std::uint64_t>();
  const auto all = series.values;
  const std::size_t n_train = train.t_len();
  const std::size_t n_test = test.t_len();
  double mean = 0.0;
  for (std::size_t i = 0; i < n_train; ++i) mean += all[i];
  mean /= static_cast<double>(n_train);
  const auto truth = test.component(0);

  json per_lead = json::array();
  for (const auto& lead_j : cfg.at("lead")) {
    const auto lead = lead_j.get<std::size_t>();
    if (lead < 1 || lead > n_train) throw std::invalid_argument("soi: bad lead");
    Stopwatch sw(ctx, "lead " + std::to_string(lead));
    auto opts = train_options(cfg, seed, ctx);
    opts.lead = lead;
    const auto model = forecast::train(train, opts);
    const auto context = forecast::open_loop_context(model, train, test);
    const auto fc = forecast::forecast_open_loop(model, context, n_test);
    const auto pred = fc.predicted.column(0);
    std::vector<double> persistence(n_test), climatology(n_test, mean);
    for (std::size_t n = 0; n < n_test; ++n) persistence[n] = all[n_train + n - lead];
    auto scalar_rmse = [&](const std::vector<double>& p) {
      double ss = 0.0;
      for (std::size_t n = 0; n < n_test; ++n) ss += (p[n] - truth[n]) * (p[n] - truth[n]);
      return std::sqrt(ss / static_cast<double>(n_test));
    };
    per_lead.push_back({
        {"lead", lead},
        {"k", model.spec().k},
        {"p", model.columns().size()},
        {"rmse", scalar_rmse(pred)},
        {"ami", analysis::ami_metric(truth, pred)},
        {"persistence_rmse", scalar_rmse(persistence)},
        {"persistence_ami", analysis::ami_metric(truth, persistence)},
        {"climatology_rmse", scalar_rmse(climatology)},
    });
    std::vector<double> month(n_test);
    for (std::size_t n = 0; n < n_test; ++n) month[n] = static_cast<double>(n);
    write_columns(out / ("lead" + std::to_string(lead) + ".csv"),
                  {"test_month", "truth", "treedox", "persistence", "climatology"},
                  {month, truth, pred, persistence, climatology});
  }
  json r = base_results("soi", cfg);
  r["n_train"] = n_train;
  r["n_test"] = n_test;
  r["first_month"] = series.start.to_string();
  r["last_month"] = series.last().to_string();
  r["per_lead"] = per_lead;
  return r;
}

}  // namespace

std::vector<std::string> benchmark_names() {
  return {"henon", "logistic", "lorenz", "ks", "soi"};
}

json benchmark_preset(const std::string& name, const std::string& scale) {
  if (scale != "desk" && scale != "paper") {
    throw std::invalid_argument("unknown scale '" + scale + "' (expected desk or paper)");
  }
  const bool paper = scale == "paper";
  json c = {{"scale", scale}, {"seed", 0u}};
  if (name == "henon") {
    c.update({{"a", 1.4}, {"b", 0.3}, {"x0", 0.0}, {"y0", 0.0}, {"transient", 10u},
              {"n_train", paper ? 100000u : 20000u}, {"n_test", paper ? 60000u : 20000u},
              {"xi", 1u}, {"p_value", 0.05}, {"k", 0u}, {"threshold_rule", "normalized"},
              {"n_trees", 100u}, {"theiler_window", 0u}, {"d2_max_points", 10000u}});
  } else if (name == "logistic") {
    c.update({{"x0", 0.25}, {"transient", 25u}, {"n_train", 2000u}, {"n_test", 1000u},
              {"k", 20u}, {"xi", 1u}, {"n_trees", 100u}, {"tolerance", 0.02}});
  } else if (name == "lorenz") {
    c.update({{"dt", 0.01}, {"x0", 1.0}, {"y0", 1.0}, {"z0", 1.0}, {"transient", 10000u},
              {"n_train", paper ? 87815u : 30000u}, {"n_test", 2184u},
              {"n_climate", paper ? 60000u : 20000u}, {"xi", paper ? 1u : 20u},
              {"p_value", 0.05}, {"k", 0u}, {"threshold_rule", "normalized"},
              {"n_trees", 100u}, {"n_seeds", paper ? 1u : 5u}, {"lambda_max", 0.8739},
              {"skill_threshold", 0.3}, {"theiler_window", 20u}, {"d2_max_points", 10000u}});
  } else if (name == "ks") {
    c.update({{"length", 22.0}, {"grid_points", paper ? 64u : 32u}, {"dt", 0.25},
              {"transient", paper ? 2000u : 1000u}, {"n_train", paper ? 97441u : 20000u},
              {"n_test", paper ? 559u : 400u}, {"xi", paper ? 1u : 4u}, {"p_value", 0.05},
              {"k", paper ? 1000u : 0u}, {"threshold_rule", "normalized"},
              {"n_trees", 100u}, {"stage2_trees", 1000u}, {"lambda_max", 0.043},
              {"skill_threshold", 0.5}});
  } else if (name == "soi") {
    c.update({{"data", ""}, {"format", "long"}, {"split", "1984-01"},
              {"lead", json::array({1, 3, 6, 12})}, {"xi", 1u}, {"p_value", 0.05},
              {"k", 0u}, {"threshold_rule", "normalized"}, {"n_trees", 100u}});
  } else {
    throw std::invalid_argument("unknown benchmark '" + name + "'");
  }
  return c;
}

json run_benchmark(const std::string& name, const json& config, const fs::path& out_dir,
                   const RunContext& ctx) {
  if (name == "soi" && config.value("data", std::string()).empty()) {
    throw std::invalid_argument("soi: a data file is required (--data PATH --format wide|long)");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  json resolved = config;
  resolved["benchmark"] = name;
  write_json(out_dir / "config.json", resolved);
  json results;
  if (name == "henon") {
    results = run_henon(config, out_dir, ctx);
  } else if (name == "logistic") {
    results = run_logistic(config, out_dir, ctx);
  } else if (name == "lorenz") {
    results = run_lorenz(config, out_dir, ctx);
  } else if (name == "ks") {
    results = run_ks(config, out_dir, ctx);
  } else if (name == "soi") {
    results = run_soi(config, out_dir, ctx);
  } else {
    throw std::invalid_argument("unknown benchmark '" + name + "'");
  }
  write_json(out_dir / "results.json", results);
  return results;
}

double estimate_fit_bytes(std::size_t n, std::size_t n_features, std::size_t n_outputs,
                          std::size_t stage1_trees, std::size_t stage2_trees) {
  const double nd = static_cast<double>(n);
  // Row-major pairs plus the column-major fitting copy.
  const double features = 2.0 * nd * static_cast<double>(n_features) * 8.0;
  const double labels = nd * static_cast<double>(n_outputs) * 8.0;
  // About 2n nodes of 32 bytes per fully grown tree.
  const double trees = 2.0 * nd * 32.0 * static_cast<double>(std::max(stage1_trees, stage2_trees));
  return features + labels + trees;
}

double available_memory_bytes() {
  std::ifstream in("/proc/meminfo");
  std::string key;
  double value = 0.0;
  std::string unit;
  while (in >> key >> value >> unit) {
    if (key == "MemAvailable:") return value * 1024.0;
  }
  return 0.0;
}

}  // namespace treedox::cli
