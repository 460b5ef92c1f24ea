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

#include "commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "json.hpp"
#include "params.hpp"
#include "treedox/analysis.hpp"
#include "treedox/errors.hpp"
#include "treedox/forecast.hpp"
#include "treedox/ingest.hpp"
#include "treedox/systems.hpp"

namespace treedox::cli {

namespace fs = std::filesystem;

namespace {

std::size_t default_threads() {
  if (const char* env = std::getenv("TREEDOX_THREADS"); env && *env) {
    const auto v = parse_like(json(1u), "TREEDOX_THREADS", env);
    return std::max<std::size_t>(1, v.get<std::size_t>());
  }
  return 1;
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write to " + path.string() + " failed");
}

// "out/data.csv" -> "out/data.<suffix>"
fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension(suffix);
  return p;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string());
  }
}

forecast::TreeDoxModel load_model(const fs::path& path) {
  try {
    return forecast::TreeDoxModel::load(path);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

// ---------------------------------------------------------------------------
// generate

const std::vector<std::string> kSystems = {"henon", "logistic", "lorenz", "ks"};

struct GenerateCommand {
  CLI::App* app;
  ParamSet params;
  std::string system;
  std::string config_path;

  explicit GenerateCommand(CLI::App& root)
      : app(root.add_subcommand("generate", "Simulate a benchmark system to CSV")),
        params(app) {
    app->add_option("system", system, "henon | logistic | lorenz | ks")
        ->required()
        ->check(CLI::IsMember(kSystems));
    app->add_option("--config", config_path, "JSON file with parameter values");
    params.add("n", 1000u, "Number of output samples");
    params.add("transient", 0u, "Samples discarded before output");
    params.add("seed", 0u, "Seed for the KS initial condition");
    params.add("dt", 0.01, "Sampling interval (lorenz, ks)");
    params.add("a", 1.4, "Henon a");
    params.add("b", 0.3, "Henon b");
    params.add("r", 3.9, "Logistic growth rate");
    params.add("x0", 0.0, "Initial x");
    params.add("y0", 0.0, "Initial y");
    params.add("z0", 1.0, "Initial z (lorenz)");
    params.add("length", 22.0, "KS domain length L");
    params.add("grid_points", 64u, "KS grid points Q");
    params.add("output", std::string("-"), "Output CSV ('-' for standard output)");
  }

  std::vector<std::string> keys() const {
    std::vector<std::string> k = {"n", "transient", "output"};
    if (system == "henon") k.insert(k.end(), {"a", "b", "x0", "y0"});
    if (system == "logistic") k.insert(k.end(), {"r", "x0"});
    if (system == "lorenz") k.insert(k.end(), {"dt", "x0", "y0", "z0"});
    if (system == "ks") k.insert(k.end(), {"dt", "length", "grid_points", "seed"});
    return k;
  }

  int operator()(std::ostream& out, std::ostream& err) {
    if (system == "henon") {
      params.set_default("transient", 10u);
    } else if (system == "logistic") {
      params.set_default("x0", 0.25);
      params.set_default("transient", 25u);
    } else if (system == "lorenz") {
      params.set_default("x0", 1.0);
      params.set_default("y0", 1.0);
      params.set_default("transient", 10000u);
    } else {
      params.set_default("dt", 0.25);
      params.set_default("transient", 1000u);
    }
    const json all = params.resolve(load_config(config_path));
    json cfg = {{"system", system}};
    for (const auto& key : keys()) cfg[key] = all[key];
    const json file = load_config(config_path);
    for (const auto& [key, value] : file.items()) {
      if (!cfg.contains(key)) {
        throw std::invalid_argument("parameter '" + key + "' does not apply to " + system);
      }
    }
    for (const auto& [key, value] : all.items()) {
      if (params.given(key) && !cfg.contains(key)) {
        throw std::invalid_argument("--" + key + " does not apply to " + system);
      }
    }

    const auto n = all["n"].get<std::size_t>();
    const auto transient = all["transient"].get<std::size_t>();
    if (n == 0) throw std::invalid_argument("--n must be >= 1");
    systems::SystemRun run;
    if (system == "henon") {
      run = systems::henon(all["a"], all["b"], all["x0"], all["y0"], n, transient);
    } else if (system == "logistic") {
      run = systems::logistic(all["r"], all["x0"], n, transient);
    } else if (system == "lorenz") {
      run = systems::lorenz({}, {all["x0"].get<double>(), all["y0"].get<double>(),
                                 all["z0"].get<double>()},
                            all["dt"], n, transient);
    } else {
      systems::KsParams p;
      p.length = all["length"];
      p.grid_points = all["grid_points"];
      p.dt = all["dt"];
      run = systems::kuramoto_sivashinsky(p, n, transient, all["seed"]);
    }

    const std::string output = all["output"];
    std::ostream& summary = output == "-" ? err : out;
    if (output == "-") {
      ingest::write_series_csv(out, run.series);
    } else {
      ensure_parent(output);
      ingest::write_series_csv(fs::path(output), run.series);
      write_json_file(sibling(output, ".config.json"), cfg);
    }
    summary << "system " << system << ": length " << run.series.t_len() << ", dim "
            << run.series.dim() << ", dt ";
    if (run.series.dt()) {
      summary << ingest::format_double(*run.series.dt());
    } else {
      summary << "none";
    }
    summary << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// train

struct TrainCommand {
  CLI::App* app;
  ParamSet params;
  std::string config_path;

  explicit TrainCommand(CLI::App& root)
      : app(root.add_subcommand("train", "Fit a two-stage model to a series CSV")),
        params(app) {
    app->add_option("--config", config_path, "JSON file with parameter values");
    params.add("input", std::string(), "Training series CSV");
    params.add("model", std::string("model.tdx"), "Model output (.json for text)");
    params.add("report", std::string(), "Prescription report JSON (default: next to model)");
    params.add("xi", 1u, "Delay lag between embedded states");
    params.add("p_value", 0.05, "AMI threshold parameter");
    params.add("threshold_rule", std::string("normalized"),
               "AMI threshold rule: normalized | surrogate | absolute");
    params.add("lead", 1u, "Steps ahead of the newest delay state");
    params.add("k", 0u, "Force the number of delays (0 prescribes it; 1 = no memory)");
    params.add("n_trees", 100u, "Trees in the stage-1 ensemble");
    params.add("stage2_trees", 0u, "Trees in the stage-2 ensemble (0 = n_trees)");
    params.add("max_features", 0u, "Split candidates per node (0 = all)");
    params.add("min_samples_leaf", 1u, "Minimum samples per leaf");
    params.add("max_depth", 0u, "Maximum tree depth (0 = unbounded)");
    params.add("seed", 0u, "Random seed");
    params.add("explain", false, "Print the prescription report");
  }

  int operator()(std::size_t threads, std::ostream& out, std::ostream& err) {
    const json cfg = params.resolve(load_config(config_path));
    const std::string input = cfg["input"];
    if (input.empty()) throw std::invalid_argument("--input is required");
    const auto series = ingest::read_series_csv(fs::path(input));

    forecast::TrainOptions o;
    o.xi = cfg["xi"];
    o.p_value = cfg["p_value"];
    o.lead = cfg["lead"];
    if (cfg["k"].get<std::size_t>() > 0) o.k = cfg["k"].get<std::size_t>();
    o.prescription.rule = hyperparams::threshold_rule_from_string(cfg["threshold_rule"]);
    o.prescription.seed = cfg["seed"];
    o.stage1.n_trees = cfg["n_trees"];
    o.stage1.max_features = cfg["max_features"];
    o.stage1.min_samples_leaf = cfg["min_samples_leaf"];
    o.stage1.max_depth = cfg["max_depth"];
    o.stage1.seed = cfg["seed"];
    o.stage1.n_threads = threads;
    if (cfg["stage2_trees"].get<std::size_t>() > 0) {
      auto s2 = o.stage1;
      s2.n_trees = cfg["stage2_trees"];
      s2.seed = o.stage1.seed + 0x5EED;
      o.stage2 = s2;
    }

    std::optional<forecast::TreeDoxModel> model;
    try {
      model.emplace(forecast::train(series, o));
    } catch (const std::invalid_argument& e) {
      std::ostringstream msg;
      msg << e.what();
      if (!o.k) {
        try {
          const auto pres = hyperparams::prescribe_k_detailed(series, o.xi, o.p_value,
                                                              o.prescription);
          msg << " (prescribed k = " << pres.k << " needs at least "
              << (pres.k - 1) * o.xi + o.lead + 1 << " samples, input has "
              << series.t_len() << ")";
        } catch (const std::exception&) {
        }
      }
      throw std::invalid_argument(msg.str());
    }

    const fs::path model_path = cfg["model"].get<std::string>();
    ensure_parent(model_path);
    model->save(model_path);
    const fs::path report_path = cfg["report"].get<std::string>().empty()
                                     ? sibling(model_path, ".report.json")
                                     : fs::path(cfg["report"].get<std::string>());
    ensure_parent(report_path);
    {
      std::ofstream rep(report_path, std::ios::binary);
      if (!rep) throw IoError("cannot open " + report_path.string() + " for writing");
      rep << model->report().to_json(2) << '\n';
    }
    write_json_file(sibling(model_path, ".config.json"), cfg);

    if (cfg["explain"].get<bool>()) out << model->report().to_json(2) << '\n';
    for (const auto& w : model->report().warnings) err << "warning: " << w << '\n';
    out << "trained on " << series.t_len() << " x " << series.dim() << ": k = "
        << model->spec().k << ", xi = " << model->spec().xi << ", p = "
        << model->columns().size() << " of " << model->spec().k * series.dim()
        << " features\n";
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// forecast

json record(const std::string& metric, json p, double value,
            const std::vector<double>& per_step) {
  return {{"metric", metric}, {"params", std::move(p)}, {"value", value},
          {"per_step", per_step}};
}

struct ForecastCommand {
  CLI::App* app;
  ParamSet params;
  std::string config_path;

  explicit ForecastCommand(CLI::App& root)
      : app(root.add_subcommand("forecast", "Closed- or open-loop prediction from a model")),
        params(app) {
    app->add_option("--config", config_path, "JSON file with parameter values");
    params.add("model", std::string(), "Model file written by train");
    params.add("mode", std::string("closed"), "closed | open");
    params.add("n_steps", 100u, "Number of predictions");
    params.add("context", std::string(),
               "Series CSV: closed-loop seed (its last rows) or open-loop context");
    params.add("truth", std::string(), "Series CSV aligned row-for-row with predictions");
    params.add("train", std::string(), "Training CSV giving the NMAE range");
    params.add("dt", 0.0, "Sampling interval (0 = from the CSVs, else step index)");
    params.add("lambda_max", 0.0, "Largest Lyapunov exponent; adds a Lyapunov-time column");
    params.add("output", std::string("predictions.csv"), "Predictions CSV");
    params.add("metrics", std::string(), "Metrics JSON (default: next to output)");
  }

  int operator()(std::ostream& out, std::ostream& /*err*/) {
    const json cfg = params.resolve(load_config(config_path));
    const std::string model_file = cfg["model"];
    if (model_file.empty()) throw std::invalid_argument("--model is required");
    const std::string mode = cfg["mode"];
    if (mode != "closed" && mode != "open") {
      throw std::invalid_argument("--mode must be closed or open");
    }
    const auto n_steps = cfg["n_steps"].get<std::size_t>();
    const std::string context_path = cfg["context"];
    if (mode == "open" && context_path.empty()) {
      throw std::invalid_argument("open-loop forecasting requires --context");
    }
    const auto model = load_model(model_file);

    std::optional<TimeSeries> context;
    if (!context_path.empty()) context = ingest::read_series_csv(fs::path(context_path));
    std::optional<double> dt;
    if (cfg["dt"].get<double>() > 0.0) dt = cfg["dt"].get<double>();
    if (!dt && context) dt = context->dt();

    forecast::ForecastResult fc;
    std::size_t time_offset = 1;
    if (mode == "closed") {
      std::optional<Matrix> seed;
      if (context) {
        const std::size_t w = model.spec().window_length();
        if (context->t_len() < w) {
          throw std::invalid_argument("--context has " + std::to_string(context->t_len()) +
                                      " rows; the seed window needs " + std::to_string(w));
        }
        seed = context->slice(context->t_len() - w, context->t_len()).data();
      }
      fc = forecast::forecast_closed_loop(model, n_steps, seed);
    } else {
      fc = forecast::forecast_open_loop(model, *context, n_steps);
      time_offset = fc.first_target;
    }

    std::optional<TimeSeries> truth;
    if (!cfg["truth"].get<std::string>().empty()) {
      truth = ingest::read_series_csv(fs::path(cfg["truth"].get<std::string>()));
      if (!dt) dt = truth->dt();
      if (truth->dim() != fc.predicted.cols()) {
        throw std::invalid_argument("--truth has dimension " + std::to_string(truth->dim()) +
                                    ", predictions have " +
                                    std::to_string(fc.predicted.cols()));
      }
      if (truth->t_len() < n_steps) {
        throw std::invalid_argument("--truth has " + std::to_string(truth->t_len()) +
                                    " rows; prediction " + std::to_string(truth->t_len()) +
                                    " has no aligned truth row");
      }
      if (n_steps > 0) forecast::attach_truth(fc, truth->slice(0, n_steps).data());
    }

    const fs::path output = cfg["output"].get<std::string>();
    ensure_parent(output);
    const double lambda = cfg["lambda_max"];
    {
      std::ostringstream csv;
      csv << "time";
      if (lambda > 0.0) csv << ",lyapunov_time";
      for (std::size_t d = 0; d < fc.predicted.cols(); ++d) csv << ",x" << d;
      csv << '\n';
      for (std::size_t m = 0; m < fc.predicted.rows(); ++m) {
        const double step = static_cast<double>(time_offset + m);
        const double t = dt ? step * *dt : step;
        csv << ingest::format_double(t);
        if (lambda > 0.0) csv << ',' << ingest::format_double(t * lambda);
        for (std::size_t d = 0; d < fc.predicted.cols(); ++d) {
          csv << ',' << ingest::format_double(fc.predicted(m, d));
        }
        csv << '\n';
      }
      std::ofstream f(output, std::ios::binary);
      if (!f) throw IoError("cannot open " + output.string() + " for writing");
      f << csv.str();
      if (!f) throw IoError("write to " + output.string() + " failed");
    }
    write_json_file(sibling(output, ".config.json"), cfg);

    json records = json::array();
    if (fc.truth && n_steps > 0) {
      const Matrix& tm = *fc.truth;
      const auto r = analysis::rmse(tm, fc.predicted);
      records.push_back(record("rmse", json::object(), r.value, r.per_step));
      std::optional<TimeSeries> train;
      if (!cfg["train"].get<std::string>().empty()) {
        train = ingest::read_series_csv(fs::path(cfg["train"].get<std::string>()));
      }
      for (std::size_t d = 0; d < tm.cols(); ++d) {
        const auto tcol = tm.column(d);
        const auto pcol = fc.predicted.column(d);
        const auto range_src = train ? train->component(d) : tcol;
        const auto [lo, hi] = std::minmax_element(range_src.begin(), range_src.end());
        if (*hi > *lo) {
          const auto per = analysis::nmae(tcol, {pcol}, *lo, *hi);
          double mean = 0.0;
          for (double v : per) mean += v;
          mean /= static_cast<double>(per.size());
          records.push_back(record("nmae",
                                   {{"dim", d}, {"range_from", train ? "train" : "truth"}},
                                   mean, per));
        }
        if (n_steps >= 2) {
          records.push_back(
              record("ami", {{"dim", d}}, analysis::ami_metric(tcol, pcol), {}));
        }
      }
    }
    const json metrics = {{"schema_version", 1},
                          {"mode", mode},
                          {"n_steps", n_steps},
                          {"lead", fc.lead},
                          {"records", records}};
    const fs::path metrics_path = cfg["metrics"].get<std::string>().empty()
                                      ? sibling(output, ".metrics.json")
                                      : fs::path(cfg["metrics"].get<std::string>());
    ensure_parent(metrics_path);
    write_json_file(metrics_path, metrics);
    out << "wrote " << fc.predicted.rows() << " predictions to " << output.string() << '\n';
    return kExitOk;
  }
};

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkCommand {
  CLI::App* app;
  ParamSet params;
  std::string name;
  std::string config_path;
  std::string out_dir;

  explicit BenchmarkCommand(CLI::App& root)
      : app(root.add_subcommand("benchmark", "Run an end-to-end experiment bundle")),
        params(app) {
    app->add_option("name", name, "henon | logistic | lorenz | ks | soi")
        ->required()
        ->check(CLI::IsMember(benchmark_names()));
    app->add_option("--config", config_path,
                    "JSON parameters (a bundle's config.json reruns that bundle)");
    app->add_option("--output-dir,-o", out_dir, "Bundle directory (default results/<name>)");
    params.add("scale", std::string("desk"), "desk | paper");
    // Every preset key of every benchmark becomes a flag; the preset of the
    // chosen benchmark decides which ones apply.
    for (const auto& b : benchmark_names()) {
      const json preset = benchmark_preset(b, "desk");
      for (const auto& [key, value] : preset.items()) {
        if (!params.has(key)) params.add(key, value, "Benchmark parameter");
      }
    }
  }

  int operator()(std::size_t threads, std::ostream& out, std::ostream& err) {
    json file = load_config(config_path);
    if (!file.is_object()) throw std::invalid_argument("config: expected a JSON object");
    if (file.contains("benchmark")) {
      if (file["benchmark"] != name) {
        throw std::invalid_argument("config is for benchmark " + file["benchmark"].dump());
      }
      file.erase("benchmark");
    }
    std::string scale = "desk";
    if (file.contains("scale")) scale = file["scale"].get<std::string>();
    if (params.given("scale")) scale = params.resolve(json::object())["scale"];
    const json preset = benchmark_preset(name, scale);
    for (const auto& [key, value] : preset.items()) params.set_default(key, value);

    const json all = params.resolve(file);
    json cfg = json::object();
    for (const auto& [key, value] : preset.items()) cfg[key] = all[key];
    for (const auto& [key, value] : file.items()) {
      if (!preset.contains(key)) {
        throw std::invalid_argument("parameter '" + key + "' does not apply to " + name);
      }
    }
    for (const auto& [key, value] : all.items()) {
      if (params.given(key) && !preset.contains(key)) {
        throw std::invalid_argument("--" + key + " does not apply to " + name);
      }
    }

    const fs::path dir = out_dir.empty() ? fs::path("results") / name : fs::path(out_dir);
    RunContext ctx;
    ctx.threads = threads;
    ctx.log = &err;
    err << "benchmark " << name << " (" << scale << ") -> " << dir.string() << '\n';
    const json results = run_benchmark(name, cfg, dir, ctx);
    out << results.dump(2) << '\n';
    return kExitOk;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Tree-ensemble delay-overembedding forecasting of chaotic series", "treedox");
  app.require_subcommand(1);
  app.fallthrough();  // --threads may follow the subcommand
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: TREEDOX_THREADS or 1)");

  std::optional<GenerateCommand> generate;
  std::optional<TrainCommand> train;
  std::optional<ForecastCommand> forecast;
  std::optional<BenchmarkCommand> benchmark;
  try {
    generate.emplace(app);
    train.emplace(app);
    forecast.emplace(app);
    benchmark.emplace(app);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (threads == 0) threads = default_threads();
    if (generate->app->parsed()) return (*generate)(out, err);
    if (train->app->parsed()) return (*train)(threads, out, err);
    if (forecast->app->parsed()) return (*forecast)(out, err);
    if (benchmark->app->parsed()) return (*benchmark)(threads, out, err);
    return kExitUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ResourceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

}  // namespace treedox::cli
