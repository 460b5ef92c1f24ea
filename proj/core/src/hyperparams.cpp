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

#include "treedox/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"
#include "treedox/random.hpp"

namespace treedox::hyperparams {

std::size_t sturges_bins(std::size_t n) {
  if (n < 2) return 2;
  const auto bins = static_cast<std::size_t>(
                        std::ceil(std::log2(static_cast<double>(n)))) + 1;
  return std::clamp<std::size_t>(bins, 2, 64);
}

namespace {

// Equal-width bin index of every value; all zeros for a constant input.
std::vector<std::uint16_t> bin_values(std::span<const double> v,
                                      std::size_t n_bins) {
  std::vector<std::uint16_t> out(v.size(), 0);
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) return out;
  const double scale = static_cast<double>(n_bins) / (hi - lo);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto b = static_cast<std::size_t>((v[i] - lo) * scale);
    out[i] = static_cast<std::uint16_t>(std::min(b, n_bins - 1));
  }
  return out;
}

double mutual_information_binned(std::span<const std::uint16_t> a,
                                 std::span<const std::uint16_t> b,
                                 std::size_t n_bins) {
  const std::size_t n = a.size();
  std::vector<std::uint32_t> joint(n_bins * n_bins, 0);
  std::vector<std::uint32_t> ca(n_bins, 0), cb(n_bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    ++joint[a[i] * n_bins + b[i]];
    ++ca[a[i]];
    ++cb[b[i]];
  }
  const auto total = static_cast<double>(n);
  std::vector<double> terms;
  terms.reserve(64);
  for (std::size_t i = 0; i < n_bins; ++i) {
    for (std::size_t j = 0; j < n_bins; ++j) {
      const std::uint32_t c = joint[i * n_bins + j];
      if (c == 0) continue;
      const double pab = c / total;
      // ca * cb is commutative, so swapping (a, b) gives identical terms.
      const double ratio = (static_cast<double>(c) * total) /
                           (static_cast<double>(ca[i]) * static_cast<double>(cb[j]));
      terms.push_back(pab * std::log(ratio));
    }
  }
  // Summing in sorted order makes the result independent of which argument
  // indexes the rows.
  std::sort(terms.begin(), terms.end());
  const double mi = std::accumulate(terms.begin(), terms.end(), 0.0);
  return std::max(0.0, mi);
}

void check_pair(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("average_mutual_information: length mismatch");
  }
  if (a.size() < 2) {
    throw std::invalid_argument("average_mutual_information: need >= 2 samples");
  }
}

}  // namespace

double average_mutual_information(std::span<const double> a,
                                  std::span<const double> b,
                                  std::size_t n_bins) {
  check_pair(a, b);
  if (n_bins == 0) n_bins = sturges_bins(a.size());
  if (n_bins < 2) throw std::invalid_argument("average_mutual_information: n_bins < 2");
  const auto ba = bin_values(a, n_bins);
  const auto bb = bin_values(b, n_bins);
  return mutual_information_binned(ba, bb, n_bins);
}

double histogram_entropy(std::span<const double> a, std::size_t n_bins) {
  if (a.empty()) return 0.0;
  if (n_bins == 0) n_bins = sturges_bins(a.size());
  const auto bins = bin_values(a, n_bins);
  std::vector<std::size_t> counts(n_bins, 0);
  for (auto b : bins) ++counts[b];
  const auto total = static_cast<double>(a.size());
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

AmiCurve ami_curve(const TimeSeries& series, std::size_t dim,
                   std::size_t tau_max, std::size_t n_bins) {
  if (dim >= series.dim()) throw std::invalid_argument("ami_curve: dim out of range");
  const std::size_t t = series.t_len();
  if (tau_max < 1 || t <= tau_max + 1) {
    throw std::invalid_argument("ami_curve: tau_max " + std::to_string(tau_max) +
                                " too large for series length " +
                                std::to_string(t));
  }
  if (n_bins == 0) n_bins = sturges_bins(t);
  const auto x = series.component(dim);
  AmiCurve curve{dim, n_bins, {}};
  curve.values.reserve(tau_max);
  const std::span<const double> all(x);
  for (std::size_t tau = 1; tau <= tau_max; ++tau) {
    curve.values.push_back(average_mutual_information(
        all.first(t - tau), all.subspan(tau), n_bins));
  }
  return curve;
}

const char* to_string(ThresholdRule rule) noexcept {
  switch (rule) {
    case ThresholdRule::kSurrogate:
      return "surrogate";
    case ThresholdRule::kAbsolute:
      return "absolute";
    case ThresholdRule::kNormalized:
      return "normalized";
  }
  return "unknown";
}

ThresholdRule threshold_rule_from_string(const std::string& name) {
  if (name == "surrogate") return ThresholdRule::kSurrogate;
  if (name == "absolute") return ThresholdRule::kAbsolute;
  if (name == "normalized") return ThresholdRule::kNormalized;
  throw std::invalid_argument("unknown AMI threshold rule '" + name +
                              "' (expected normalized|surrogate|absolute)");
}

double ami_threshold(ThresholdRule rule, std::span<const double> series,
                     double p_value, std::size_t n_bins,
                     std::size_t n_surrogates, std::uint64_t seed) {
  if (!(p_value > 0.0 && p_value < 1.0)) {
    throw std::invalid_argument("ami_threshold: p_value must be in (0, 1)");
  }
  if (n_bins == 0) n_bins = sturges_bins(series.size());
  switch (rule) {
    case ThresholdRule::kAbsolute:
      return p_value;
    case ThresholdRule::kNormalized:
      return p_value * histogram_entropy(series, n_bins);
    case ThresholdRule::kSurrogate:
      break;
  }
  return surrogate_threshold(series, p_value, n_surrogates, n_bins, seed);
}

double surrogate_threshold(std::span<const double> series, double p_value,
                           std::size_t n_surrogates, std::size_t n_bins,
                           std::uint64_t seed) {
  if (!(p_value > 0.0 && p_value < 1.0)) {
    throw std::invalid_argument("surrogate_threshold: p_value must be in (0, 1)");
  }
  if (n_surrogates < 1) throw std::invalid_argument("surrogate_threshold: no surrogates");
  if (n_bins == 0) n_bins = sturges_bins(series.size());
  const auto original = bin_values(series, n_bins);
  std::vector<double> ami(n_surrogates);
  for (std::size_t s = 0; s < n_surrogates; ++s) {
    auto shuffled = original;
    Rng rng = Rng::stream(seed, s);
    shuffle(shuffled.begin(), shuffled.end(), rng);
    ami[s] = mutual_information_binned(original, shuffled, n_bins);
  }
  std::sort(ami.begin(), ami.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil((1.0 - p_value) * static_cast<double>(n_surrogates)));
  return ami[std::clamp<std::size_t>(rank, 1, n_surrogates) - 1];
}

TauCritical tau_critical(const AmiCurve& curve, double threshold) {
  for (std::size_t tau = 1; tau <= curve.tau_max(); ++tau) {
    if (curve.at(tau) <= threshold) return {tau - 1, threshold, false};
  }
  return {curve.tau_max(), threshold, true};
}

TauCritical tau_critical(const AmiCurve& curve,
                         std::span<const double> training_dim, double p_value,
                         std::size_t n_surrogates, ThresholdRule rule,
                         std::uint64_t seed) {
  if (!(p_value > 0.0 && p_value < 1.0)) {
    throw std::invalid_argument("tau_critical: p_value must be in (0, 1)");
  }
  const double threshold = ami_threshold(rule, training_dim, p_value,
                                         curve.n_bins, n_surrogates, seed);
  return tau_critical(curve, threshold);
}

std::size_t k_from_tau(std::size_t max_tau, std::size_t xi) {
  if (xi < 1) throw std::invalid_argument("k_from_tau: xi must be >= 1");
  return std::max<std::size_t>(2, (max_tau + xi - 1) / xi + 1);
}

KPrescription prescribe_k_detailed(const TimeSeries& series, std::size_t xi,
                                   double p_value,
                                   const PrescriptionOptions& options) {
  if (xi < 1) throw std::invalid_argument("prescribe_k: xi must be >= 1");
  if (!(p_value > 0.0 && p_value < 1.0)) {
    throw std::invalid_argument("prescribe_k: p_value must be in (0, 1)");
  }
  const std::size_t t = series.t_len();
  if (t < 4) throw std::invalid_argument("prescribe_k: series too short");
  std::size_t tau_max = options.tau_max;
  if (tau_max == 0) tau_max = std::min<std::size_t>(1000, (t - 2) / 2);
  if (t <= tau_max + 1) {
    throw std::invalid_argument("prescribe_k: tau_max " + std::to_string(tau_max) +
                                " too large for series length " +
                                std::to_string(t));
  }
  const std::size_t n_bins = options.n_bins ? options.n_bins : sturges_bins(t);

  KPrescription out;
  out.xi = xi;
  out.p_value = p_value;
  std::size_t max_tau = 0;
  for (std::size_t d = 0; d < series.dim(); ++d) {
    const auto x = series.component(d);
    const double threshold = ami_threshold(options.rule, x, p_value, n_bins,
                                           options.n_surrogates, options.seed + d);
    AmiCurve curve{d, n_bins, {}};
    const std::span<const double> all(x);
    TauCritical tc{tau_max, threshold, true};
    for (std::size_t tau = 1; tau <= tau_max; ++tau) {
      const double v =
          average_mutual_information(all.first(t - tau), all.subspan(tau), n_bins);
      curve.values.push_back(v);
      if (tc.saturated && v <= threshold) {
        tc = {tau - 1, threshold, false};
        if (!options.full_curves) break;
      }
    }
    if (tc.saturated) {
      out.warnings.push_back("AMI of dimension " + std::to_string(d) +
                             " never fell to the threshold " +
                             std::to_string(threshold) + " within tau_max = " +
                             std::to_string(tau_max) + "; using tau_crit = tau_max");
    }
    max_tau = std::max(max_tau, tc.tau);
    out.per_dim.push_back(tc);
    out.curves.push_back(std::move(curve));
  }
  out.k = k_from_tau(max_tau, xi);
  return out;
}

FeatureSelection select_features(std::span<const double> fi) {
  if (fi.empty()) throw std::invalid_argument("select_features: empty importances");
  const double sum = std::accumulate(fi.begin(), fi.end(), 0.0);
  const bool all_zero =
      std::all_of(fi.begin(), fi.end(), [](double v) { return v == 0.0; });
  if (!all_zero && std::abs(sum - 1.0) > 1e-6) {
    throw std::invalid_argument("select_features: importances sum to " +
                                std::to_string(sum) + ", expected 1");
  }
  FeatureSelection sel;
  sel.fi0 = 1.0 / static_cast<double>(fi.size());
  for (std::size_t j = 0; j < fi.size(); ++j) {
    if (fi[j] >= sel.fi0) sel.columns.push_back(j);
  }
  if (sel.columns.empty()) {
    sel.fallback = true;
    sel.columns.resize(fi.size());
    std::iota(sel.columns.begin(), sel.columns.end(), std::size_t{0});
  }
  return sel;
}

std::string PrescriptionReport::to_json(int indent) const {
  nlohmann::json j = {{"schema_version", 1},
                      {"k", k},
                      {"xi", xi},
                      {"lead", lead},
                      {"p_value", p_value},
                      {"threshold_rule", hyperparams::to_string(rule)},
                      {"k_forced", k_forced},
                      {"tau_crit", tau_crit},
                      {"thresholds", thresholds},
                      {"feature_importances", feature_importances},
                      {"fi0", fi0},
                      {"selected_columns", selected_columns},
                      {"p", p()},
                      {"warnings", warnings}};
  return j.dump(indent);
}

PrescriptionReport PrescriptionReport::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PrescriptionReport r;
  r.k = j.at("k").get<std::size_t>();
  r.xi = j.at("xi").get<std::size_t>();
  r.lead = j.at("lead").get<std::size_t>();
  r.p_value = j.at("p_value").get<double>();
  r.rule = threshold_rule_from_string(j.at("threshold_rule").get<std::string>());
  r.k_forced = j.at("k_forced").get<bool>();
  r.tau_crit = j.at("tau_crit").get<std::vector<std::size_t>>();
  r.thresholds = j.at("thresholds").get<std::vector<double>>();
  r.feature_importances = j.at("feature_importances").get<std::vector<double>>();
  r.fi0 = j.at("fi0").get<double>();
  r.selected_columns = j.at("selected_columns").get<std::vector<std::size_t>>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

}  // namespace treedox::hyperparams
