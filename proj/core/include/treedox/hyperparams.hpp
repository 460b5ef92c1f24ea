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

// Data-driven choice of the overembedding dimension k and of the reduced
// feature set.
//
// k comes from average mutual information (AMI) between each state dimension
// and its lagged copy: tau_crit is the last lag before the AMI curve first
// drops to an insignificance threshold, and k = ceil(max_i tau_crit_i / xi) + 1.
// The reduced feature set keeps every column whose stage-1 importance reaches
// the null rate 1 / (kD).
//
// AMI is a histogram plug-in estimate in nats.

#ifndef TREEDOX_HYPERPARAMS_HPP_
#define TREEDOX_HYPERPARAMS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "treedox/embedding.hpp"

namespace treedox::hyperparams {

// Sturges' rule ceil(log2 n) + 1, capped at 64 and floored at 2.
std::size_t sturges_bins(std::size_t n);

// I(A;B) = sum p(a,b) ln[p(a,b) / (p(a) p(b))] over an n_bins x n_bins
// equal-width grid spanning the ranges of a and b. Empty cells are skipped.
// n_bins == 0 selects sturges_bins(a.size()). A constant input yields 0.
// The result is exactly symmetric in (a, b).
double average_mutual_information(std::span<const double> a,
                                  std::span<const double> b,
                                  std::size_t n_bins = 0);

// Shannon entropy (nats) of the equal-width histogram of `a`.
double histogram_entropy(std::span<const double> a, std::size_t n_bins = 0);

struct AmiCurve {
  std::size_t dim = 0;
  std::size_t n_bins = 0;
  // values[tau - 1] is the AMI at lag tau, tau = 1..values.size().
  std::vector<double> values;

  [[nodiscard]] std::size_t tau_max() const noexcept { return values.size(); }
  [[nodiscard]] double at(std::size_t tau) const { return values.at(tau - 1); }
};

// AMI between x[0 .. t - tau) and x[tau .. t) for tau = 1..tau_max on one
// state dimension. Requires t > tau_max + 1.
AmiCurve ami_curve(const TimeSeries& series, std::size_t dim,
                   std::size_t tau_max, std::size_t n_bins = 0);

// How an AMI value is judged insignificant.
enum class ThresholdRule {
  // The (1 - p) quantile of AMI between the series and shuffled copies.
  kSurrogate,
  // The p-value itself, read as an AMI level in nats.
  kAbsolute,
  // p times the lag-0 AMI I(x; x) = H(x), i.e. the curve normalized to 1.
  kNormalized,
};

const char* to_string(ThresholdRule rule) noexcept;
ThresholdRule threshold_rule_from_string(const std::string& name);

// (1 - p) quantile (nearest rank) of AMI(series, shuffle_s(series)) over
// n_surrogates shuffles; shuffle s uses Rng::stream(seed, s).
double surrogate_threshold(std::span<const double> series, double p_value,
                           std::size_t n_surrogates, std::size_t n_bins,
                           std::uint64_t seed);

struct TauCritical {
  std::size_t tau = 0;
  double threshold = 0.0;
  // True when the curve never reached the threshold; tau is then tau_max.
  bool saturated = false;
};

// Threshold on the AMI curve of `series` under `rule`.
double ami_threshold(ThresholdRule rule, std::span<const double> series,
                     double p_value, std::size_t n_bins,
                     std::size_t n_surrogates = 100, std::uint64_t seed = 0);

// tau_crit = (first lag whose AMI <= threshold) - 1.
TauCritical tau_critical(const AmiCurve& curve, double threshold);

// Convenience form computing the threshold from `training_dim`.
TauCritical tau_critical(const AmiCurve& curve,
                         std::span<const double> training_dim, double p_value,
                         std::size_t n_surrogates,
                         ThresholdRule rule = ThresholdRule::kNormalized,
                         std::uint64_t seed = 0);

// k = ceil(max_tau / xi) + 1, never below 2.
std::size_t k_from_tau(std::size_t max_tau, std::size_t xi);

struct PrescriptionOptions {
  ThresholdRule rule = ThresholdRule::kNormalized;
  // 0 = automatic: min(1000, (t - 2) / 2).
  std::size_t tau_max = 0;
  std::size_t n_bins = 0;  // 0 = Sturges on the series length
  std::size_t n_surrogates = 100;
  std::uint64_t seed = 0;
  // Keep computing the curve past the first crossing, up to tau_max.
  bool full_curves = false;
};

struct KPrescription {
  std::size_t k = 2;
  std::size_t xi = 1;
  double p_value = 0.0;
  std::vector<TauCritical> per_dim;
  std::vector<AmiCurve> curves;  // possibly truncated at the crossing
  std::vector<std::string> warnings;
};

KPrescription prescribe_k_detailed(const TimeSeries& series, std::size_t xi,
                                   double p_value,
                                   const PrescriptionOptions& options = {});

inline std::size_t prescribe_k(const TimeSeries& series, std::size_t xi,
                               double p_value,
                               const PrescriptionOptions& options = {}) {
  return prescribe_k_detailed(series, xi, p_value, options).k;
}

struct FeatureSelection {
  std::vector<std::size_t> columns;  // C, sorted
  double fi0 = 0.0;                  // 1 / (kD)
  bool fallback = false;             // all-zero importances: C = everything
};

// C = { j : fi[j] >= 1 / fi.size() }. Throws std::invalid_argument when fi
// is empty or neither sums to 1 (within 1e-6) nor is all zero.
FeatureSelection select_features(std::span<const double> fi);

// Everything the two-stage trainer decided, for --explain output and model
// files.
struct PrescriptionReport {
  std::vector<std::size_t> tau_crit;  // per dimension (empty if k was forced)
  std::vector<double> thresholds;     // per dimension
  std::size_t k = 1;
  std::size_t xi = 1;
  std::size_t lead = 1;
  double p_value = 0.0;
  ThresholdRule rule = ThresholdRule::kNormalized;
  bool k_forced = false;
  std::vector<double> feature_importances;  // stage-1, length kD
  double fi0 = 0.0;
  std::vector<std::size_t> selected_columns;
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t p() const noexcept { return selected_columns.size(); }

  // {"schema_version": 1, "k": ..., "xi": ..., "tau_crit": [...], ...}
  [[nodiscard]] std::string to_json(int indent = 2) const;
  static PrescriptionReport from_json(const std::string& text);
};

}  // namespace treedox::hyperparams

#endif  // TREEDOX_HYPERPARAMS_HPP_
