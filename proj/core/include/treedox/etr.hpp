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

// Extra-Trees regression (Geurts, Ernst, Wehenkel 2006).
//
// Every tree sees the full training set (no bootstrap). At each node a subset
// of `max_features` distinct features is drawn; for each one,
// `n_random_cuts_per_feature` cut values are drawn uniformly inside the open
// range of that feature over the node's samples, and the feature/cut pair
// with the lowest weighted MSE impurity (summed over outputs) wins. Ties go
// to the first pair encountered. Leaves hold the mean label vector of their
// samples, and the ensemble prediction is the mean over trees.
//
// Feature importances are mean decrease impurity: per tree, each split adds
// (n_node / n_total) * impurity_decrease to its feature; tree vectors are
// normalized, averaged and renormalized.

#ifndef TREEDOX_ETR_HPP_
#define TREEDOX_ETR_HPP_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "treedox/matrix.hpp"

namespace treedox::etr {

inline constexpr std::size_t kAllFeatures = 0;
inline constexpr std::size_t kUnboundedDepth = 0;

struct EtrConfig {
  std::size_t n_trees = 100;
  // kAllFeatures means every input feature is a split candidate.
  std::size_t max_features = kAllFeatures;
  std::size_t n_random_cuts_per_feature = 1;
  std::size_t min_samples_split = 2;
  std::size_t min_samples_leaf = 1;
  // kUnboundedDepth grows trees until another stop condition holds.
  std::size_t max_depth = kUnboundedDepth;
  std::uint64_t seed = 0;
  // Worker threads for fitting; 0 uses the hardware concurrency. Results do
  // not depend on this value.
  std::size_t n_threads = 1;

  // Throws std::invalid_argument when an invariant is violated.
  void validate(std::size_t n_input_features) const;
  [[nodiscard]] std::size_t resolved_max_features(
      std::size_t n_input_features) const noexcept {
    return max_features == kAllFeatures ? n_input_features : max_features;
  }

  friend bool operator==(const EtrConfig&, const EtrConfig&) = default;
};

// One node in a flat tree array. Internal nodes point at their children;
// leaves point at a value row (see Tree::leaf_value).
struct TreeNode {
  static constexpr std::uint32_t kLeaf =
      std::numeric_limits<std::uint32_t>::max();

  double cut_value = 0.0;
  double impurity_decrease = 0.0;
  std::uint32_t feature_index = kLeaf;
  // Internal: left child. Leaf: value reference.
  std::uint32_t left = 0;
  std::uint32_t right = 0;
  std::uint32_t n_samples = 0;

  [[nodiscard]] bool is_leaf() const noexcept { return feature_index == kLeaf; }
};

// A single regression tree. Node 0 is the root.
//
// Leaf values live either in the owning ensemble's copy of the training
// labels (a leaf whose samples all share one label row points at that row)
// or in the tree's own value table. A reference r < n_label_rows is a label
// row, otherwise row r - n_label_rows of `own_values`.
struct Tree {
  std::vector<TreeNode> nodes;
  std::vector<double> own_values;  // row-major, n_outputs columns

  [[nodiscard]] std::size_t n_leaves() const noexcept;
  [[nodiscard]] std::size_t depth() const noexcept;
};

class EtrEnsemble;

// Builds a tree by hand, mainly for tests and deserialization.
class TreeBuilder {
 public:
  explicit TreeBuilder(std::size_t n_outputs) : n_outputs_(n_outputs) {}

  // Returns the node index. Children are attached with set_children.
  std::uint32_t add_leaf(std::span<const double> value,
                         std::uint32_t n_samples = 1);
  std::uint32_t add_split(std::uint32_t feature_index, double cut_value,
                          double impurity_decrease, std::uint32_t n_samples);
  void set_children(std::uint32_t node, std::uint32_t left,
                    std::uint32_t right);

  [[nodiscard]] Tree build() &&;

 private:
  std::size_t n_outputs_;
  Tree tree_;
};

class EtrEnsemble {
 public:
  EtrEnsemble() = default;

  // Fits an ensemble on features (N x F) and labels (N x D_out).
  // Throws std::invalid_argument on empty or non-finite input, mismatched row
  // counts or an invalid config.
  static EtrEnsemble fit(const Matrix& features, const Matrix& labels,
                         const EtrConfig& config);

  // Assembles an ensemble from hand-built trees whose leaves all use their
  // own value tables. Importances and label bounds are derived from the
  // trees.
  static EtrEnsemble from_trees(std::vector<Tree> trees,
                                std::size_t n_input_features,
                                std::size_t n_outputs,
                                EtrConfig config = {});

  // Row m of the result is the mean over trees of the leaf reached by
  // samples row m, clamped to the training label range.
  [[nodiscard]] Matrix predict(const Matrix& samples) const;
  void predict_row(std::span<const double> sample,
                   std::span<double> out) const;

  // Leaf reached by `sample` in tree `t`.
  [[nodiscard]] std::uint32_t apply(std::size_t t,
                                    std::span<const double> sample) const;
  [[nodiscard]] std::span<const double> leaf_value(
      std::size_t t, std::uint32_t node) const noexcept;

  [[nodiscard]] const std::vector<double>& feature_importances()
      const noexcept {
    return feature_importances_;
  }

  [[nodiscard]] const std::vector<Tree>& trees() const noexcept {
    return trees_;
  }
  [[nodiscard]] std::size_t n_trees() const noexcept { return trees_.size(); }
  [[nodiscard]] std::size_t n_input_features() const noexcept {
    return n_input_features_;
  }
  [[nodiscard]] std::size_t n_outputs() const noexcept { return n_outputs_; }
  [[nodiscard]] const std::vector<double>& label_min() const noexcept {
    return label_min_;
  }
  [[nodiscard]] const std::vector<double>& label_max() const noexcept {
    return label_max_;
  }
  [[nodiscard]] const EtrConfig& config() const noexcept { return config_; }
  [[nodiscard]] std::size_t n_training_samples() const noexcept {
    return n_training_samples_;
  }

  // JSON document: {"format": "treedox.etr", "version": 1, "config": {...},
  // "n_input_features", "n_outputs", "label_min", "label_max",
  // "feature_importances", "trees": [<nested node records>]}.
  [[nodiscard]] std::string to_json() const;
  static EtrEnsemble from_json(const std::string& text);

  // Compact little-endian binary form with the same content.
  void write_binary(std::ostream& out) const;
  static EtrEnsemble read_binary(std::istream& in);

  friend bool operator==(const EtrEnsemble&, const EtrEnsemble&);

 private:
  friend class EnsembleAccess;

  void finalize();

  EtrConfig config_;
  std::size_t n_input_features_ = 0;
  std::size_t n_outputs_ = 0;
  std::size_t n_training_samples_ = 0;
  Matrix label_rows_;  // training labels referenced by leaves
  std::vector<Tree> trees_;
  std::vector<double> feature_importances_;
  std::vector<double> label_min_;
  std::vector<double> label_max_;
};

// Free-function spellings of the three core operations.
inline EtrEnsemble fit(const Matrix& features, const Matrix& labels,
                       const EtrConfig& config) {
  return EtrEnsemble::fit(features, labels, config);
}
inline Matrix predict(const EtrEnsemble& ensemble, const Matrix& samples) {
  return ensemble.predict(samples);
}
inline const std::vector<double>& feature_importances(
    const EtrEnsemble& ensemble) {
  return ensemble.feature_importances();
}

// Mean-decrease-impurity importances of a single tree, normalized to sum 1
// (all zeros for a single-leaf tree).
std::vector<double> tree_feature_importances(const Tree& tree,
                                             std::size_t n_input_features);

// Node impurity used by the fitter: the sum over outputs of the population
// variance of the labels in `rows`.
double impurity(const Matrix& labels, std::span<const std::uint32_t> rows);

}  // namespace treedox::etr

#endif  // TREEDOX_ETR_HPP_
