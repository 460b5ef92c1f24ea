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

#include "treedox/etr.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

#include "treedox/random.hpp"

namespace treedox::etr {

void EtrConfig::validate(std::size_t n_input_features) const {
  if (n_trees < 1) throw std::invalid_argument("EtrConfig: n_trees must be >= 1");
  const std::size_t mf = resolved_max_features(n_input_features);
  if (mf < 1 || mf > n_input_features) {
    throw std::invalid_argument(
        "EtrConfig: max_features must be in [1, " +
        std::to_string(n_input_features) + "], got " + std::to_string(mf));
  }
  if (n_random_cuts_per_feature < 1) {
    throw std::invalid_argument(
        "EtrConfig: n_random_cuts_per_feature must be >= 1");
  }
  if (min_samples_split < 2) {
    throw std::invalid_argument("EtrConfig: min_samples_split must be >= 2");
  }
  if (min_samples_leaf < 1) {
    throw std::invalid_argument("EtrConfig: min_samples_leaf must be >= 1");
  }
}

std::size_t Tree::n_leaves() const noexcept {
  return static_cast<std::size_t>(std::count_if(
      nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

std::size_t Tree::depth() const noexcept {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    const TreeNode& n = nodes[id];
    if (!n.is_leaf()) {
      stack.emplace_back(n.left, d + 1);
      stack.emplace_back(n.right, d + 1);
    }
  }
  return best;
}

std::uint32_t TreeBuilder::add_leaf(std::span<const double> value,
                                    std::uint32_t n_samples) {
  if (value.size() != n_outputs_) {
    throw std::invalid_argument("TreeBuilder: leaf value has wrong size");
  }
  TreeNode node;
  node.left = static_cast<std::uint32_t>(tree_.own_values.size() / n_outputs_);
  node.n_samples = n_samples;
  tree_.own_values.insert(tree_.own_values.end(), value.begin(), value.end());
  tree_.nodes.push_back(node);
  return static_cast<std::uint32_t>(tree_.nodes.size() - 1);
}

std::uint32_t TreeBuilder::add_split(std::uint32_t feature_index,
                                     double cut_value,
                                     double impurity_decrease,
                                     std::uint32_t n_samples) {
  TreeNode node;
  node.feature_index = feature_index;
  node.cut_value = cut_value;
  node.impurity_decrease = impurity_decrease;
  node.n_samples = n_samples;
  tree_.nodes.push_back(node);
  return static_cast<std::uint32_t>(tree_.nodes.size() - 1);
}

void TreeBuilder::set_children(std::uint32_t node, std::uint32_t left,
                               std::uint32_t right) {
  tree_.nodes.at(node).left = left;
  tree_.nodes.at(node).right = right;
}

Tree TreeBuilder::build() && {
  if (tree_.nodes.empty()) throw std::invalid_argument("TreeBuilder: empty tree");
  // Hand-built trees have no label table, so references index own_values.
  return std::move(tree_);
}

double impurity(const Matrix& labels, std::span<const std::uint32_t> rows) {
  if (rows.empty()) return 0.0;
  const std::size_t d_out = labels.cols();
  const auto n = static_cast<double>(rows.size());
  double total = 0.0;
  for (std::size_t d = 0; d < d_out; ++d) {
    double mean = 0.0;
    for (auto r : rows) mean += labels(r, d);
    mean /= n;
    double ss = 0.0;
    for (auto r : rows) {
      const double e = labels(r, d) - mean;
      ss += e * e;
    }
    total += ss / n;
  }
  return total;
}

std::vector<double> tree_feature_importances(const Tree& tree,
                                             std::size_t n_input_features) {
  std::vector<double> fi(n_input_features, 0.0);
  if (tree.nodes.empty() || tree.nodes.front().n_samples == 0) return fi;
  const auto n_total = static_cast<double>(tree.nodes.front().n_samples);
  for (const TreeNode& node : tree.nodes) {
    if (node.is_leaf()) continue;
    fi.at(node.feature_index) +=
        (static_cast<double>(node.n_samples) / n_total) * node.impurity_decrease;
  }
  const double sum = std::accumulate(fi.begin(), fi.end(), 0.0);
  if (sum > 0.0) {
    for (double& v : fi) v /= sum;
  }
  return fi;
}

namespace {

// State shared by all trees during one fit.
struct FitData {
  std::size_t n_samples;
  std::size_t n_features;
  std::size_t n_outputs;
  std::vector<double> columns;  // feature-major copy: columns[f * N + i]
  const Matrix* labels;
  EtrConfig config;
  std::size_t max_features;

  [[nodiscard]] const double* column(std::size_t f) const noexcept {
    return columns.data() + f * n_samples;
  }
};

struct NodeStats {
  std::vector<double> sum;  // per output
  double impurity = 0.0;
  bool identical = false;
};

struct Candidate {
  std::uint32_t feature = TreeNode::kLeaf;
  double cut = 0.0;
  double score = -std::numeric_limits<double>::infinity();
};

class TreeGrower {
 public:
  TreeGrower(const FitData& data, Rng rng)
      : data_(data),
        rng_(rng),
        features_(data.n_features),
        values_(data.n_samples),
        scratch_(data.n_samples),
        left_sum_(data.n_outputs) {
    std::iota(features_.begin(), features_.end(), 0U);
  }

  Tree grow() {
    const std::size_t n = data_.n_samples;
    std::vector<std::uint32_t> rows(n);
    std::iota(rows.begin(), rows.end(), 0U);
    rows_ = std::move(rows);

    Tree tree;
    tree.nodes.reserve(2 * n);
    tree.nodes.emplace_back();

    struct Work {
      std::uint32_t node;
      std::size_t begin, end, depth;
      NodeStats stats;
    };
    std::vector<Work> stack;
    stack.push_back({0, 0, n, 0, stats_of(0, n)});

    while (!stack.empty()) {
      Work w = std::move(stack.back());
      stack.pop_back();
      const std::size_t count = w.end - w.begin;
      tree.nodes[w.node].n_samples = static_cast<std::uint32_t>(count);

      Candidate best;
      const bool can_split =
          count >= data_.config.min_samples_split && !w.stats.identical &&
          (data_.config.max_depth == kUnboundedDepth ||
           w.depth < data_.config.max_depth);
      if (can_split) best = find_split(w.begin, w.end, w.stats);

      if (best.feature == TreeNode::kLeaf) {
        make_leaf(tree, w.node, w.begin, w.end, w.stats);
        continue;
      }

      const std::size_t mid = partition(w.begin, w.end, best.feature, best.cut);
      NodeStats left = stats_of(w.begin, mid);
      NodeStats right = stats_of(mid, w.end);
      const auto n_node = static_cast<double>(count);
      const double decrease =
          w.stats.impurity -
          (static_cast<double>(mid - w.begin) / n_node) * left.impurity -
          (static_cast<double>(w.end - mid) / n_node) * right.impurity;

      const auto left_id = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[w.node];
      node.feature_index = best.feature;
      node.cut_value = best.cut;
      node.impurity_decrease = std::max(0.0, decrease);
      node.left = left_id;
      node.right = left_id + 1;

      // Right is pushed first so the left subtree is grown first.
      stack.push_back({left_id + 1, mid, w.end, w.depth + 1, std::move(right)});
      stack.push_back({left_id, w.begin, mid, w.depth + 1, std::move(left)});
    }
    tree.nodes.shrink_to_fit();
    tree.own_values.shrink_to_fit();
    return tree;
  }

 private:
  NodeStats stats_of(std::size_t begin, std::size_t end) const {
    const std::size_t d_out = data_.n_outputs;
    const Matrix& y = *data_.labels;
    NodeStats s;
    s.sum.assign(d_out, 0.0);
    s.identical = true;
    const auto first = y.row(rows_[begin]);
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = y.row(rows_[i]);
      for (std::size_t d = 0; d < d_out; ++d) {
        s.sum[d] += row[d];
        if (row[d] != first[d]) s.identical = false;
      }
    }
    s.impurity = s.identical ? 0.0
                             : impurity(y, std::span<const std::uint32_t>(
                                               rows_.data() + begin, end - begin));
    return s;
  }

  Candidate find_split(std::size_t begin, std::size_t end,
                       const NodeStats& stats) {
    const std::size_t count = end - begin;
    const std::size_t min_leaf = data_.config.min_samples_leaf;
    if (count < 2 * min_leaf) return {};

    const std::size_t d_out = data_.n_outputs;
    const Matrix& y = *data_.labels;
    const auto n_node = static_cast<double>(count);

    Candidate best;
    // Partial Fisher-Yates draw of max_features distinct candidates.
    const std::size_t n_features = data_.n_features;
    for (std::size_t c = 0; c < data_.max_features; ++c) {
      const std::size_t pick = c + rng_.below(n_features - c);
      std::swap(features_[c], features_[pick]);
      const std::uint32_t f = features_[c];

      const double* col = data_.column(f);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      for (std::size_t i = 0; i < count; ++i) {
        const double v = col[rows_[begin + i]];
        values_[i] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }

      for (std::size_t r = 0; r < data_.config.n_random_cuts_per_feature; ++r) {
        // Drawn even for constant features so the stream does not depend on
        // the data layout of other features.
        const double u = rng_.uniform_open();
        if (!(hi > lo)) continue;
        double cut = lo + u * (hi - lo);
        if (!(cut > lo && cut < hi)) cut = lo + 0.5 * (hi - lo);
        if (!(cut > lo && cut < hi)) continue;

        double score = 0.0;
        std::size_t n_left = 0;
        if (d_out == 1) {
          double sl = 0.0;
          const double* ys = y.data().data();
          for (std::size_t i = 0; i < count; ++i) {
            if (values_[i] <= cut) {
              ++n_left;
              sl += ys[rows_[begin + i]];
            }
          }
          const std::size_t n_right = count - n_left;
          if (n_left < min_leaf || n_right < min_leaf) continue;
          const double sr = stats.sum[0] - sl;
          score = sl * sl / static_cast<double>(n_left) +
                  sr * sr / static_cast<double>(n_right);
        } else {
          for (std::size_t i = 0; i < count; ++i) n_left += values_[i] <= cut;
          const std::size_t n_right = count - n_left;
          if (n_left < min_leaf || n_right < min_leaf) continue;
          // Accumulate the smaller side, derive the other from the total.
          const bool sum_left = n_left <= n_right;
          std::fill(left_sum_.begin(), left_sum_.end(), 0.0);
          for (std::size_t i = 0; i < count; ++i) {
            if ((values_[i] <= cut) == sum_left) {
              const auto row = y.row(rows_[begin + i]);
              for (std::size_t d = 0; d < d_out; ++d) left_sum_[d] += row[d];
            }
          }
          double sq_small = 0.0, sq_large = 0.0;
          for (std::size_t d = 0; d < d_out; ++d) {
            const double other = stats.sum[d] - left_sum_[d];
            sq_small += left_sum_[d] * left_sum_[d];
            sq_large += other * other;
          }
          const auto n_small = static_cast<double>(sum_left ? n_left : n_right);
          score = sq_small / n_small + sq_large / (n_node - n_small);
        }
        if (score > best.score) best = {f, cut, score};
      }
    }
    return best;
  }

  // Stable partition of rows_[begin, end) into (x <= cut, x > cut).
  std::size_t partition(std::size_t begin, std::size_t end, std::uint32_t f,
                        double cut) {
    const double* col = data_.column(f);
    std::size_t l = begin, r = 0;
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint32_t row = rows_[i];
      if (col[row] <= cut) {
        rows_[l++] = row;
      } else {
        scratch_[r++] = row;
      }
    }
    std::copy_n(scratch_.begin(), r, rows_.begin() + static_cast<std::ptrdiff_t>(l));
    return l;
  }

  void make_leaf(Tree& tree, std::uint32_t id, std::size_t begin,
                 std::size_t end, const NodeStats& stats) {
    TreeNode& node = tree.nodes[id];
    node.feature_index = TreeNode::kLeaf;
    if (stats.identical) {
      node.left = rows_[begin];
      return;
    }
    const std::size_t d_out = data_.n_outputs;
    const Matrix& y = *data_.labels;
    const auto n = static_cast<double>(end - begin);
    node.left = static_cast<std::uint32_t>(
        data_.n_samples + tree.own_values.size() / d_out);
    for (std::size_t d = 0; d < d_out; ++d) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = begin; i < end; ++i) {
        const double v = y(rows_[i], d);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      tree.own_values.push_back(std::clamp(stats.sum[d] / n, lo, hi));
    }
  }

  const FitData& data_;
  Rng rng_;
  std::vector<std::uint32_t> features_;
  std::vector<std::uint32_t> rows_;
  std::vector<double> values_;
  std::vector<std::uint32_t> scratch_;
  std::vector<double> left_sum_;
};

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1U, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

}  // namespace

EtrEnsemble EtrEnsemble::fit(const Matrix& features, const Matrix& labels,
                             const EtrConfig& config) {
  if (features.rows() == 0 || features.cols() == 0) {
    throw std::invalid_argument("etr::fit: empty feature matrix");
  }
  if (labels.rows() != features.rows() || labels.cols() == 0) {
    throw std::invalid_argument(
        "etr::fit: labels must have one non-empty row per feature row (" +
        std::to_string(labels.rows()) + " vs " +
        std::to_string(features.rows()) + ")");
  }
  if (features.rows() >= TreeNode::kLeaf / 2) {
    throw std::invalid_argument("etr::fit: too many samples");
  }
  if (!features.all_finite() || !labels.all_finite()) {
    throw std::invalid_argument("etr::fit: non-finite value in input");
  }
  config.validate(features.cols());

  FitData data;
  data.n_samples = features.rows();
  data.n_features = features.cols();
  data.n_outputs = labels.cols();
  data.labels = &labels;
  data.config = config;
  data.max_features = config.resolved_max_features(features.cols());
  data.columns.resize(data.n_samples * data.n_features);
  for (std::size_t i = 0; i < data.n_samples; ++i) {
    const auto row = features.row(i);
    for (std::size_t f = 0; f < data.n_features; ++f) {
      data.columns[f * data.n_samples + i] = row[f];
    }
  }

  EtrEnsemble ensemble;
  ensemble.config_ = config;
  ensemble.n_input_features_ = features.cols();
  ensemble.n_outputs_ = labels.cols();
  ensemble.n_training_samples_ = features.rows();
  ensemble.trees_.resize(config.n_trees);

  const std::size_t workers = worker_count(config.n_threads, config.n_trees);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < config.n_trees; t = next++) {
      TreeGrower grower(data, Rng::stream(config.seed, t));
      ensemble.trees_[t] = grower.grow();
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  ensemble.label_rows_ = labels;
  ensemble.finalize();
  return ensemble;
}

EtrEnsemble EtrEnsemble::from_trees(std::vector<Tree> trees,
                                    std::size_t n_input_features,
                                    std::size_t n_outputs, EtrConfig config) {
  if (trees.empty()) throw std::invalid_argument("from_trees: no trees");
  if (n_outputs == 0 || n_input_features == 0) {
    throw std::invalid_argument("from_trees: zero-sized input or output");
  }
  for (const Tree& tree : trees) {
    if (tree.nodes.empty()) throw std::invalid_argument("from_trees: empty tree");
    const std::size_t n_values = tree.own_values.size() / n_outputs;
    for (const TreeNode& node : tree.nodes) {
      if (node.is_leaf()) {
        if (node.left >= n_values) {
          throw std::invalid_argument("from_trees: leaf value out of range");
        }
      } else if (node.feature_index >= n_input_features ||
                 node.left >= tree.nodes.size() ||
                 node.right >= tree.nodes.size()) {
        throw std::invalid_argument("from_trees: malformed internal node");
      }
    }
  }
  EtrEnsemble ensemble;
  config.n_trees = trees.size();
  ensemble.config_ = config;
  ensemble.n_input_features_ = n_input_features;
  ensemble.n_outputs_ = n_outputs;
  ensemble.n_training_samples_ = trees.front().nodes.front().n_samples;
  ensemble.label_rows_ = Matrix(0, n_outputs);
  ensemble.trees_ = std::move(trees);
  ensemble.finalize();
  return ensemble;
}

void EtrEnsemble::finalize() {
  feature_importances_.assign(n_input_features_, 0.0);
  std::size_t contributing = 0;
  for (const Tree& tree : trees_) {
    const auto fi = tree_feature_importances(tree, n_input_features_);
    if (std::accumulate(fi.begin(), fi.end(), 0.0) <= 0.0) continue;
    ++contributing;
    for (std::size_t f = 0; f < fi.size(); ++f) feature_importances_[f] += fi[f];
  }
  if (contributing > 0) {
    const double sum = std::accumulate(feature_importances_.begin(),
                                       feature_importances_.end(), 0.0);
    for (double& v : feature_importances_) v /= sum;
  }

  label_min_.assign(n_outputs_, std::numeric_limits<double>::infinity());
  label_max_.assign(n_outputs_, -std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    for (std::uint32_t id = 0; id < trees_[t].nodes.size(); ++id) {
      if (!trees_[t].nodes[id].is_leaf()) continue;
      const auto value = leaf_value(t, id);
      for (std::size_t d = 0; d < n_outputs_; ++d) {
        label_min_[d] = std::min(label_min_[d], value[d]);
        label_max_[d] = std::max(label_max_[d], value[d]);
      }
    }
  }
  for (std::size_t r = 0; r < label_rows_.rows(); ++r) {
    for (std::size_t d = 0; d < n_outputs_; ++d) {
      label_min_[d] = std::min(label_min_[d], label_rows_(r, d));
      label_max_[d] = std::max(label_max_[d], label_rows_(r, d));
    }
  }
}

std::span<const double> EtrEnsemble::leaf_value(
    std::size_t t, std::uint32_t node) const noexcept {
  const std::uint32_t ref = trees_[t].nodes[node].left;
  if (ref < label_rows_.rows()) return label_rows_.row(ref);
  const std::size_t own = ref - label_rows_.rows();
  return {trees_[t].own_values.data() + own * n_outputs_, n_outputs_};
}

std::uint32_t EtrEnsemble::apply(std::size_t t,
                                 std::span<const double> sample) const {
  const auto& nodes = trees_[t].nodes;
  std::uint32_t id = 0;
  while (!nodes[id].is_leaf()) {
    const TreeNode& n = nodes[id];
    id = sample[n.feature_index] <= n.cut_value ? n.left : n.right;
  }
  return id;
}

void EtrEnsemble::predict_row(std::span<const double> sample,
                              std::span<double> out) const {
  if (sample.size() != n_input_features_ || out.size() != n_outputs_) {
    throw std::invalid_argument(
        "etr::predict: expected " + std::to_string(n_input_features_) +
        " features, got " + std::to_string(sample.size()));
  }
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    const auto value = leaf_value(t, apply(t, sample));
    for (std::size_t d = 0; d < n_outputs_; ++d) out[d] += value[d];
  }
  const auto n = static_cast<double>(trees_.size());
  for (std::size_t d = 0; d < n_outputs_; ++d) {
    out[d] = std::clamp(out[d] / n, label_min_[d], label_max_[d]);
  }
}

Matrix EtrEnsemble::predict(const Matrix& samples) const {
  if (samples.cols() != n_input_features_) {
    throw std::invalid_argument(
        "etr::predict: expected " + std::to_string(n_input_features_) +
        " feature columns, got " + std::to_string(samples.cols()));
  }
  Matrix out(samples.rows(), n_outputs_);
  for (std::size_t m = 0; m < samples.rows(); ++m) {
    predict_row(samples.row(m), out.row(m));
  }
  return out;
}

bool operator==(const EtrEnsemble& a, const EtrEnsemble& b) {
  if (a.n_input_features_ != b.n_input_features_ ||
      a.n_outputs_ != b.n_outputs_ || a.trees_.size() != b.trees_.size() ||
      a.feature_importances_ != b.feature_importances_ ||
      a.label_min_ != b.label_min_ || a.label_max_ != b.label_max_) {
    return false;
  }
  for (std::size_t t = 0; t < a.trees_.size(); ++t) {
    const auto& na = a.trees_[t].nodes;
    const auto& nb = b.trees_[t].nodes;
    if (na.size() != nb.size()) return false;
    for (std::uint32_t i = 0; i < na.size(); ++i) {
      if (na[i].is_leaf() != nb[i].is_leaf() ||
          na[i].n_samples != nb[i].n_samples) {
        return false;
      }
      if (na[i].is_leaf()) {
        const auto va = a.leaf_value(t, i);
        const auto vb = b.leaf_value(t, i);
        if (!std::equal(va.begin(), va.end(), vb.begin(), vb.end())) return false;
      } else if (na[i].feature_index != nb[i].feature_index ||
                 na[i].cut_value != nb[i].cut_value ||
                 na[i].impurity_decrease != nb[i].impurity_decrease ||
                 na[i].left != nb[i].left || na[i].right != nb[i].right) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace treedox::etr
