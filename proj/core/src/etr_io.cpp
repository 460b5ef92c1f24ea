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

// JSON and binary serialization of EtrEnsemble.

#include <algorithm>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "etr_json.hpp"
#include "json.hpp"
#include "treedox/etr.hpp"

namespace treedox::etr {

using nlohmann::json;

namespace {

constexpr int kJsonVersion = 1;
constexpr char kBinaryMagic[8] = {'T', 'D', 'X', 'E', 'T', 'R', '\0', '\1'};
constexpr std::uint32_t kBinaryVersion = 1;

json node_to_json(const EtrEnsemble& e, std::size_t t, std::uint32_t id) {
  const TreeNode& n = e.trees()[t].nodes[id];
  if (n.is_leaf()) {
    const auto v = e.leaf_value(t, id);
    return {{"n_samples", n.n_samples},
            {"value", std::vector<double>(v.begin(), v.end())}};
  }
  return {{"feature", n.feature_index},
          {"cut", n.cut_value},
          {"impurity_decrease", n.impurity_decrease},
          {"n_samples", n.n_samples},
          {"left", node_to_json(e, t, n.left)},
          {"right", node_to_json(e, t, n.right)}};
}

// Rebuilds the node numbering used by the fitter: a split allocates both
// children consecutively and the left subtree is expanded first.
Tree tree_from_json(const json& root, std::size_t n_outputs) {
  Tree tree;
  tree.nodes.emplace_back();
  std::vector<std::pair<std::uint32_t, const json*>> stack{{0, &root}};
  while (!stack.empty()) {
    auto [id, rec] = stack.back();
    stack.pop_back();
    TreeNode node;
    node.n_samples = rec->at("n_samples").get<std::uint32_t>();
    if (rec->contains("value")) {
      const auto value = rec->at("value").get<std::vector<double>>();
      if (value.size() != n_outputs) {
        throw std::invalid_argument("etr json: leaf value has wrong size");
      }
      node.left = static_cast<std::uint32_t>(tree.own_values.size() / n_outputs);
      tree.own_values.insert(tree.own_values.end(), value.begin(), value.end());
      tree.nodes[id] = node;
      continue;
    }
    node.feature_index = rec->at("feature").get<std::uint32_t>();
    node.cut_value = rec->at("cut").get<double>();
    node.impurity_decrease = rec->at("impurity_decrease").get<double>();
    node.left = static_cast<std::uint32_t>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes[id] = node;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    stack.emplace_back(node.right, &rec->at("right"));
    stack.emplace_back(node.left, &rec->at("left"));
  }
  return tree;
}

}  // namespace

json config_to_json(const EtrConfig& c) {
  return {{"n_trees", c.n_trees},
          {"max_features", c.max_features},
          {"n_random_cuts_per_feature", c.n_random_cuts_per_feature},
          {"min_samples_split", c.min_samples_split},
          {"min_samples_leaf", c.min_samples_leaf},
          {"max_depth", c.max_depth},
          {"seed", c.seed}};
}

EtrConfig config_from_json(const json& j) {
  EtrConfig c;
  c.n_trees = j.value("n_trees", c.n_trees);
  c.max_features = j.value("max_features", c.max_features);
  c.n_random_cuts_per_feature =
      j.value("n_random_cuts_per_feature", c.n_random_cuts_per_feature);
  c.min_samples_split = j.value("min_samples_split", c.min_samples_split);
  c.min_samples_leaf = j.value("min_samples_leaf", c.min_samples_leaf);
  c.max_depth = j.value("max_depth", c.max_depth);
  c.seed = j.value("seed", c.seed);
  c.n_threads = j.value("n_threads", c.n_threads);
  return c;
}

std::string EtrEnsemble::to_json() const {
  json trees = json::array();
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    trees.push_back(node_to_json(*this, t, 0));
  }
  json doc = {{"format", "treedox.etr"},
              {"version", kJsonVersion},
              {"config", config_to_json(config_)},
              {"n_input_features", n_input_features_},
              {"n_outputs", n_outputs_},
              {"n_training_samples", n_training_samples_},
              {"label_min", label_min_},
              {"label_max", label_max_},
              {"feature_importances", feature_importances_},
              {"trees", std::move(trees)}};
  return doc.dump();
}

EtrEnsemble EtrEnsemble::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("etr json: ") + e.what());
  }
  if (doc.value("format", "") != "treedox.etr") {
    throw std::invalid_argument("etr json: not a treedox.etr document");
  }
  if (doc.at("version").get<int>() != kJsonVersion) {
    throw std::invalid_argument("etr json: unsupported version " +
                                doc.at("version").dump());
  }
  const auto n_in = doc.at("n_input_features").get<std::size_t>();
  const auto n_out = doc.at("n_outputs").get<std::size_t>();
  std::vector<Tree> trees;
  for (const auto& rec : doc.at("trees")) trees.push_back(tree_from_json(rec, n_out));
  EtrEnsemble e =
      from_trees(std::move(trees), n_in, n_out, config_from_json(doc.at("config")));
  e.n_training_samples_ = doc.value("n_training_samples", e.n_training_samples_);
  // Stored bounds come from the full label set, which may be wider than the
  // leaf values alone.
  e.label_min_ = doc.at("label_min").get<std::vector<double>>();
  e.label_max_ = doc.at("label_max").get<std::vector<double>>();
  return e;
}

void EtrEnsemble::write_binary(std::ostream& out) const {
  BinaryWriter w(out);
  w.bytes(kBinaryMagic, sizeof kBinaryMagic);
  w.u32(kBinaryVersion);
  w.str(config_to_json(config_).dump());
  w.u64(n_input_features_);
  w.u64(n_outputs_);
  w.u64(n_training_samples_);
  w.matrix(label_rows_);
  w.doubles(label_min_);
  w.doubles(label_max_);
  w.u64(trees_.size());
  for (const Tree& tree : trees_) {
    w.u64(tree.nodes.size());
    for (const TreeNode& n : tree.nodes) {
      w.f64(n.cut_value);
      w.f64(n.impurity_decrease);
      w.u32(n.feature_index);
      w.u32(n.left);
      w.u32(n.right);
      w.u32(n.n_samples);
    }
    w.doubles(tree.own_values);
  }
  if (!out) throw std::runtime_error("etr: write failed");
}

EtrEnsemble EtrEnsemble::read_binary(std::istream& in) {
  BinaryReader r(in);
  char magic[sizeof kBinaryMagic];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kBinaryMagic, sizeof magic) != 0) {
    throw std::invalid_argument("etr binary: bad magic");
  }
  if (const auto v = r.u32(); v != kBinaryVersion) {
    throw std::invalid_argument("etr binary: unsupported version " +
                                std::to_string(v));
  }
  EtrEnsemble e;
  e.config_ = config_from_json(json::parse(r.str()));
  e.n_input_features_ = r.u64();
  e.n_outputs_ = r.u64();
  e.n_training_samples_ = r.u64();
  e.label_rows_ = r.matrix();
  e.label_min_ = r.doubles();
  e.label_max_ = r.doubles();
  const auto n_trees = r.u64();
  e.trees_.resize(n_trees);
  for (Tree& tree : e.trees_) {
    tree.nodes.resize(r.u64());
    for (TreeNode& n : tree.nodes) {
      n.cut_value = r.f64();
      n.impurity_decrease = r.f64();
      n.feature_index = r.u32();
      n.left = r.u32();
      n.right = r.u32();
      n.n_samples = r.u32();
    }
    tree.own_values = r.doubles();
    const std::size_t n_refs =
        e.label_rows_.rows() + tree.own_values.size() / std::max<std::size_t>(1, e.n_outputs_);
    for (const TreeNode& n : tree.nodes) {
      const bool ok = n.is_leaf() ? n.left < n_refs
                                  : (n.feature_index < e.n_input_features_ &&
                                     n.left < tree.nodes.size() &&
                                     n.right < tree.nodes.size());
      if (!ok) throw std::invalid_argument("etr binary: malformed tree");
    }
  }
  const auto bounds_min = e.label_min_;
  const auto bounds_max = e.label_max_;
  e.finalize();
  e.label_min_ = bounds_min;
  e.label_max_ = bounds_max;
  return e;
}

}  // namespace treedox::etr
