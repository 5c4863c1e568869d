/*
 * Copyright 2026 The aucnn Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "aucnn/random_forest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aucnn/errors.h"
#include "aucnn/random.h"

namespace aucnn {
namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double impurity = 0.0;
};

double Gini(double positives, double total) {
  if (total <= 0.0) return 0.0;
  const double p = positives / total;
  return 2.0 * p * (1.0 - p);
}

class TreeBuilder {
 public:
  TreeBuilder(const double* x, int d, std::span<const int> labels,
              const ForestConfig& config, std::mt19937_64& rng)
      : x_(x), d_(d), labels_(labels), config_(config), rng_(rng) {
    features_.resize(d_);
    std::iota(features_.begin(), features_.end(), 0);
    mtry_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(d_))));
  }

  std::vector<TreeNode> Build(std::vector<int> samples) {
    nodes_.clear();
    Grow(samples, 0);
    return std::move(nodes_);
  }

 private:
  int Grow(std::vector<int>& samples, int depth) {
    const int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    int positives = 0;
    for (int s : samples) positives += labels_[s];
    const int n = static_cast<int>(samples.size());
    nodes_[id].vote = 2 * positives >= n ? 1 : 0;
    const bool pure = positives == 0 || positives == n;
    const bool depth_limited = config_.max_depth > 0 && depth >= config_.max_depth;
    if (pure || depth_limited || n < config_.min_samples_split) return id;

    const Split split = BestSplit(samples, positives);
    if (split.feature < 0) return id;
    std::vector<int> left, right;
    for (int s : samples) {
      (x_[static_cast<std::size_t>(s) * d_ + split.feature] <= split.threshold ? left : right)
          .push_back(s);
    }
    samples.clear();
    samples.shrink_to_fit();
    nodes_[id].feature = split.feature;
    nodes_[id].threshold = split.threshold;
    const int l = Grow(left, depth + 1);
    nodes_[id].left = l;
    const int r = Grow(right, depth + 1);
    nodes_[id].right = r;
    return id;
  }

  Split BestSplit(const std::vector<int>& samples, int positives) {
    const int n = static_cast<int>(samples.size());
    Split best;
    best.impurity = Gini(positives, n);
    // Partial Fisher-Yates draw of mtry candidate features.
    for (int i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<int> pick(i, d_ - 1);
      std::swap(features_[i], features_[pick(rng_)]);
    }
    std::vector<std::pair<double, int>> column(n);
    for (int c = 0; c < mtry_; ++c) {
      const int f = features_[c];
      for (int i = 0; i < n; ++i) {
        column[i] = {x_[static_cast<std::size_t>(samples[i]) * d_ + f], labels_[samples[i]]};
      }
      std::sort(column.begin(), column.end());
      int left_pos = 0;
      for (int i = 0; i + 1 < n; ++i) {
        left_pos += column[i].second;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = i + 1, nr = n - i - 1;
        const double impurity = (nl * Gini(left_pos, nl) +
                                 nr * Gini(positives - left_pos, nr)) / n;
        if (impurity < best.impurity - 1e-15) {
          best.impurity = impurity;
          best.feature = f;
          best.threshold = 0.5 * (column[i].first + column[i + 1].first);
          // Midpoint of adjacent doubles may round up to the right value.
          if (best.threshold >= column[i + 1].first) best.threshold = column[i].first;
        }
      }
    }
    return best;
  }

  const double* x_;
  int d_;
  std::span<const int> labels_;
  const ForestConfig& config_;
  std::mt19937_64& rng_;
  std::vector<int> features_;
  int mtry_;
  std::vector<TreeNode> nodes_;
};

int Vote(const std::vector<TreeNode>& tree, const double* row) {
  int node = 0;
  while (tree[node].feature >= 0) {
    node = row[tree[node].feature] <= tree[node].threshold ? tree[node].left
                                                           : tree[node].right;
  }
  return tree[node].vote;
}

}  // namespace

void RandomForest::Fit(const Tensor& features, std::span<const int> labels) {
  if (config_.trees < 1) throw ConfigError("random forest needs at least one tree");
  if (features.empty() || labels.empty()) {
    throw DataError("random forest training set is empty");
  }
  const int n = features.dim(0);
  if (static_cast<int>(labels.size()) != n) {
    throw ShapeError("label count does not match the number of feature rows");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw DataError("labels must be 0 or 1");
  }
  num_features_ = static_cast<int>(features.size() / n);
  trees_.clear();
  trees_.reserve(config_.trees);
  for (int t = 0; t < config_.trees; ++t) {
    std::mt19937_64 rng(DeriveSeed(config_.seed, "rf-tree", t));
    std::uniform_int_distribution<int> draw(0, n - 1);
    std::vector<int> bootstrap(n);
    for (int& s : bootstrap) s = draw(rng);
    TreeBuilder builder(features.data(), num_features_, labels, config_, rng);
    trees_.push_back(builder.Build(std::move(bootstrap)));
  }
}

std::vector<double> RandomForest::PredictProba(const Tensor& features) const {
  if (!fitted()) throw ConfigError("random forest is not fitted");
  const int n = features.dim(0);
  if (features.size() != static_cast<std::size_t>(n) * num_features_) {
    throw ShapeError("expected " + std::to_string(num_features_) +
                     " features per row, got tensor " + features.ShapeString());
  }
  std::vector<double> p(n);
  for (int i = 0; i < n; ++i) {
    const double* row = features.data() + static_cast<std::size_t>(i) * num_features_;
    int votes = 0;
    for (const auto& tree : trees_) votes += Vote(tree, row);
    p[i] = static_cast<double>(votes) / static_cast<double>(trees_.size());
  }
  return p;
}

nlohmann::json RandomForest::ToJson() const {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : trees_) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& node : tree) {
      nodes.push_back({node.feature, node.threshold, node.left, node.right, node.vote});
    }
    trees.push_back(std::move(nodes));
  }
  return {{"trees", config_.trees},
          {"max_depth", config_.max_depth},
          {"min_samples_split", config_.min_samples_split},
          {"seed", config_.seed},
          {"num_features", num_features_},
          {"nodes", std::move(trees)}};
}

RandomForest RandomForest::FromJson(const nlohmann::json& j) {
  ForestConfig config;
  j.at("trees").get_to(config.trees);
  j.at("max_depth").get_to(config.max_depth);
  j.at("min_samples_split").get_to(config.min_samples_split);
  j.at("seed").get_to(config.seed);
  RandomForest forest(config);
  j.at("num_features").get_to(forest.num_features_);
  for (const auto& nodes : j.at("nodes")) {
    std::vector<TreeNode> tree;
    for (const auto& n : nodes) {
      TreeNode node;
      n.at(0).get_to(node.feature);
      n.at(1).get_to(node.threshold);
      n.at(2).get_to(node.left);
      n.at(3).get_to(node.right);
      n.at(4).get_to(node.vote);
      tree.push_back(node);
    }
    forest.trees_.push_back(std::move(tree));
  }
  return forest;
}

}  // namespace aucnn
