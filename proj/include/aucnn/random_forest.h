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

#ifndef AUCNN_RANDOM_FOREST_H_
#define AUCNN_RANDOM_FOREST_H_

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "aucnn/tensor.h"

namespace aucnn {

struct ForestConfig {
  int trees = 500;
  int max_depth = 0;  // 0 = grow until pure
  int min_samples_split = 2;
  std::uint64_t seed = 0;
};

// One CART node. Leaves have feature == -1 and carry the tree's vote.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;  // go left when x[feature] <= threshold
  int left = -1;
  int right = -1;
  int vote = 0;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Bagged CART classifier: Gini splits, bootstrap samples and sqrt(D)
// candidate features per split. The probability of class 1 is the fraction
// of trees voting for it.
class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(ForestConfig config) : config_(config) {}

  // `features` is [N, D] (higher ranks are flattened per sample). Throws
  // DataError for an empty training set.
  void Fit(const Tensor& features, std::span<const int> labels);
  std::vector<double> PredictProba(const Tensor& features) const;

  const ForestConfig& config() const { return config_; }
  int num_features() const { return num_features_; }
  const std::vector<std::vector<TreeNode>>& trees() const { return trees_; }
  bool fitted() const { return !trees_.empty(); }

  nlohmann::json ToJson() const;
  static RandomForest FromJson(const nlohmann::json& j);

 private:
  ForestConfig config_;
  int num_features_ = 0;
  std::vector<std::vector<TreeNode>> trees_;
};

}  // namespace aucnn

#endif  // AUCNN_RANDOM_FOREST_H_
