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

#ifndef AUCNN_CHECKPOINT_H_
#define AUCNN_CHECKPOINT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aucnn/dataset.h"
#include "aucnn/model.h"
#include "aucnn/random_forest.h"

namespace aucnn {

// Everything needed to reuse a trained model on its dataset: the network or
// forest, the normalization it was trained under and the identity of the
// held-out test trials.
struct Checkpoint {
  ModelConfig config;
  std::optional<Model> model;
  std::optional<RandomForest> forest;
  NormalizationManifest normalization;
  std::string paradigm_filter = "all";
  std::vector<std::string> test_trial_ids;
  std::string dataset_fingerprint;
  std::uint64_t train_seed = 0;
  int best_fold = 0;
};

// Doubles are stored in shortest round-trip form, so loading reproduces
// every parameter bit for bit.
nlohmann::json CheckpointToJson(const Checkpoint& checkpoint);
Checkpoint CheckpointFromJson(const nlohmann::json& j);

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint);
// Throws DataError for unreadable or malformed files.
Checkpoint LoadCheckpoint(const std::string& path);

nlohmann::json ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);

}  // namespace aucnn

#endif  // AUCNN_CHECKPOINT_H_
