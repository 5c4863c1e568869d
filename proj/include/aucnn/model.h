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

#ifndef AUCNN_MODEL_H_
#define AUCNN_MODEL_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "aucnn/layers.h"
#include "aucnn/tensor.h"

namespace aucnn {

inline constexpr int kNumAUs = 17;
inline constexpr int kNumFrames = 87;

enum class Architecture { kCnnA, kCnnB, kRandomForest };

const char* ArchitectureName(Architecture arch);  // "cnn-a", "cnn-b", "rf"
Architecture ArchitectureFromName(const std::string& name);

struct ModelConfig {
  Architecture architecture = Architecture::kCnnA;
  int channels = kNumAUs;
  int timesteps = kNumFrames;
  int cnn_b_kernel = 4;
  double dropout_rate = 0.25;
  int rf_trees = 500;
  int rf_max_depth = 0;  // 0 = grow until pure
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

// Per-layer forward state of one batch. activations[i] is the input of
// layer i; activations.back() is the model output.
struct ForwardTrace {
  std::vector<Tensor> activations;
  std::vector<LayerCache> caches;
};

// Parameter gradients, indexed [layer][parameter].
using Gradients = std::vector<std::vector<Tensor>>;

// A feed-forward stack of layers ending in a single logit.
class Model {
 public:
  // `input_shape` is the per-sample shape fed to the first layer. Shapes are
  // chained through every layer; the last layer must produce one value.
  Model(ModelConfig config, std::vector<int> input_shape,
        std::vector<std::unique_ptr<Layer>> layers);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return config_; }
  const std::vector<int>& input_shape() const { return input_shape_; }
  // Per-sample output shape of every layer.
  const std::vector<std::vector<int>>& layer_shapes() const { return shapes_; }

  int num_layers() const { return static_cast<int>(layers_.size()); }
  const Layer& layer(int i) const { return *layers_.at(i); }
  Layer& mutable_layer(int i) { return *layers_.at(i); }

  // Reshapes a [N, ...] batch to [N, input_shape...]. Throws ShapeError when
  // the per-sample element count does not match.
  Tensor PrepareBatch(const Tensor& batch) const;

  // Returns logits of shape [N, 1].
  Tensor Forward(const Tensor& batch, const ForwardContext& ctx,
                 ForwardTrace* trace) const;

  // Backpropagates d(loss)/d(logits) through a recorded trace.
  Gradients Backward(const ForwardTrace& trace, const Tensor& grad_logits) const;

  // Folds the batch statistics of a train-mode trace into running estimates.
  void CommitStatistics(const ForwardTrace& trace);

  // Inference-mode logits, evaluated in chunks.
  std::vector<double> Logits(const Tensor& batch) const;

  std::size_t NumTrainableParameters() const;

  bool trained() const { return trained_; }
  void set_trained(bool trained) { trained_ = trained; }

 private:
  void ValidateChain();

  ModelConfig config_;
  std::vector<int> input_shape_;
  std::vector<std::unique_ptr<Layer>> layers_;
  std::vector<std::vector<int>> shapes_;
  bool trained_ = false;
};

// EEGNet-style temporal/depthwise/separable network.
Model BuildCnnA(const ModelConfig& config);
// Four square-kernel conv blocks followed by three dense layers.
Model BuildCnnB(const ModelConfig& config);
// Dispatches on config.architecture (CNN architectures only).
Model BuildModel(const ModelConfig& config);

// Builds a model from explicit layer specs and initializes it from `seed`.
Model BuildFromSpecs(const ModelConfig& config, std::vector<int> input_shape,
                     const std::vector<LayerSpec>& specs);

// Probability of "stuttered" for every trial of a [N,17,87] batch.
std::vector<double> PredictProba(const Model& model, const Tensor& batch);

}  // namespace aucnn

#endif  // AUCNN_MODEL_H_
