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

#include "aucnn/model.h"

#include <algorithm>
#include <random>
#include <utility>

#include "aucnn/errors.h"
#include "aucnn/kernels.h"

namespace aucnn {
namespace {

using kernels::Padding;

constexpr int kInferenceChunk = 256;

}  // namespace

const char* ArchitectureName(Architecture arch) {
  switch (arch) {
    case Architecture::kCnnA: return "cnn-a";
    case Architecture::kCnnB: return "cnn-b";
    case Architecture::kRandomForest: return "rf";
  }
  return "unknown";
}

Architecture ArchitectureFromName(const std::string& name) {
  if (name == "cnn-a" || name == "CNN_A") return Architecture::kCnnA;
  if (name == "cnn-b" || name == "CNN_B") return Architecture::kCnnB;
  if (name == "rf" || name == "RF") return Architecture::kRandomForest;
  throw ConfigError("unknown architecture '" + name + "'");
}

void ModelConfig::Validate() const {
  if (channels != kNumAUs || timesteps != kNumFrames) {
    throw ConfigError("input shape must be 17x87, got " +
                      std::to_string(channels) + "x" + std::to_string(timesteps));
  }
  if (cnn_b_kernel != 2 && cnn_b_kernel != 4 && cnn_b_kernel != 6) {
    throw ConfigError("cnn_b_kernel must be 2, 4 or 6, got " +
                      std::to_string(cnn_b_kernel));
  }
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw ConfigError("dropout_rate must be in [0,1)");
  }
  if (rf_trees < 1) throw ConfigError("rf_trees must be >= 1");
  if (rf_max_depth < 0) throw ConfigError("rf_max_depth must be >= 0");
}

Model::Model(ModelConfig config, std::vector<int> input_shape,
             std::vector<std::unique_ptr<Layer>> layers)
    : config_(config),
      input_shape_(std::move(input_shape)),
      layers_(std::move(layers)) {
  ValidateChain();
}

Model::Model(const Model& other)
    : config_(other.config_),
      input_shape_(other.input_shape_),
      shapes_(other.shapes_),
      trained_(other.trained_) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->Clone());
}

Model& Model::operator=(const Model& other) {
  if (this != &other) {
    Model copy(other);
    *this = std::move(copy);
  }
  return *this;
}

void Model::ValidateChain() {
  shapes_.clear();
  std::vector<int> shape = input_shape_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    try {
      shape = layers_[i]->OutputShape(shape);
    } catch (const ShapeError& e) {
      std::string trace = ShapeToString(input_shape_);
      for (const auto& s : shapes_) trace += " -> " + ShapeToString(s);
      throw ShapeError("layer " + std::to_string(i) + " (" +
                       LayerKindName(layers_[i]->kind()) + "): " + e.what() +
                       "; shape trace " + trace);
    }
    shapes_.push_back(shape);
  }
  if (ShapeSize(shape) != 1) {
    throw ShapeError("model must end in a single logit, final shape is " +
                     ShapeToString(shape));
  }
}

Tensor Model::PrepareBatch(const Tensor& batch) const {
  const std::size_t per_sample = ShapeSize(input_shape_);
  if (batch.rank() < 2 || batch.size() != per_sample * batch.dim(0)) {
    throw ShapeError("input batch " + batch.ShapeString() +
                     " does not match per-sample shape " +
                     ShapeToString(input_shape_));
  }
  std::vector<int> shape{batch.dim(0)};
  shape.insert(shape.end(), input_shape_.begin(), input_shape_.end());
  return batch.Reshaped(std::move(shape));
}

Tensor Model::Forward(const Tensor& batch, const ForwardContext& ctx,
                      ForwardTrace* trace) const {
  Tensor x = PrepareBatch(batch);
  if (trace == nullptr) {
    for (const auto& layer : layers_) x = layer->Forward(x, ctx, nullptr);
    x.Reshape({x.dim(0), 1});
    return x;
  }
  trace->caches.resize(layers_.size());
  trace->activations.resize(layers_.size() + 1);
  trace->activations[0] = std::move(x);
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    trace->activations[i + 1] =
        layers_[i]->Forward(trace->activations[i], ctx, &trace->caches[i]);
  }
  return trace->activations.back().Reshaped({trace->activations.back().dim(0), 1});
}

Gradients Model::Backward(const ForwardTrace& trace,
                          const Tensor& grad_logits) const {
  if (trace.caches.size() != layers_.size() ||
      trace.activations.size() != layers_.size() + 1) {
    throw ShapeError("forward trace does not match the model's layer count");
  }
  Gradients grads(layers_.size());
  std::vector<int> out_shape{grad_logits.dim(0)};
  out_shape.insert(out_shape.end(), shapes_.back().begin(), shapes_.back().end());
  Tensor g = grad_logits.Reshaped(out_shape);
  for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
    g = layers_[i]->Backward(g, trace.activations[i], trace.caches[i],
                             &grads[i], i > 0);
  }
  return grads;
}

void Model::CommitStatistics(const ForwardTrace& trace) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->CommitStatistics(trace.caches[i]);
  }
}

std::vector<double> Model::Logits(const Tensor& batch) const {
  const Tensor prepared = PrepareBatch(batch);
  const int n = prepared.dim(0);
  const std::size_t per_sample = prepared.size() / n;
  std::vector<double> logits;
  logits.reserve(n);
  ForwardContext ctx;
  for (int start = 0; start < n; start += kInferenceChunk) {
    const int count = std::min(kInferenceChunk, n - start);
    std::vector<int> shape = prepared.shape();
    shape[0] = count;
    std::vector<double> chunk(prepared.vector().begin() + start * per_sample,
                              prepared.vector().begin() + (start + count) * per_sample);
    const Tensor out = Forward(Tensor(shape, std::move(chunk)), ctx, nullptr);
    logits.insert(logits.end(), out.values().begin(), out.values().end());
  }
  return logits;
}

std::size_t Model::NumTrainableParameters() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    for (const Tensor& p : l->parameters()) n += p.size();
  }
  return n;
}

Model BuildFromSpecs(const ModelConfig& config, std::vector<int> input_shape,
                     const std::vector<LayerSpec>& specs) {
  std::vector<std::unique_ptr<Layer>> layers;
  layers.reserve(specs.size());
  for (const LayerSpec& s : specs) layers.push_back(MakeLayer(s));
  Model model(config, std::move(input_shape), std::move(layers));
  std::mt19937_64 rng(config.seed);
  for (int i = 0; i < model.num_layers(); ++i) model.mutable_layer(i).Initialize(rng);
  return model;
}

Model BuildCnnA(const ModelConfig& config) {
  config.Validate();
  if (config.architecture != Architecture::kCnnA) {
    throw ConfigError("BuildCnnA called with a non-CNN-A config");
  }
  constexpr int kTemporalFilters = 8;
  constexpr int kTemporalKernel = 29;
  constexpr int kDepthMultiplier = 2;
  constexpr int kSeparableFilters = 16;
  constexpr int kSeparableKernel = 16;
  constexpr int kEmbedding = 128;
  const int depth_channels = kTemporalFilters * kDepthMultiplier;

  std::vector<LayerSpec> specs = {
      Conv2DSpec(1, kTemporalFilters, 1, kTemporalKernel, Padding::kSame, false),
      BatchNormSpec(kTemporalFilters),
      DepthwiseSpec(kTemporalFilters, kDepthMultiplier, config.channels, 1,
                    Padding::kValid),
      BatchNormSpec(depth_channels),
      EluSpec(),
      AvgPoolSpec(1, 4),
      DropoutSpec(config.dropout_rate),
      SeparableSpec(depth_channels, kSeparableFilters, 1, kSeparableKernel,
                    Padding::kSame),
      BatchNormSpec(kSeparableFilters),
      EluSpec(),
      AvgPoolSpec(1, 8),
      DropoutSpec(config.dropout_rate),
      FlattenSpec(),
  };
  // Width after the two temporal poolings.
  const int pooled = (config.timesteps / 4) / 8;
  specs.push_back(DenseSpec(kSeparableFilters * pooled, kEmbedding));
  specs.push_back(EluSpec());
  specs.push_back(DenseSpec(kEmbedding, 1));
  return BuildFromSpecs(config, {1, config.channels, config.timesteps}, specs);
}

Model BuildCnnB(const ModelConfig& config) {
  config.Validate();
  if (config.architecture != Architecture::kCnnB) {
    throw ConfigError("BuildCnnB called with a non-CNN-B config");
  }
  const int k = config.cnn_b_kernel;
  const int filters[] = {16, 32, 64, 128};
  std::vector<LayerSpec> specs;
  int in_channels = 1, h = config.channels, w = config.timesteps;
  for (int f : filters) {
    specs.push_back(Conv2DSpec(in_channels, f, k, k, Padding::kSame, false));
    specs.push_back(BatchNormSpec(f));
    specs.push_back(EluSpec());
    specs.push_back(AvgPoolSpec(2, 2));
    in_channels = f;
    h /= 2;
    w /= 2;
  }
  specs.push_back(FlattenSpec());
  const int flat = in_channels * std::max(h, 0) * std::max(w, 0);
  int width = flat;
  for (int units : {256, 128, 64}) {
    specs.push_back(DenseSpec(width, units));
    specs.push_back(EluSpec());
    width = units;
  }
  specs.push_back(DenseSpec(width, 1));
  return BuildFromSpecs(config, {1, config.channels, config.timesteps}, specs);
}

Model BuildModel(const ModelConfig& config) {
  switch (config.architecture) {
    case Architecture::kCnnA: return BuildCnnA(config);
    case Architecture::kCnnB: return BuildCnnB(config);
    case Architecture::kRandomForest: break;
  }
  throw ConfigError("BuildModel only builds CNN architectures");
}

std::vector<double> PredictProba(const Model& model, const Tensor& batch) {
  std::vector<double> p = model.Logits(batch);
  for (double& v : p) v = kernels::Sigmoid(v);
  return p;
}

}  // namespace aucnn
