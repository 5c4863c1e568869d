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

#ifndef AUCNN_LAYERS_H_
#define AUCNN_LAYERS_H_

#include <memory>
#include <random>
#include <string>
#include <vector>

#include "aucnn/kernels.h"
#include "aucnn/tensor.h"

namespace aucnn {

enum class LayerKind {
  kConv2D,
  kDepthwiseConv2D,
  kSeparableConv2D,
  kBatchNorm,
  kElu,
  kAvgPool2D,
  kDropout,
  kFlatten,
  kDense,
};

const char* LayerKindName(LayerKind kind);
LayerKind LayerKindFromName(const std::string& name);

// Hyperparameters of one layer. Only the fields relevant to `kind` are used.
struct LayerSpec {
  LayerKind kind = LayerKind::kFlatten;
  int in_channels = 0;   // conv family, batch norm, dense input width
  int out_channels = 0;  // conv family, dense output width
  int kernel_h = 1;
  int kernel_w = 1;
  int depth_multiplier = 1;
  int pool_h = 1;
  int pool_w = 1;
  kernels::Padding padding = kernels::Padding::kValid;
  bool use_bias = false;
  double rate = 0.0;  // dropout
  double epsilon = 1e-5;
  double momentum = 0.99;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

// Values a layer keeps from its forward pass for the backward pass.
// The layer input itself is kept by the caller (see ForwardTrace).
struct LayerCache {
  Tensor intermediate;  // separable conv: depthwise stage output
  Tensor mask;          // dropout
  kernels::BatchNormCache batch_norm;
};

struct ForwardContext {
  Mode mode = Mode::kInfer;
  // Source of dropout masks in train mode. Dropout is the identity when null.
  std::mt19937_64* rng = nullptr;
  // Reuse dropout masks already present in the cache instead of drawing new
  // ones. Used by gradient checking.
  bool reuse_masks = false;
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }
  LayerKind kind() const { return spec_.kind; }

  // Per-sample output shape for a per-sample input shape. Throws ShapeError.
  virtual std::vector<int> OutputShape(const std::vector<int>& input) const = 0;

  // `input` is batched: [N, per-sample shape...].
  virtual Tensor Forward(const Tensor& input, const ForwardContext& ctx,
                         LayerCache* cache) const = 0;

  // Gradient with respect to the layer input (empty unless
  // `need_input_grad`). `input` is the tensor passed to Forward. When
  // `param_grads` is non-null it receives one tensor per parameter.
  virtual Tensor Backward(const Tensor& grad_output, const Tensor& input,
                          const LayerCache& cache,
                          std::vector<Tensor>* param_grads,
                          bool need_input_grad) const = 0;

  // Applies statistics gathered by a train-mode forward pass.
  virtual void CommitStatistics(const LayerCache&) {}

  // Elementwise nonlinearities are handled by the rescale rule in the
  // explainer; every other layer is affine in inference mode.
  virtual bool IsElementwiseNonlinear() const { return false; }
  virtual double Activate(double x) const { return x; }
  virtual double ActivationDerivative(double) const { return 1.0; }

  // Trainable tensors.
  std::vector<Tensor>& parameters() { return params_; }
  const std::vector<Tensor>& parameters() const { return params_; }
  // Persistent non-trainable tensors (batch-norm running statistics).
  virtual std::vector<Tensor*> MutableBuffers() { return {}; }
  std::vector<const Tensor*> Buffers() const;

  virtual void Initialize(std::mt19937_64& rng);
  virtual std::unique_ptr<Layer> Clone() const = 0;

 protected:
  LayerSpec spec_;
  std::vector<Tensor> params_;
};

std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec);

// Spec helpers used by the model builders.
LayerSpec Conv2DSpec(int in_channels, int out_channels, int kernel_h,
                     int kernel_w, kernels::Padding padding, bool use_bias);
LayerSpec DepthwiseSpec(int channels, int depth_multiplier, int kernel_h,
                        int kernel_w, kernels::Padding padding);
LayerSpec SeparableSpec(int in_channels, int out_channels, int kernel_h,
                        int kernel_w, kernels::Padding padding);
LayerSpec BatchNormSpec(int channels);
LayerSpec EluSpec();
LayerSpec AvgPoolSpec(int pool_h, int pool_w);
LayerSpec DropoutSpec(double rate);
LayerSpec FlattenSpec();
LayerSpec DenseSpec(int in_features, int out_features);

}  // namespace aucnn

#endif  // AUCNN_LAYERS_H_
