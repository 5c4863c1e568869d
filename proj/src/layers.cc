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

#include "aucnn/layers.h"

#include <cmath>
#include <utility>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

using kernels::Padding;

void FillFanIn(Tensor& t, int fan_in, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / fan_in);
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.values()) v = dist(rng);
}

void ExpectRank(const std::vector<int>& shape, int rank, const char* layer) {
  if (static_cast<int>(shape.size()) != rank) {
    throw ShapeError(std::string(layer) + " expects a rank-" +
                     std::to_string(rank) + " sample, got " +
                     ShapeToString(shape));
  }
}

std::span<const double> BiasOf(const std::vector<Tensor>& params) {
  if (params.size() < 2) return {};
  return params[1].values();
}

class Conv2DLayer : public Layer {
 public:
  explicit Conv2DLayer(LayerSpec spec) : Layer(spec) {
    params_.emplace_back(std::vector<int>{spec.out_channels, spec.in_channels,
                                          spec.kernel_h, spec.kernel_w});
    if (spec.use_bias) params_.emplace_back(std::vector<int>{spec.out_channels});
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    ExpectRank(in, 3, "conv2d");
    if (in[0] != spec_.in_channels) {
      throw ShapeError("conv2d expects " + std::to_string(spec_.in_channels) +
                       " channels, got " + ShapeToString(in));
    }
    const int h = kernels::ConvOutputExtent(in[1], spec_.kernel_h, spec_.padding);
    const int w = kernels::ConvOutputExtent(in[2], spec_.kernel_w, spec_.padding);
    if (h < 1 || w < 1) {
      throw ShapeError("conv2d kernel does not fit input " + ShapeToString(in));
    }
    return {spec_.out_channels, h, w};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    Tensor out = kernels::Conv2D(input, params_[0], BiasOf(params_), spec_.padding);
    return out;
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    kernels::Conv2DGrads g =
        kernels::Conv2DBackward(input, params_[0], grad_output,
                                spec_.padding, need_input_grad,
                                param_grads != nullptr);
    if (param_grads != nullptr) {
      param_grads->clear();
      param_grads->push_back(std::move(g.kernels));
      if (spec_.use_bias) {
        param_grads->emplace_back(std::vector<int>{spec_.out_channels},
                                  std::move(g.bias));
      }
    }
    return std::move(g.input);
  }

  void Initialize(std::mt19937_64& rng) override {
    FillFanIn(params_[0], spec_.in_channels * spec_.kernel_h * spec_.kernel_w, rng);
    if (spec_.use_bias) params_[1].Fill(0.0);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<Conv2DLayer>(*this);
  }
};

class DepthwiseConv2DLayer : public Layer {
 public:
  explicit DepthwiseConv2DLayer(LayerSpec spec) : Layer(spec) {
    if (spec.depth_multiplier < 1) {
      throw ConfigError("depth multiplier must be >= 1");
    }
    params_.emplace_back(std::vector<int>{spec.in_channels, spec.depth_multiplier,
                                          spec.kernel_h, spec.kernel_w});
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    ExpectRank(in, 3, "depthwise_conv2d");
    if (in[0] != spec_.in_channels) {
      throw ShapeError("depthwise_conv2d expects " +
                       std::to_string(spec_.in_channels) + " channels, got " +
                       ShapeToString(in));
    }
    const int h = kernels::ConvOutputExtent(in[1], spec_.kernel_h, spec_.padding);
    const int w = kernels::ConvOutputExtent(in[2], spec_.kernel_w, spec_.padding);
    if (h < 1 || w < 1) {
      throw ShapeError("depthwise kernel does not fit input " + ShapeToString(in));
    }
    return {spec_.in_channels * spec_.depth_multiplier, h, w};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    Tensor out = kernels::DepthwiseConv2D(input, params_[0], spec_.padding);
    return out;
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    kernels::DepthwiseGrads g = kernels::DepthwiseConv2DBackward(
        input, params_[0], grad_output, spec_.padding, need_input_grad,
        param_grads != nullptr);
    if (param_grads != nullptr) {
      param_grads->clear();
      param_grads->push_back(std::move(g.kernels));
    }
    return std::move(g.input);
  }

  void Initialize(std::mt19937_64& rng) override {
    FillFanIn(params_[0], spec_.kernel_h * spec_.kernel_w, rng);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<DepthwiseConv2DLayer>(*this);
  }
};

// Parameters: [0] depthwise kernels [C,1,kh,kw], [1] pointwise [Cout,C,1,1].
class SeparableConv2DLayer : public Layer {
 public:
  explicit SeparableConv2DLayer(LayerSpec spec) : Layer(spec) {
    params_.emplace_back(
        std::vector<int>{spec.in_channels, 1, spec.kernel_h, spec.kernel_w});
    params_.emplace_back(
        std::vector<int>{spec.out_channels, spec.in_channels, 1, 1});
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    ExpectRank(in, 3, "separable_conv2d");
    if (in[0] != spec_.in_channels) {
      throw ShapeError("separable_conv2d expects " +
                       std::to_string(spec_.in_channels) + " channels, got " +
                       ShapeToString(in));
    }
    const int h = kernels::ConvOutputExtent(in[1], spec_.kernel_h, spec_.padding);
    const int w = kernels::ConvOutputExtent(in[2], spec_.kernel_w, spec_.padding);
    if (h < 1 || w < 1) {
      throw ShapeError("separable kernel does not fit input " + ShapeToString(in));
    }
    return {spec_.out_channels, h, w};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* cache) const override {
    Tensor depthwise = kernels::DepthwiseConv2D(input, params_[0], spec_.padding);
    Tensor out = kernels::Conv2D(depthwise, params_[1], {}, Padding::kValid);
    if (cache != nullptr) cache->intermediate = std::move(depthwise);
    return out;
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& cache,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    const bool need_params = param_grads != nullptr;
    kernels::Conv2DGrads point = kernels::Conv2DBackward(
        cache.intermediate, params_[1], grad_output, Padding::kValid,
        need_input_grad || need_params, need_params);
    Tensor result;
    if (need_input_grad || need_params) {
      kernels::DepthwiseGrads depth = kernels::DepthwiseConv2DBackward(
          input, params_[0], point.input, spec_.padding, need_input_grad,
          need_params);
      result = std::move(depth.input);
      if (need_params) {
        param_grads->clear();
        param_grads->push_back(std::move(depth.kernels));
        param_grads->push_back(std::move(point.kernels));
      }
    }
    return result;
  }

  void Initialize(std::mt19937_64& rng) override {
    FillFanIn(params_[0], spec_.kernel_h * spec_.kernel_w, rng);
    FillFanIn(params_[1], spec_.in_channels, rng);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<SeparableConv2DLayer>(*this);
  }
};

// Parameters: [0] scale, [1] shift. Buffers: running mean, running variance.
class BatchNormLayer : public Layer {
 public:
  explicit BatchNormLayer(LayerSpec spec) : Layer(spec) {
    params_.emplace_back(std::vector<int>{spec.in_channels}, 1.0);
    params_.emplace_back(std::vector<int>{spec.in_channels}, 0.0);
    running_mean_ = Tensor({spec.in_channels}, 0.0);
    running_var_ = Tensor({spec.in_channels}, 1.0);
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    if (in.empty() || in[0] != spec_.in_channels) {
      throw ShapeError("batch_norm expects " + std::to_string(spec_.in_channels) +
                       " channels, got " + ShapeToString(in));
    }
    return in;
  }

  Tensor Forward(const Tensor& input, const ForwardContext& ctx,
                 LayerCache* cache) const override {
    return kernels::BatchNormForward(input, View(), ctx.mode,
                                     cache != nullptr ? &cache->batch_norm : nullptr);
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& cache,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    kernels::BatchNormGrads g = kernels::BatchNormBackward(
        grad_output, input, View(), cache.batch_norm, need_input_grad);
    if (param_grads != nullptr) {
      param_grads->clear();
      param_grads->emplace_back(std::vector<int>{spec_.in_channels}, std::move(g.scale));
      param_grads->emplace_back(std::vector<int>{spec_.in_channels}, std::move(g.shift));
    }
    return std::move(g.input);
  }

  void CommitStatistics(const LayerCache& cache) override {
    kernels::BatchNormParams p = View();
    kernels::UpdateRunningStatistics(p, cache.batch_norm);
    running_mean_ = std::move(p.running_mean);
    running_var_ = std::move(p.running_var);
  }

  std::vector<Tensor*> MutableBuffers() override {
    return {&running_mean_, &running_var_};
  }

  void Initialize(std::mt19937_64&) override {
    params_[0].Fill(1.0);
    params_[1].Fill(0.0);
    running_mean_.Fill(0.0);
    running_var_.Fill(1.0);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<BatchNormLayer>(*this);
  }

 private:
  kernels::BatchNormParams View() const {
    kernels::BatchNormParams p;
    p.scale = params_[0];
    p.shift = params_[1];
    p.running_mean = running_mean_;
    p.running_var = running_var_;
    p.epsilon = spec_.epsilon;
    p.momentum = spec_.momentum;
    return p;
  }

  Tensor running_mean_;
  Tensor running_var_;
};

class EluLayer : public Layer {
 public:
  explicit EluLayer(LayerSpec spec) : Layer(spec) {}

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    return in;
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    return kernels::Elu(input);
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    if (param_grads != nullptr) param_grads->clear();
    if (!need_input_grad) return Tensor();
    return kernels::EluBackward(input, grad_output);
  }

  bool IsElementwiseNonlinear() const override { return true; }
  double Activate(double x) const override { return kernels::Elu(x); }
  double ActivationDerivative(double x) const override {
    return kernels::EluDerivative(x);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<EluLayer>(*this);
  }
};

class AvgPool2DLayer : public Layer {
 public:
  explicit AvgPool2DLayer(LayerSpec spec) : Layer(spec) {}

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    ExpectRank(in, 3, "avg_pool2d");
    if (spec_.pool_h < 1 || spec_.pool_w < 1 || in[1] / spec_.pool_h < 1 ||
        in[2] / spec_.pool_w < 1) {
      throw ShapeError("avg_pool2d " + std::to_string(spec_.pool_h) + "x" +
                       std::to_string(spec_.pool_w) +
                       " reduces a spatial dimension of " + ShapeToString(in) +
                       " below 1");
    }
    return {in[0], in[1] / spec_.pool_h, in[2] / spec_.pool_w};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    return kernels::AvgPool2D(input, spec_.pool_h, spec_.pool_w);
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    if (param_grads != nullptr) param_grads->clear();
    if (!need_input_grad) return Tensor();
    return kernels::AvgPool2DBackward(input.shape(), grad_output, spec_.pool_h,
                                      spec_.pool_w);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<AvgPool2DLayer>(*this);
  }
};

// Inverted dropout: kept units are scaled by 1/(1-rate) at train time.
class DropoutLayer : public Layer {
 public:
  explicit DropoutLayer(LayerSpec spec) : Layer(spec) {
    if (spec.rate < 0.0 || spec.rate >= 1.0) {
      throw ConfigError("dropout rate must be in [0,1), got " +
                        std::to_string(spec.rate));
    }
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    return in;
  }

  Tensor Forward(const Tensor& input, const ForwardContext& ctx,
                 LayerCache* cache) const override {
    const bool active =
        ctx.mode == Mode::kTrain && spec_.rate > 0.0 &&
        (ctx.rng != nullptr || (ctx.reuse_masks && cache != nullptr));
    if (!active) {
      if (cache != nullptr) cache->mask = Tensor();
      return input;
    }
    Tensor mask;
    if (ctx.reuse_masks && cache != nullptr &&
        cache->mask.shape() == input.shape()) {
      mask = cache->mask;
    } else {
      if (ctx.rng == nullptr) return input;
      mask = Tensor(input.shape());
      std::bernoulli_distribution keep(1.0 - spec_.rate);
      const double scale = 1.0 / (1.0 - spec_.rate);
      for (double& m : mask.values()) m = keep(*ctx.rng) ? scale : 0.0;
    }
    Tensor out(input.shape());
    for (std::size_t i = 0; i < input.size(); ++i) out[i] = input[i] * mask[i];
    if (cache != nullptr) cache->mask = std::move(mask);
    return out;
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& /*input*/,
                  const LayerCache& cache,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    if (param_grads != nullptr) param_grads->clear();
    if (!need_input_grad) return Tensor();
    if (cache.mask.empty()) return grad_output;
    if (cache.mask.shape() != grad_output.shape()) {
      throw ShapeError("dropout backward: grad_output " +
                       grad_output.ShapeString() + " does not match mask " +
                       cache.mask.ShapeString());
    }
    Tensor out(grad_output.shape());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = grad_output[i] * cache.mask[i];
    return out;
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<DropoutLayer>(*this);
  }
};

class FlattenLayer : public Layer {
 public:
  explicit FlattenLayer(LayerSpec spec) : Layer(spec) {}

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    return {static_cast<int>(ShapeSize(in))};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    const int n = input.dim(0);
    return input.Reshaped({n, static_cast<int>(input.size() / n)});
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    if (param_grads != nullptr) param_grads->clear();
    if (!need_input_grad) return Tensor();
    return grad_output.Reshaped(input.shape());
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<FlattenLayer>(*this);
  }
};

// Parameters: [0] weights [Din,Dout], [1] bias [Dout].
class DenseLayer : public Layer {
 public:
  explicit DenseLayer(LayerSpec spec) : Layer(spec) {
    params_.emplace_back(std::vector<int>{spec.in_channels, spec.out_channels});
    params_.emplace_back(std::vector<int>{spec.out_channels});
  }

  std::vector<int> OutputShape(const std::vector<int>& in) const override {
    if (in.size() != 1 || in[0] != spec_.in_channels) {
      throw ShapeError("dense expects a flat sample of width " +
                       std::to_string(spec_.in_channels) + ", got " +
                       ShapeToString(in));
    }
    return {spec_.out_channels};
  }

  Tensor Forward(const Tensor& input, const ForwardContext&,
                 LayerCache* /*cache*/) const override {
    return kernels::Dense(input, params_[0], params_[1].values());
  }

  Tensor Backward(const Tensor& grad_output, const Tensor& input,
                  const LayerCache& /*cache*/,
                  std::vector<Tensor>* param_grads,
                  bool need_input_grad) const override {
    kernels::DenseGrads g = kernels::DenseBackward(
        input, params_[0], grad_output, need_input_grad,
        param_grads != nullptr);
    if (param_grads != nullptr) {
      param_grads->clear();
      param_grads->push_back(std::move(g.weights));
      param_grads->emplace_back(std::vector<int>{spec_.out_channels},
                                std::move(g.bias));
    }
    return std::move(g.input);
  }

  void Initialize(std::mt19937_64& rng) override {
    FillFanIn(params_[0], spec_.in_channels, rng);
    params_[1].Fill(0.0);
  }

  std::unique_ptr<Layer> Clone() const override {
    return std::make_unique<DenseLayer>(*this);
  }
};

}  // namespace

const char* LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2D: return "conv2d";
    case LayerKind::kDepthwiseConv2D: return "depthwise_conv2d";
    case LayerKind::kSeparableConv2D: return "separable_conv2d";
    case LayerKind::kBatchNorm: return "batch_norm";
    case LayerKind::kElu: return "elu";
    case LayerKind::kAvgPool2D: return "avg_pool2d";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kDense: return "dense";
  }
  return "unknown";
}

LayerKind LayerKindFromName(const std::string& name) {
  for (LayerKind k :
       {LayerKind::kConv2D, LayerKind::kDepthwiseConv2D,
        LayerKind::kSeparableConv2D, LayerKind::kBatchNorm, LayerKind::kElu,
        LayerKind::kAvgPool2D, LayerKind::kDropout, LayerKind::kFlatten,
        LayerKind::kDense}) {
    if (name == LayerKindName(k)) return k;
  }
  throw ConfigError("unknown layer kind '" + name + "'");
}

std::vector<const Tensor*> Layer::Buffers() const {
  std::vector<Tensor*> mutable_buffers = const_cast<Layer*>(this)->MutableBuffers();
  return {mutable_buffers.begin(), mutable_buffers.end()};
}

void Layer::Initialize(std::mt19937_64&) {}

std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::kConv2D: return std::make_unique<Conv2DLayer>(spec);
    case LayerKind::kDepthwiseConv2D:
      return std::make_unique<DepthwiseConv2DLayer>(spec);
    case LayerKind::kSeparableConv2D:
      return std::make_unique<SeparableConv2DLayer>(spec);
    case LayerKind::kBatchNorm: return std::make_unique<BatchNormLayer>(spec);
    case LayerKind::kElu: return std::make_unique<EluLayer>(spec);
    case LayerKind::kAvgPool2D: return std::make_unique<AvgPool2DLayer>(spec);
    case LayerKind::kDropout: return std::make_unique<DropoutLayer>(spec);
    case LayerKind::kFlatten: return std::make_unique<FlattenLayer>(spec);
    case LayerKind::kDense: return std::make_unique<DenseLayer>(spec);
  }
  throw ConfigError("unhandled layer kind");
}

LayerSpec Conv2DSpec(int in_channels, int out_channels, int kernel_h,
                     int kernel_w, Padding padding, bool use_bias) {
  LayerSpec s;
  s.kind = LayerKind::kConv2D;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel_h = kernel_h;
  s.kernel_w = kernel_w;
  s.padding = padding;
  s.use_bias = use_bias;
  return s;
}

LayerSpec DepthwiseSpec(int channels, int depth_multiplier, int kernel_h,
                        int kernel_w, Padding padding) {
  LayerSpec s;
  s.kind = LayerKind::kDepthwiseConv2D;
  s.in_channels = channels;
  s.out_channels = channels * depth_multiplier;
  s.depth_multiplier = depth_multiplier;
  s.kernel_h = kernel_h;
  s.kernel_w = kernel_w;
  s.padding = padding;
  return s;
}

LayerSpec SeparableSpec(int in_channels, int out_channels, int kernel_h,
                        int kernel_w, Padding padding) {
  LayerSpec s;
  s.kind = LayerKind::kSeparableConv2D;
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel_h = kernel_h;
  s.kernel_w = kernel_w;
  s.padding = padding;
  return s;
}

LayerSpec BatchNormSpec(int channels) {
  LayerSpec s;
  s.kind = LayerKind::kBatchNorm;
  s.in_channels = channels;
  return s;
}

LayerSpec EluSpec() {
  LayerSpec s;
  s.kind = LayerKind::kElu;
  return s;
}

LayerSpec AvgPoolSpec(int pool_h, int pool_w) {
  LayerSpec s;
  s.kind = LayerKind::kAvgPool2D;
  s.pool_h = pool_h;
  s.pool_w = pool_w;
  return s;
}

LayerSpec DropoutSpec(double rate) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.rate = rate;
  return s;
}

LayerSpec FlattenSpec() {
  LayerSpec s;
  s.kind = LayerKind::kFlatten;
  return s;
}

LayerSpec DenseSpec(int in_features, int out_features) {
  LayerSpec s;
  s.kind = LayerKind::kDense;
  s.in_channels = in_features;
  s.out_channels = out_features;
  s.use_bias = true;
  return s;
}

}  // namespace aucnn
