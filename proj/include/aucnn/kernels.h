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

#ifndef AUCNN_KERNELS_H_
#define AUCNN_KERNELS_H_

// Forward and backward numerical kernels for the closed layer set used by the
// AU classifiers. Spatial kernels take batched [N, C, H, W] tensors; a rank-3
// [C, H, W] input is treated as a batch of one and the result keeps rank 3.
// Convolutions are cross-correlations with stride 1.

#include <span>
#include <vector>

#include "aucnn/tensor.h"

namespace aucnn {

enum class Mode { kTrain, kInfer };

namespace kernels {

enum class Padding { kSame, kValid };

struct PadAmount {
  int before = 0;
  int after = 0;
};

// Padding for a `same` convolution. Odd remainders go after the data.
PadAmount SamePadding(int kernel_extent);

// Output extent of a stride-1 convolution along one axis.
int ConvOutputExtent(int input_extent, int kernel_extent, Padding padding);

// input [N,Cin,H,W], kernels [Cout,Cin,kh,kw], bias empty or of length Cout.
Tensor Conv2D(const Tensor& input, const Tensor& kernels,
              std::span<const double> bias, Padding padding);

struct Conv2DGrads {
  Tensor input;  // Empty when not requested.
  Tensor kernels;
  std::vector<double> bias;
};
Conv2DGrads Conv2DBackward(const Tensor& input, const Tensor& kernels,
                           const Tensor& grad_output, Padding padding,
                           bool need_input_grad, bool need_kernel_grad = true);

// input [N,C,H,W], kernels [C,D,kh,kw]. Output channel c*D+d is channel c
// correlated with kernel (c, d).
Tensor DepthwiseConv2D(const Tensor& input, const Tensor& kernels,
                       Padding padding);

struct DepthwiseGrads {
  Tensor input;
  Tensor kernels;
};
DepthwiseGrads DepthwiseConv2DBackward(const Tensor& input,
                                       const Tensor& kernels,
                                       const Tensor& grad_output,
                                       Padding padding, bool need_input_grad,
                                       bool need_kernel_grad = true);

// Depthwise stage (multiplier 1) followed by a 1x1 pointwise convolution.
// depth_kernels [C,1,kh,kw], point_kernels [Cout,C,1,1].
Tensor SeparableConv2D(const Tensor& input, const Tensor& depth_kernels,
                       const Tensor& point_kernels, Padding padding);

// Mean pooling with window == stride. Incomplete right/bottom windows are
// dropped.
Tensor AvgPool2D(const Tensor& input, int pool_h, int pool_w);
Tensor AvgPool2DBackward(const std::vector<int>& input_shape,
                         const Tensor& grad_output, int pool_h, int pool_w);

// Per-channel batch normalization over every axis except axis 1.
struct BatchNormParams {
  Tensor scale;
  Tensor shift;
  Tensor running_mean;
  Tensor running_var;
  double epsilon = 1e-5;
  double momentum = 0.99;

  static BatchNormParams Identity(int channels);
};

// Statistics used by a forward pass (batch statistics in train mode, running
// statistics in infer mode).
struct BatchNormCache {
  Mode mode = Mode::kInfer;
  std::vector<double> mean;
  std::vector<double> variance;
  std::vector<double> inv_std;
};

// Pure forward pass. In train mode the batch statistics are recorded in
// `cache` (when given) but the running statistics are left untouched.
Tensor BatchNormForward(const Tensor& batch, const BatchNormParams& params,
                        Mode mode, BatchNormCache* cache);

// Folds the batch statistics recorded by a train-mode forward pass into the
// running estimates.
void UpdateRunningStatistics(BatchNormParams& params,
                             const BatchNormCache& cache);

// Forward pass that also updates running statistics in train mode.
Tensor BatchNorm(const Tensor& batch, BatchNormParams& params, Mode mode);

struct BatchNormGrads {
  Tensor input;
  std::vector<double> scale;
  std::vector<double> shift;
};
// `input` is the tensor given to the forward pass that filled `cache`.
BatchNormGrads BatchNormBackward(const Tensor& grad_output, const Tensor& input,
                                 const BatchNormParams& params,
                                 const BatchNormCache& cache,
                                 bool need_input_grad = true);

// ELU with alpha = 1.
double Elu(double x);
double EluDerivative(double x);
Tensor Elu(const Tensor& x);
Tensor EluBackward(const Tensor& input, const Tensor& grad_output);

// x [N,Din], weights [Din,Dout], bias empty or length Dout.
Tensor Dense(const Tensor& x, const Tensor& weights,
             std::span<const double> bias);

struct DenseGrads {
  Tensor input;
  Tensor weights;
  std::vector<double> bias;
};
DenseGrads DenseBackward(const Tensor& x, const Tensor& weights,
                         const Tensor& grad_output, bool need_input_grad,
                         bool need_weight_grad = true);

double Sigmoid(double x);
double Softplus(double x);

struct BceResult {
  double loss;
  double dloss_dlogit;
};
// Binary cross-entropy on a logit, computed as softplus(z) - y*z.
BceResult SigmoidBce(double logit, int label);

}  // namespace kernels
}  // namespace aucnn

#endif  // AUCNN_KERNELS_H_
