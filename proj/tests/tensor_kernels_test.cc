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

#include "aucnn/kernels.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aucnn/errors.h"
#include "aucnn/tensor.h"
#include "test_util.h"

namespace aucnn::kernels {
namespace {

using ::aucnn::testing::Dot;
using ::aucnn::testing::NumericDerivative;
using ::aucnn::testing::RandomTensor;

// Quadruple-loop cross-correlation used as the reference.
Tensor NaiveConv(const Tensor& x, const Tensor& k, Padding padding) {
  const int n = x.dim(0), cin = x.dim(1), h = x.dim(2), w = x.dim(3);
  const int cout = k.dim(0), kh = k.dim(2), kw = k.dim(3);
  const int ph = padding == Padding::kSame ? (kh - 1) / 2 : 0;
  const int pw = padding == Padding::kSame ? (kw - 1) / 2 : 0;
  const int oh = padding == Padding::kSame ? h : h - kh + 1;
  const int ow = padding == Padding::kSame ? w : w - kw + 1;
  Tensor out({n, cout, oh, ow});
  for (int b = 0; b < n; ++b)
    for (int o = 0; o < cout; ++o)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          double s = 0.0;
          for (int c = 0; c < cin; ++c)
            for (int u = 0; u < kh; ++u)
              for (int v = 0; v < kw; ++v) {
                const int y = i + u - ph, z = j + v - pw;
                if (y >= 0 && y < h && z >= 0 && z < w) s += x.at(b, c, y, z) * k.at(o, c, u, v);
              }
          out.at(b, o, i, j) = s;
        }
  return out;
}

void ExpectTensorNear(const Tensor& a, const Tensor& b, double tol) {
  ASSERT_EQ(a.shape(), b.shape());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "at " << i;
}

TEST(Conv2DTest, HandComputedValid) {
  const Tensor x({1, 1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Tensor k({1, 1, 2, 2}, {1, 0, 0, 1});
  const Tensor y = Conv2D(x, k, {}, Padding::kValid);
  EXPECT_EQ(y, Tensor({1, 1, 2, 2}, {6, 8, 12, 14}));
}

TEST(Conv2DTest, IdentityKernel) {
  std::mt19937_64 rng(1);
  const Tensor x = RandomTensor({2, 1, 4, 5}, rng);
  const Tensor y = Conv2D(x, Tensor({1, 1, 1, 1}, 1.0), {}, Padding::kValid);
  EXPECT_EQ(y, x);
}

TEST(Conv2DTest, ZeroInputGivesZero) {
  std::mt19937_64 rng(2);
  const Tensor y = Conv2D(Tensor({1, 2, 5, 6}), RandomTensor({3, 2, 3, 2}, rng), {},
                          Padding::kSame);
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv2DTest, MatchesNaiveOracleBothPaddings) {
  std::mt19937_64 rng(3);
  const Tensor x = RandomTensor({2, 3, 6, 9}, rng);
  for (auto [kh, kw] : {std::pair{1, 4}, std::pair{3, 3}, std::pair{2, 5}}) {
    const Tensor k = RandomTensor({4, 3, kh, kw}, rng);
    for (Padding p : {Padding::kSame, Padding::kValid}) {
      ExpectTensorNear(Conv2D(x, k, {}, p), NaiveConv(x, k, p), 1e-12);
    }
  }
}

TEST(Conv2DTest, SamePaddingKeepsExtent) {
  EXPECT_EQ(ConvOutputExtent(87, 29, Padding::kSame), 87);
  EXPECT_EQ(ConvOutputExtent(87, 16, Padding::kSame), 87);
  EXPECT_EQ(ConvOutputExtent(17, 17, Padding::kValid), 1);
  EXPECT_EQ(SamePadding(4).before, 1);
  EXPECT_EQ(SamePadding(4).after, 2);
}

TEST(Conv2DTest, ChannelMismatchNamesBothShapes) {
  try {
    Conv2D(Tensor({1, 2, 3, 3}), Tensor({1, 3, 1, 1}), {}, Padding::kValid);
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("[1,2,3,3]"), std::string::npos) << what;
    EXPECT_NE(what.find("[1,3,1,1]"), std::string::npos) << what;
  }
}

TEST(Conv2DTest, IsLinear) {
  std::mt19937_64 rng(4);
  const Tensor x = RandomTensor({1, 2, 5, 7}, rng);
  const Tensor y = RandomTensor({1, 2, 5, 7}, rng);
  const Tensor k = RandomTensor({3, 2, 3, 3}, rng);
  const double a = 1.7, b = -0.6;
  Tensor mix(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) mix[i] = a * x[i] + b * y[i];
  const Tensor cx = Conv2D(x, k, {}, Padding::kSame);
  const Tensor cy = Conv2D(y, k, {}, Padding::kSame);
  const Tensor cm = Conv2D(mix, k, {}, Padding::kSame);
  for (std::size_t i = 0; i < cm.size(); ++i) {
    EXPECT_NEAR(cm[i], a * cx[i] + b * cy[i], 1e-10);
  }
}

TEST(Conv2DTest, BiasIsAdded) {
  const std::vector<double> bias = {2.5};
  const Tensor y = Conv2D(Tensor({1, 1, 2, 2}), Tensor({1, 1, 1, 1}, 1.0), bias,
                          Padding::kValid);
  for (double v : y.values()) EXPECT_EQ(v, 2.5);
}

TEST(DepthwiseConv2DTest, IdentityKernels) {
  std::mt19937_64 rng(5);
  const Tensor x = RandomTensor({1, 2, 3, 4}, rng);
  EXPECT_EQ(DepthwiseConv2D(x, Tensor({2, 1, 1, 1}, 1.0), Padding::kValid), x);
}

TEST(DepthwiseConv2DTest, CollapsesAUAxis) {
  std::mt19937_64 rng(6);
  const Tensor x = RandomTensor({1, 1, 17, 87}, rng);
  const Tensor y = DepthwiseConv2D(x, RandomTensor({1, 2, 17, 1}, rng), Padding::kValid);
  EXPECT_EQ(y.shape(), (std::vector<int>{1, 2, 1, 87}));
  // Per input channel the same holds with 17 channels: 34 x 1 x 87.
  const Tensor x17 = RandomTensor({1, 17, 17, 87}, rng);
  const Tensor y17 = DepthwiseConv2D(x17, RandomTensor({17, 2, 17, 1}, rng), Padding::kValid);
  EXPECT_EQ(y17.shape(), (std::vector<int>{1, 34, 1, 87}));
}

TEST(DepthwiseConv2DTest, ChannelIsolation) {
  std::mt19937_64 rng(7);
  Tensor x({1, 3, 4, 4});
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) x.at(0, 0, i, j) = 1.0 + i + j;
  const Tensor y = DepthwiseConv2D(x, RandomTensor({3, 2, 2, 2}, rng, 0.1, 1.0),
                                   Padding::kValid);
  for (int c = 0; c < 6; ++c) {
    double energy = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) energy += std::abs(y.at(0, c, i, j));
    if (c < 2) {
      EXPECT_GT(energy, 0.0) << c;
    } else {
      EXPECT_EQ(energy, 0.0) << c;
    }
  }
}

TEST(DepthwiseConv2DTest, RejectsBadMultiplier) {
  EXPECT_THROW(DepthwiseConv2D(Tensor({1, 2, 3, 3}), Tensor({2, 0, 1, 1}), Padding::kValid),
               std::invalid_argument);
}

TEST(DepthwiseConv2DTest, ReplicatedKernelEqualsPerChannelConv) {
  std::mt19937_64 rng(8);
  const Tensor x = RandomTensor({2, 3, 5, 6}, rng);
  const Tensor k = RandomTensor({1, 1, 2, 3}, rng);
  Tensor replicated({3, 1, 2, 3});
  for (int c = 0; c < 3; ++c)
    for (int i = 0; i < 6; ++i) replicated[c * 6 + i] = k[i];
  const Tensor y = DepthwiseConv2D(x, replicated, Padding::kSame);
  for (int c = 0; c < 3; ++c) {
    Tensor xc({2, 1, 5, 6});
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j) xc.at(b, 0, i, j) = x.at(b, c, i, j);
    const Tensor yc = Conv2D(xc, k, {}, Padding::kSame);
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 6; ++j) EXPECT_NEAR(y.at(b, c, i, j), yc.at(b, 0, i, j), 1e-12);
  }
}

TEST(SeparableConv2DTest, EqualsComposition) {
  std::mt19937_64 rng(9);
  const Tensor x = RandomTensor({1, 3, 4, 4}, rng);
  const Tensor depth = RandomTensor({3, 1, 3, 3}, rng);
  const Tensor point = RandomTensor({5, 3, 1, 1}, rng);
  const Tensor two_stage =
      Conv2D(DepthwiseConv2D(x, depth, Padding::kSame), point, {}, Padding::kValid);
  ExpectTensorNear(SeparableConv2D(x, depth, point, Padding::kSame), two_stage, 1e-12);
}

TEST(SeparableConv2DTest, IdentityStages) {
  std::mt19937_64 rng(10);
  const Tensor x = RandomTensor({1, 3, 4, 4}, rng);
  Tensor point({3, 3, 1, 1});
  for (int c = 0; c < 3; ++c) point[c * 3 + c] = 1.0;
  EXPECT_EQ(SeparableConv2D(x, Tensor({3, 1, 1, 1}, 1.0), point, Padding::kValid), x);
}

TEST(SeparableConv2DTest, MatchesNaiveTwoStageOracle) {
  std::mt19937_64 rng(11);
  const Tensor x = RandomTensor({1, 3, 4, 4}, rng);
  const Tensor depth = RandomTensor({3, 1, 2, 3}, rng);
  const Tensor point = RandomTensor({2, 3, 1, 1}, rng);
  // Stage one: each channel with its own kernel.
  Tensor stage({1, 3, 4, 4});
  for (int c = 0; c < 3; ++c) {
    Tensor xc({1, 1, 4, 4}), kc({1, 1, 2, 3});
    for (int i = 0; i < 16; ++i) xc[i] = x[c * 16 + i];
    for (int i = 0; i < 6; ++i) kc[i] = depth[c * 6 + i];
    const Tensor yc = NaiveConv(xc, kc, Padding::kSame);
    for (int i = 0; i < 16; ++i) stage[c * 16 + i] = yc[i];
  }
  ExpectTensorNear(SeparableConv2D(x, depth, point, Padding::kSame),
                   NaiveConv(stage, point, Padding::kValid), 1e-12);
}

TEST(AvgPool2DTest, HandComputed) {
  EXPECT_EQ(AvgPool2D(Tensor({1, 1, 2, 2}, {1, 2, 3, 4}), 2, 2), Tensor({1, 1, 1, 1}, 2.5));
}

TEST(AvgPool2DTest, ConstantInput) {
  const Tensor y = AvgPool2D(Tensor({1, 2, 4, 6}, 0.3), 2, 3);
  for (double v : y.values()) EXPECT_DOUBLE_EQ(v, 0.3);
}

TEST(AvgPool2DTest, UnitPoolIsIdentity) {
  std::mt19937_64 rng(12);
  const Tensor x = RandomTensor({2, 2, 3, 5}, rng);
  EXPECT_EQ(AvgPool2D(x, 1, 1), x);
}

TEST(AvgPool2DTest, TruncatesIncompleteWindows) {
  const Tensor y = AvgPool2D(Tensor({1, 1, 1, 87}, 1.0), 1, 4);
  EXPECT_EQ(y.shape(), (std::vector<int>{1, 1, 1, 21}));
  EXPECT_EQ(AvgPool2D(Tensor({1, 1, 17, 87}), 2, 2).shape(), (std::vector<int>{1, 1, 8, 43}));
}

TEST(AvgPool2DTest, RejectsOversizedPool) {
  EXPECT_THROW(AvgPool2D(Tensor({1, 1, 2, 2}), 3, 1), ShapeError);
}

TEST(AvgPool2DTest, PreservesGlobalMeanWhenTiling) {
  std::mt19937_64 rng(13);
  const Tensor x = RandomTensor({1, 1, 6, 8}, rng);
  const Tensor y = AvgPool2D(x, 3, 2);
  double mx = 0.0, my = 0.0;
  for (double v : x.values()) mx += v;
  for (double v : y.values()) my += v;
  EXPECT_NEAR(mx / x.size(), my / y.size(), 1e-14);
}

TEST(BatchNormTest, HandComputedPair) {
  BatchNormParams params = BatchNormParams::Identity(1);
  params.epsilon = 1e-12;
  const Tensor y = BatchNorm(Tensor({2, 1}, {1.0, 3.0}), params, Mode::kTrain);
  EXPECT_NEAR(y[0], -1.0, 1e-9);
  EXPECT_NEAR(y[1], 1.0, 1e-9);
}

TEST(BatchNormTest, StandardizedBatchUnchanged) {
  BatchNormParams params = BatchNormParams::Identity(1);
  const Tensor x({4, 1}, {-1.0, 1.0, -1.0, 1.0});
  const Tensor y = BatchNorm(x, params, Mode::kTrain);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(y[i], x[i], 1e-5);
}

TEST(BatchNormTest, ZeroScaleGivesShift) {
  std::mt19937_64 rng(14);
  BatchNormParams params = BatchNormParams::Identity(2);
  params.scale.Fill(0.0);
  params.shift.Fill(0.75);
  const Tensor y = BatchNorm(RandomTensor({3, 2, 2, 2}, rng), params, Mode::kTrain);
  for (double v : y.values()) EXPECT_EQ(v, 0.75);
}

TEST(BatchNormTest, RejectsSingleSampleInTrainMode) {
  BatchNormParams params = BatchNormParams::Identity(1);
  EXPECT_THROW(BatchNorm(Tensor({1, 1, 2, 2}), params, Mode::kTrain), ShapeError);
}

TEST(BatchNormTest, TrainOutputIsStandardized) {
  std::mt19937_64 rng(15);
  BatchNormParams params = BatchNormParams::Identity(3);
  const Tensor y = BatchNorm(RandomTensor({8, 3, 2, 5}, rng, -3.0, 7.0), params, Mode::kTrain);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0, sq = 0.0;
    int n = 0;
    for (int b = 0; b < 8; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 5; ++j) {
          mean += y.at(b, c, i, j);
          ++n;
        }
    mean /= n;
    for (int b = 0; b < 8; ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 5; ++j) sq += (y.at(b, c, i, j) - mean) * (y.at(b, c, i, j) - mean);
    EXPECT_LE(std::abs(mean), 1e-9);
    EXPECT_NEAR(sq / n, 1.0, 1e-6 + 1e-5 * 10);  // epsilon shrinks the variance slightly
  }
}

TEST(BatchNormTest, RunningStatisticsUseMomentum) {
  BatchNormParams params = BatchNormParams::Identity(1);
  BatchNorm(Tensor({2, 1}, {1.0, 3.0}), params, Mode::kTrain);
  EXPECT_NEAR(params.running_mean[0], 0.99 * 0.0 + 0.01 * 2.0, 1e-15);
  EXPECT_NEAR(params.running_var[0], 0.99 * 1.0 + 0.01 * 1.0, 1e-15);
  // Infer mode uses the running statistics and leaves them alone.
  const Tensor y = BatchNorm(Tensor({1, 1}, {0.02}), params, Mode::kInfer);
  EXPECT_NEAR(y[0], 0.0, 1e-12);
  EXPECT_NEAR(params.running_mean[0], 0.02, 1e-15);
}

TEST(EluTest, ClosedForms) {
  EXPECT_EQ(Elu(0.0), 0.0);
  EXPECT_EQ(Elu(2.0), 2.0);
  EXPECT_NEAR(Elu(-1.0), std::exp(-1.0) - 1.0, 1e-15);
  EXPECT_NEAR(Elu(-1.0), -0.6321206, 1e-7);
}

TEST(DenseTest, IdentityWeights) {
  const Tensor x({2, 2}, {1.0, -2.0, 3.0, 4.0});
  EXPECT_EQ(Dense(x, Tensor({2, 2}, {1, 0, 0, 1}), {}), x);
}

TEST(DenseTest, ZeroWeightsGiveBias) {
  const std::vector<double> bias = {5.0};
  const Tensor y = Dense(Tensor({3, 2}, 1.0), Tensor({2, 1}), bias);
  for (double v : y.values()) EXPECT_EQ(v, 5.0);
}

TEST(DenseTest, HandDotProduct) {
  const std::vector<double> bias = {1.0};
  EXPECT_EQ(Dense(Tensor({1, 2}, {1, 2}), Tensor({2, 1}, {1, 3}), bias), Tensor({1, 1}, 8.0));
}

TEST(DenseTest, RejectsWidthMismatch) {
  EXPECT_THROW(Dense(Tensor({1, 3}), Tensor({2, 1}), {}), ShapeError);
}

TEST(DenseTest, BackwardHandAlgebra) {
  const Tensor x({1, 2}, {1.0, 2.0});
  const Tensor w({2, 2}, {1.0, 2.0, 3.0, 4.0});
  const Tensor g({1, 2}, {0.5, -1.0});
  const DenseGrads grads = DenseBackward(x, w, g, true);
  // input grad = g W^T
  EXPECT_EQ(grads.input, Tensor({1, 2}, {0.5 - 2.0, 1.5 - 4.0}));
  // weight grad = x^T g
  EXPECT_EQ(grads.weights, Tensor({2, 2}, {0.5, -1.0, 1.0, -2.0}));
  EXPECT_EQ(grads.bias, (std::vector<double>{0.5, -1.0}));
}

TEST(DenseTest, ZeroDownstreamWeightsGiveZeroInputGrad) {
  std::mt19937_64 rng(16);
  const DenseGrads grads =
      DenseBackward(RandomTensor({3, 4}, rng), Tensor({4, 2}), RandomTensor({3, 2}, rng), true);
  for (double v : grads.input.values()) EXPECT_EQ(v, 0.0);
}

TEST(SigmoidBceTest, SymmetricPoint) {
  const BceResult r = SigmoidBce(0.0, 1);
  EXPECT_NEAR(r.loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(r.loss, 0.693147, 1e-6);
  EXPECT_DOUBLE_EQ(r.dloss_dlogit, -0.5);
}

TEST(SigmoidBceTest, ClosedForm) {
  EXPECT_NEAR(SigmoidBce(1.0, 0).loss, 1.313262, 1e-6);
  EXPECT_NEAR(SigmoidBce(1.0, 0).dloss_dlogit, Sigmoid(1.0), 1e-15);
}

TEST(SigmoidBceTest, SaturatesWithoutOverflow) {
  EXPECT_LT(SigmoidBce(30.0, 1).loss, 1e-12);
  EXPECT_TRUE(std::isfinite(SigmoidBce(-800.0, 1).loss));
  EXPECT_NEAR(SigmoidBce(-800.0, 1).loss, 800.0, 1e-9);
  EXPECT_TRUE(std::isfinite(SigmoidBce(800.0, 0).loss));
}

// Finite-difference checks of every backward kernel on small random shapes.
// The scalar objective is <upstream, forward(x)>.

TEST(BackwardTest, Conv2DMatchesFiniteDifferences) {
  std::mt19937_64 rng(17);
  for (Padding p : {Padding::kSame, Padding::kValid}) {
    Tensor x = RandomTensor({2, 2, 4, 5}, rng);
    Tensor k = RandomTensor({3, 2, 2, 3}, rng);
    const Tensor up = RandomTensor(Conv2D(x, k, {}, p).shape(), rng);
    const Conv2DGrads g = Conv2DBackward(x, k, up, p, true);
    auto f = [&] { return Dot(up, Conv2D(x, k, {}, p)); };
    for (std::size_t i = 0; i < x.size(); i += 3) {
      EXPECT_NEAR(g.input[i], NumericDerivative(x, i, f), 1e-7);
    }
    for (std::size_t i = 0; i < k.size(); ++i) {
      EXPECT_NEAR(g.kernels[i], NumericDerivative(k, i, f), 1e-7);
    }
  }
}

TEST(BackwardTest, DepthwiseMatchesFiniteDifferences) {
  std::mt19937_64 rng(18);
  Tensor x = RandomTensor({2, 2, 5, 4}, rng);
  Tensor k = RandomTensor({2, 2, 3, 2}, rng);
  const Tensor up = RandomTensor(DepthwiseConv2D(x, k, Padding::kSame).shape(), rng);
  const DepthwiseGrads g = DepthwiseConv2DBackward(x, k, up, Padding::kSame, true);
  auto f = [&] { return Dot(up, DepthwiseConv2D(x, k, Padding::kSame)); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(g.input[i], NumericDerivative(x, i, f), 1e-7);
  }
  for (std::size_t i = 0; i < k.size(); ++i) {
    EXPECT_NEAR(g.kernels[i], NumericDerivative(k, i, f), 1e-7);
  }
}

TEST(BackwardTest, AvgPoolMatchesFiniteDifferences) {
  std::mt19937_64 rng(19);
  Tensor x = RandomTensor({1, 2, 4, 7}, rng);
  const Tensor up = RandomTensor(AvgPool2D(x, 2, 3).shape(), rng);
  const Tensor g = AvgPool2DBackward(x.shape(), up, 2, 3);
  auto f = [&] { return Dot(up, AvgPool2D(x, 2, 3)); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(g[i], NumericDerivative(x, i, f), 1e-8);
  }
}

TEST(BackwardTest, BatchNormTrainMatchesFiniteDifferences) {
  std::mt19937_64 rng(20);
  Tensor x = RandomTensor({4, 2, 2, 3}, rng);
  BatchNormParams params = BatchNormParams::Identity(2);
  params.scale = RandomTensor({2}, rng, 0.5, 1.5);
  params.shift = RandomTensor({2}, rng);
  const Tensor up = RandomTensor(x.shape(), rng);
  BatchNormCache cache;
  BatchNormForward(x, params, Mode::kTrain, &cache);
  const BatchNormGrads g = BatchNormBackward(up, x, params, cache);
  auto f = [&] { return Dot(up, BatchNormForward(x, params, Mode::kTrain, nullptr)); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double numeric = NumericDerivative(x, i, f);
    EXPECT_LE(std::abs(g.input[i] - numeric) / std::max(1e-8, std::abs(g.input[i]) + std::abs(numeric)),
              1e-4);
  }
  for (int c = 0; c < 2; ++c) {
    EXPECT_NEAR(g.scale[c], NumericDerivative(params.scale, c, f), 1e-7);
    EXPECT_NEAR(g.shift[c], NumericDerivative(params.shift, c, f), 1e-7);
  }
}

TEST(BackwardTest, EluMatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  Tensor x = RandomTensor({3, 5}, rng, -2.0, 2.0);
  const Tensor up = RandomTensor(x.shape(), rng);
  const Tensor g = EluBackward(x, up);
  auto f = [&] { return Dot(up, Elu(x)); };
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(g[i], NumericDerivative(x, i, f), 1e-7);
  }
}

TEST(BackwardTest, DenseMatchesFiniteDifferences) {
  std::mt19937_64 rng(22);
  Tensor x = RandomTensor({3, 4}, rng);
  Tensor w = RandomTensor({4, 2}, rng);
  const Tensor up = RandomTensor({3, 2}, rng);
  const DenseGrads g = DenseBackward(x, w, up, true);
  auto f = [&] { return Dot(up, Dense(x, w, {})); };
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(g.input[i], NumericDerivative(x, i, f), 1e-8);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(g.weights[i], NumericDerivative(w, i, f), 1e-8);
}

TEST(KernelsTest, Deterministic) {
  std::mt19937_64 rng(23);
  const Tensor x = RandomTensor({2, 3, 6, 8}, rng);
  const Tensor k = RandomTensor({4, 3, 3, 3}, rng);
  EXPECT_EQ(Conv2D(x, k, {}, Padding::kSame), Conv2D(x, k, {}, Padding::kSame));
  BatchNormParams p1 = BatchNormParams::Identity(3), p2 = BatchNormParams::Identity(3);
  EXPECT_EQ(BatchNorm(x, p1, Mode::kTrain), BatchNorm(x, p2, Mode::kTrain));
}

TEST(KernelsTest, FiniteOutputsOnFiniteInputs) {
  std::mt19937_64 rng(24);
  const Tensor x = RandomTensor({2, 1, 17, 87}, rng, -50.0, 50.0);
  EXPECT_TRUE(Elu(Conv2D(x, RandomTensor({2, 1, 1, 29}, rng), {}, Padding::kSame)).AllFinite());
}

TEST(TensorTest, ShapeInvariants) {
  const Tensor t({2, 3, 4});
  EXPECT_EQ(t.size(), 24u);
  EXPECT_THROW(Tensor({2, 0}), ShapeError);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), ShapeError);
  EXPECT_THROW(t.Reshaped({5, 5}), ShapeError);
  EXPECT_EQ(t.Reshaped({4, 6}).shape(), (std::vector<int>{4, 6}));
}

}  // namespace
}  // namespace aucnn::kernels
