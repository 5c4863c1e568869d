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

#include <algorithm>
#include <cmath>
#include <string>

#include "aucnn/errors.h"

namespace aucnn::kernels {
namespace {

struct Dims4 {
  int n, c, h, w;
};

// Accepts [C,H,W] or [N,C,H,W].
Dims4 SpatialDims(const Tensor& t, const char* what) {
  if (t.rank() == 4) return {t.dim(0), t.dim(1), t.dim(2), t.dim(3)};
  if (t.rank() == 3) return {1, t.dim(0), t.dim(1), t.dim(2)};
  throw ShapeError(std::string(what) + " must be rank 3 or 4, got " +
                   t.ShapeString());
}

std::vector<int> SpatialShape(bool batched, int n, int c, int h, int w) {
  if (batched) return {n, c, h, w};
  return {c, h, w};
}

PadAmount PadFor(int kernel_extent, Padding padding) {
  return padding == Padding::kSame ? SamePadding(kernel_extent) : PadAmount{};
}

// Range of output positions o for which o + k - pad lies inside [0, in).
inline void ValidRange(int out_extent, int in_extent, int k, int pad, int* lo,
                       int* hi) {
  *lo = std::max(0, pad - k);
  *hi = std::min(out_extent, in_extent + pad - k);
}

// out_plane[oy, ox] += w * in_plane[oy + ky - pt, ox + kx - pl]
inline void AccumulatePlane(const double* in, int h, int w, double* out, int ho,
                            int wo, int ky, int kx, PadAmount ph,
                            PadAmount pw, double weight) {
  int y0, y1, x0, x1;
  ValidRange(ho, h, ky, ph.before, &y0, &y1);
  ValidRange(wo, w, kx, pw.before, &x0, &x1);
  for (int oy = y0; oy < y1; ++oy) {
    const double* in_row = in + (oy + ky - ph.before) * w + (kx - pw.before);
    double* out_row = out + oy * wo;
    for (int ox = x0; ox < x1; ++ox) out_row[ox] += weight * in_row[ox];
  }
}

// in_plane[oy + ky - pt, ox + kx - pl] += w * out_plane[oy, ox]
inline void ScatterPlane(const double* grad_out, int ho, int wo, double* grad_in,
                         int h, int w, int ky, int kx, PadAmount ph,
                         PadAmount pw, double weight) {
  int y0, y1, x0, x1;
  ValidRange(ho, h, ky, ph.before, &y0, &y1);
  ValidRange(wo, w, kx, pw.before, &x0, &x1);
  for (int oy = y0; oy < y1; ++oy) {
    double* in_row = grad_in + (oy + ky - ph.before) * w + (kx - pw.before);
    const double* out_row = grad_out + oy * wo;
    for (int ox = x0; ox < x1; ++ox) in_row[ox] += weight * out_row[ox];
  }
}

// sum over (oy, ox) of grad_out[oy, ox] * in[oy + ky - pt, ox + kx - pl]
inline double CorrelatePlane(const double* grad_out, int ho, int wo,
                             const double* in, int h, int w, int ky, int kx,
                             PadAmount ph, PadAmount pw) {
  int y0, y1, x0, x1;
  ValidRange(ho, h, ky, ph.before, &y0, &y1);
  ValidRange(wo, w, kx, pw.before, &x0, &x1);
  // Four partial sums so the reduction vectorizes.
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (int oy = y0; oy < y1; ++oy) {
    const double* in_row = in + (oy + ky - ph.before) * w + (kx - pw.before);
    const double* out_row = grad_out + oy * wo;
    int ox = x0;
    for (; ox + 4 <= x1; ox += 4) {
      s0 += out_row[ox] * in_row[ox];
      s1 += out_row[ox + 1] * in_row[ox + 1];
      s2 += out_row[ox + 2] * in_row[ox + 2];
      s3 += out_row[ox + 3] * in_row[ox + 3];
    }
    for (; ox < x1; ++ox) s0 += out_row[ox] * in_row[ox];
  }
  return (s0 + s1) + (s2 + s3);
}

void CheckKernelFits(int h, int w, int kh, int kw, Padding padding) {
  if (padding == Padding::kValid && (kh > h || kw > w)) {
    throw ShapeError("kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                     " larger than input " + std::to_string(h) + "x" +
                     std::to_string(w) + " with valid padding");
  }
}

}  // namespace

PadAmount SamePadding(int kernel_extent) {
  const int total = kernel_extent - 1;
  return {total / 2, total - total / 2};
}

int ConvOutputExtent(int input_extent, int kernel_extent, Padding padding) {
  return padding == Padding::kSame ? input_extent
                                   : input_extent - kernel_extent + 1;
}

Tensor Conv2D(const Tensor& input, const Tensor& kernels,
              std::span<const double> bias, Padding padding) {
  const Dims4 in = SpatialDims(input, "conv2d input");
  if (kernels.rank() != 4) {
    throw ShapeError("conv2d kernels must be [Cout,Cin,kh,kw], got " +
                     kernels.ShapeString());
  }
  const int cout = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
  if (kernels.dim(1) != in.c) {
    throw ShapeError("conv2d kernels " + kernels.ShapeString() +
                     " expect " + std::to_string(kernels.dim(1)) +
                     " input channels but input is " + input.ShapeString());
  }
  if (!bias.empty() && static_cast<int>(bias.size()) != cout) {
    throw ShapeError("conv2d bias length " + std::to_string(bias.size()) +
                     " does not match " + std::to_string(cout) + " kernels");
  }
  CheckKernelFits(in.h, in.w, kh, kw, padding);
  const int ho = ConvOutputExtent(in.h, kh, padding);
  const int wo = ConvOutputExtent(in.w, kw, padding);
  const PadAmount ph = PadFor(kh, padding), pw = PadFor(kw, padding);

  Tensor out(SpatialShape(input.rank() == 4, in.n, cout, ho, wo));
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(ho) * wo;
  for (int n = 0; n < in.n; ++n) {
    for (int co = 0; co < cout; ++co) {
      double* o = out.data() + (static_cast<std::size_t>(n) * cout + co) * out_plane;
      if (!bias.empty()) std::fill(o, o + out_plane, bias[co]);
      for (int ci = 0; ci < in.c; ++ci) {
        const double* x =
            input.data() + (static_cast<std::size_t>(n) * in.c + ci) * in_plane;
        const double* k =
            kernels.data() + (static_cast<std::size_t>(co) * in.c + ci) * kh * kw;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            AccumulatePlane(x, in.h, in.w, o, ho, wo, ky, kx, ph, pw,
                            k[ky * kw + kx]);
          }
        }
      }
    }
  }
  return out;
}

Conv2DGrads Conv2DBackward(const Tensor& input, const Tensor& kernels,
                           const Tensor& grad_output, Padding padding,
                           bool need_input_grad, bool need_kernel_grad) {
  const Dims4 in = SpatialDims(input, "conv2d input");
  const Dims4 go = SpatialDims(grad_output, "conv2d grad_output");
  const int cout = kernels.dim(0), kh = kernels.dim(2), kw = kernels.dim(3);
  if (kernels.dim(1) != in.c || go.n != in.n || go.c != cout ||
      go.h != ConvOutputExtent(in.h, kh, padding) ||
      go.w != ConvOutputExtent(in.w, kw, padding)) {
    throw ShapeError("conv2d backward: grad_output " +
                     grad_output.ShapeString() + " inconsistent with input " +
                     input.ShapeString() + " and kernels " +
                     kernels.ShapeString());
  }
  const PadAmount ph = PadFor(kh, padding), pw = PadFor(kw, padding);
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(go.h) * go.w;

  Conv2DGrads grads;
  grads.kernels = Tensor(kernels.shape());
  grads.bias.assign(cout, 0.0);
  if (need_input_grad) grads.input = Tensor(input.shape());

  for (int n = 0; n < in.n; ++n) {
    for (int co = 0; co < cout; ++co) {
      const double* g =
          grad_output.data() + (static_cast<std::size_t>(n) * cout + co) * out_plane;
      double bsum = 0.0;
      for (std::size_t i = 0; i < out_plane; ++i) bsum += g[i];
      grads.bias[co] += bsum;
      for (int ci = 0; ci < in.c; ++ci) {
        const std::size_t in_off = (static_cast<std::size_t>(n) * in.c + ci) * in_plane;
        const double* x = input.data() + in_off;
        const std::size_t k_off = (static_cast<std::size_t>(co) * in.c + ci) * kh * kw;
        double* gk = grads.kernels.data() + k_off;
        const double* k = kernels.data() + k_off;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            if (need_kernel_grad) {
              gk[ky * kw + kx] +=
                  CorrelatePlane(g, go.h, go.w, x, in.h, in.w, ky, kx, ph, pw);
            }
            if (need_input_grad) {
              ScatterPlane(g, go.h, go.w, grads.input.data() + in_off, in.h,
                           in.w, ky, kx, ph, pw, k[ky * kw + kx]);
            }
          }
        }
      }
    }
  }
  return grads;
}

Tensor DepthwiseConv2D(const Tensor& input, const Tensor& kernels,
                       Padding padding) {
  const Dims4 in = SpatialDims(input, "depthwise input");
  if (kernels.rank() != 4) {
    throw ShapeError("depthwise kernels must be [C,D,kh,kw], got " +
                     kernels.ShapeString());
  }
  const int depth = kernels.dim(1), kh = kernels.dim(2), kw = kernels.dim(3);
  if (depth < 1) throw ShapeError("depth multiplier must be >= 1");
  if (kernels.dim(0) != in.c) {
    throw ShapeError("depthwise kernels " + kernels.ShapeString() +
                     " do not match input channels of " + input.ShapeString());
  }
  CheckKernelFits(in.h, in.w, kh, kw, padding);
  const int ho = ConvOutputExtent(in.h, kh, padding);
  const int wo = ConvOutputExtent(in.w, kw, padding);
  const PadAmount ph = PadFor(kh, padding), pw = PadFor(kw, padding);
  const int cout = in.c * depth;
  Tensor out(SpatialShape(input.rank() == 4, in.n, cout, ho, wo));
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(ho) * wo;
  for (int n = 0; n < in.n; ++n) {
    for (int c = 0; c < in.c; ++c) {
      const double* x =
          input.data() + (static_cast<std::size_t>(n) * in.c + c) * in_plane;
      for (int d = 0; d < depth; ++d) {
        const int oc = c * depth + d;
        double* o = out.data() + (static_cast<std::size_t>(n) * cout + oc) * out_plane;
        const double* k = kernels.data() + static_cast<std::size_t>(oc) * kh * kw;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            AccumulatePlane(x, in.h, in.w, o, ho, wo, ky, kx, ph, pw,
                            k[ky * kw + kx]);
          }
        }
      }
    }
  }
  return out;
}

DepthwiseGrads DepthwiseConv2DBackward(const Tensor& input,
                                       const Tensor& kernels,
                                       const Tensor& grad_output,
                                       Padding padding, bool need_input_grad,
                                       bool need_kernel_grad) {
  const Dims4 in = SpatialDims(input, "depthwise input");
  const Dims4 go = SpatialDims(grad_output, "depthwise grad_output");
  const int depth = kernels.dim(1), kh = kernels.dim(2), kw = kernels.dim(3);
  const int cout = in.c * depth;
  if (kernels.dim(0) != in.c || go.n != in.n || go.c != cout ||
      go.h != ConvOutputExtent(in.h, kh, padding) ||
      go.w != ConvOutputExtent(in.w, kw, padding)) {
    throw ShapeError("depthwise backward: grad_output " +
                     grad_output.ShapeString() + " inconsistent with input " +
                     input.ShapeString() + " and kernels " +
                     kernels.ShapeString());
  }
  const PadAmount ph = PadFor(kh, padding), pw = PadFor(kw, padding);
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(go.h) * go.w;
  DepthwiseGrads grads;
  grads.kernels = Tensor(kernels.shape());
  if (need_input_grad) grads.input = Tensor(input.shape());
  for (int n = 0; n < in.n; ++n) {
    for (int c = 0; c < in.c; ++c) {
      const std::size_t in_off = (static_cast<std::size_t>(n) * in.c + c) * in_plane;
      const double* x = input.data() + in_off;
      for (int d = 0; d < depth; ++d) {
        const int oc = c * depth + d;
        const double* g =
            grad_output.data() + (static_cast<std::size_t>(n) * cout + oc) * out_plane;
        const double* k = kernels.data() + static_cast<std::size_t>(oc) * kh * kw;
        double* gk = grads.kernels.data() + static_cast<std::size_t>(oc) * kh * kw;
        for (int ky = 0; ky < kh; ++ky) {
          for (int kx = 0; kx < kw; ++kx) {
            if (need_kernel_grad) {
              gk[ky * kw + kx] +=
                  CorrelatePlane(g, go.h, go.w, x, in.h, in.w, ky, kx, ph, pw);
            }
            if (need_input_grad) {
              ScatterPlane(g, go.h, go.w, grads.input.data() + in_off, in.h,
                           in.w, ky, kx, ph, pw, k[ky * kw + kx]);
            }
          }
        }
      }
    }
  }
  return grads;
}

Tensor SeparableConv2D(const Tensor& input, const Tensor& depth_kernels,
                       const Tensor& point_kernels, Padding padding) {
  if (depth_kernels.rank() != 4 || depth_kernels.dim(1) != 1) {
    throw ShapeError("separable depth kernels must be [C,1,kh,kw], got " +
                     depth_kernels.ShapeString());
  }
  if (point_kernels.rank() != 4 || point_kernels.dim(2) != 1 ||
      point_kernels.dim(3) != 1) {
    throw ShapeError("separable point kernels must be [Cout,C,1,1], got " +
                     point_kernels.ShapeString());
  }
  const Tensor depthwise = DepthwiseConv2D(input, depth_kernels, padding);
  return Conv2D(depthwise, point_kernels, {}, Padding::kValid);
}

Tensor AvgPool2D(const Tensor& input, int pool_h, int pool_w) {
  const Dims4 in = SpatialDims(input, "avg_pool input");
  if (pool_h < 1 || pool_w < 1 || pool_h > in.h || pool_w > in.w) {
    throw ShapeError("pool " + std::to_string(pool_h) + "x" +
                     std::to_string(pool_w) + " does not fit input " +
                     input.ShapeString());
  }
  const int ho = in.h / pool_h, wo = in.w / pool_w;
  Tensor out(SpatialShape(input.rank() == 4, in.n, in.c, ho, wo));
  const double inv = 1.0 / (pool_h * pool_w);
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(ho) * wo;
  const std::size_t planes = static_cast<std::size_t>(in.n) * in.c;
  for (std::size_t p = 0; p < planes; ++p) {
    const double* x = input.data() + p * in_plane;
    double* o = out.data() + p * out_plane;
    for (int oy = 0; oy < ho; ++oy) {
      for (int ox = 0; ox < wo; ++ox) {
        double sum = 0.0;
        for (int dy = 0; dy < pool_h; ++dy) {
          const double* row = x + (oy * pool_h + dy) * in.w + ox * pool_w;
          for (int dx = 0; dx < pool_w; ++dx) sum += row[dx];
        }
        o[oy * wo + ox] = sum * inv;
      }
    }
  }
  return out;
}

Tensor AvgPool2DBackward(const std::vector<int>& input_shape,
                         const Tensor& grad_output, int pool_h, int pool_w) {
  Tensor grad_input(input_shape);
  const Dims4 in = SpatialDims(grad_input, "avg_pool input");
  const Dims4 go = SpatialDims(grad_output, "avg_pool grad_output");
  if (go.n != in.n || go.c != in.c || go.h != in.h / pool_h ||
      go.w != in.w / pool_w) {
    throw ShapeError("avg_pool backward: grad_output " +
                     grad_output.ShapeString() + " inconsistent with input " +
                     ShapeToString(input_shape));
  }
  const double inv = 1.0 / (pool_h * pool_w);
  const std::size_t in_plane = static_cast<std::size_t>(in.h) * in.w;
  const std::size_t out_plane = static_cast<std::size_t>(go.h) * go.w;
  const std::size_t planes = static_cast<std::size_t>(in.n) * in.c;
  for (std::size_t p = 0; p < planes; ++p) {
    double* gx = grad_input.data() + p * in_plane;
    const double* g = grad_output.data() + p * out_plane;
    for (int oy = 0; oy < go.h; ++oy) {
      for (int ox = 0; ox < go.w; ++ox) {
        const double v = g[oy * go.w + ox] * inv;
        for (int dy = 0; dy < pool_h; ++dy) {
          double* row = gx + (oy * pool_h + dy) * in.w + ox * pool_w;
          for (int dx = 0; dx < pool_w; ++dx) row[dx] += v;
        }
      }
    }
  }
  return grad_input;
}

BatchNormParams BatchNormParams::Identity(int channels) {
  BatchNormParams p;
  p.scale = Tensor({channels}, 1.0);
  p.shift = Tensor({channels}, 0.0);
  p.running_mean = Tensor({channels}, 0.0);
  p.running_var = Tensor({channels}, 1.0);
  return p;
}

namespace {

struct ChannelLayout {
  int n, c;
  std::size_t inner;
};

ChannelLayout LayoutOf(const Tensor& t, const BatchNormParams& params) {
  if (t.rank() < 2) {
    throw ShapeError("batch_norm input must be [N,C,...], got " +
                     t.ShapeString());
  }
  const int c = t.dim(1);
  if (static_cast<int>(params.scale.size()) != c ||
      static_cast<int>(params.shift.size()) != c ||
      static_cast<int>(params.running_mean.size()) != c ||
      static_cast<int>(params.running_var.size()) != c) {
    throw ShapeError("batch_norm parameters do not match " +
                     std::to_string(c) + " channels of " + t.ShapeString());
  }
  return {t.dim(0), c, t.size() / (static_cast<std::size_t>(t.dim(0)) * c)};
}

}  // namespace

Tensor BatchNormForward(const Tensor& batch, const BatchNormParams& params,
                        Mode mode, BatchNormCache* cache) {
  const ChannelLayout l = LayoutOf(batch, params);
  std::vector<double> mean(l.c), var(l.c), inv_std(l.c);
  if (mode == Mode::kTrain) {
    if (l.n < 2) {
      throw ShapeError("batch_norm in train mode needs a batch of at least 2");
    }
    const double count = static_cast<double>(l.n) * l.inner;
    for (int c = 0; c < l.c; ++c) {
      double sum = 0.0;
      for (int n = 0; n < l.n; ++n) {
        const double* x = batch.data() + (static_cast<std::size_t>(n) * l.c + c) * l.inner;
        for (std::size_t i = 0; i < l.inner; ++i) sum += x[i];
      }
      mean[c] = sum / count;
      double sq = 0.0;
      for (int n = 0; n < l.n; ++n) {
        const double* x = batch.data() + (static_cast<std::size_t>(n) * l.c + c) * l.inner;
        for (std::size_t i = 0; i < l.inner; ++i) {
          const double d = x[i] - mean[c];
          sq += d * d;
        }
      }
      var[c] = sq / count;
    }
  } else {
    for (int c = 0; c < l.c; ++c) {
      mean[c] = params.running_mean[c];
      var[c] = params.running_var[c];
    }
  }
  for (int c = 0; c < l.c; ++c) {
    inv_std[c] = 1.0 / std::sqrt(var[c] + params.epsilon);
  }

  Tensor out(batch.shape());
  for (int n = 0; n < l.n; ++n) {
    for (int c = 0; c < l.c; ++c) {
      const std::size_t off = (static_cast<std::size_t>(n) * l.c + c) * l.inner;
      const double* x = batch.data() + off;
      double* o = out.data() + off;
      // y = scale * (x - mean) * inv_std + shift, folded into one affine map.
      const double a = params.scale[c] * inv_std[c];
      const double b = params.shift[c] - a * mean[c];
      for (std::size_t i = 0; i < l.inner; ++i) o[i] = a * x[i] + b;
    }
  }
  if (cache != nullptr) {
    cache->mode = mode;
    cache->mean = std::move(mean);
    cache->variance = std::move(var);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

void UpdateRunningStatistics(BatchNormParams& params,
                             const BatchNormCache& cache) {
  if (cache.mode != Mode::kTrain) return;
  const double m = params.momentum;
  for (std::size_t c = 0; c < cache.mean.size(); ++c) {
    params.running_mean[c] = m * params.running_mean[c] + (1.0 - m) * cache.mean[c];
    params.running_var[c] = m * params.running_var[c] + (1.0 - m) * cache.variance[c];
  }
}

Tensor BatchNorm(const Tensor& batch, BatchNormParams& params, Mode mode) {
  BatchNormCache cache;
  Tensor out = BatchNormForward(batch, params, mode, &cache);
  UpdateRunningStatistics(params, cache);
  return out;
}

BatchNormGrads BatchNormBackward(const Tensor& grad_output, const Tensor& input,
                                 const BatchNormParams& params,
                                 const BatchNormCache& cache,
                                 bool need_input_grad) {
  const ChannelLayout l = LayoutOf(grad_output, params);
  if (input.shape() != grad_output.shape() ||
      static_cast<int>(cache.mean.size()) != l.c) {
    throw ShapeError("batch_norm backward: grad_output " +
                     grad_output.ShapeString() + " does not match input " +
                     input.ShapeString() + " or cached statistics");
  }
  BatchNormGrads grads;
  if (need_input_grad) grads.input = Tensor(grad_output.shape());
  grads.scale.assign(l.c, 0.0);
  grads.shift.assign(l.c, 0.0);
  const double count = static_cast<double>(l.n) * l.inner;
  for (int c = 0; c < l.c; ++c) {
    const double m = cache.mean[c], s = cache.inv_std[c];
    double sum_g = 0.0, sum_gx = 0.0;
    for (int n = 0; n < l.n; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * l.c + c) * l.inner;
      const double* g = grad_output.data() + off;
      const double* x = input.data() + off;
      double sg = 0.0, sgx = 0.0;
      for (std::size_t i = 0; i < l.inner; ++i) {
        sg += g[i];
        sgx += g[i] * (x[i] - m);
      }
      sum_g += sg;
      sum_gx += sgx * s;
    }
    grads.shift[c] = sum_g;
    grads.scale[c] = sum_gx;
    if (!need_input_grad) continue;
    const double k = params.scale[c] * s;
    for (int n = 0; n < l.n; ++n) {
      const std::size_t off = (static_cast<std::size_t>(n) * l.c + c) * l.inner;
      const double* g = grad_output.data() + off;
      const double* x = input.data() + off;
      double* gx = grads.input.data() + off;
      if (cache.mode == Mode::kTrain) {
        const double mean_g = sum_g / count, mean_gx = sum_gx / count;
        for (std::size_t i = 0; i < l.inner; ++i) {
          gx[i] = k * (g[i] - mean_g - (x[i] - m) * s * mean_gx);
        }
      } else {
        for (std::size_t i = 0; i < l.inner; ++i) gx[i] = k * g[i];
      }
    }
  }
  return grads;
}

double Elu(double x) { return x > 0.0 ? x : std::expm1(x); }

double EluDerivative(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

Tensor Elu(const Tensor& x) {
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = Elu(x[i]);
  return out;
}

Tensor EluBackward(const Tensor& input, const Tensor& grad_output) {
  if (input.shape() != grad_output.shape()) {
    throw ShapeError("elu backward: grad_output " + grad_output.ShapeString() +
                     " does not match input " + input.ShapeString());
  }
  Tensor out(input.shape());
  for (std::size_t i = 0; i < input.size(); ++i) {
    out[i] = grad_output[i] * EluDerivative(input[i]);
  }
  return out;
}

Tensor Dense(const Tensor& x, const Tensor& weights,
             std::span<const double> bias) {
  if (x.rank() != 2 || weights.rank() != 2 || x.dim(1) != weights.dim(0)) {
    throw ShapeError("dense: input " + x.ShapeString() +
                     " incompatible with weights " + weights.ShapeString());
  }
  const int n = x.dim(0), din = x.dim(1), dout = weights.dim(1);
  if (!bias.empty() && static_cast<int>(bias.size()) != dout) {
    throw ShapeError("dense: bias length " + std::to_string(bias.size()) +
                     " does not match output width " + std::to_string(dout));
  }
  Tensor out({n, dout});
  for (int r = 0; r < n; ++r) {
    double* o = out.data() + static_cast<std::size_t>(r) * dout;
    if (!bias.empty()) std::copy(bias.begin(), bias.end(), o);
    const double* xr = x.data() + static_cast<std::size_t>(r) * din;
    for (int i = 0; i < din; ++i) {
      const double xi = xr[i];
      if (xi == 0.0) continue;
      const double* w = weights.data() + static_cast<std::size_t>(i) * dout;
      for (int j = 0; j < dout; ++j) o[j] += xi * w[j];
    }
  }
  return out;
}

DenseGrads DenseBackward(const Tensor& x, const Tensor& weights,
                         const Tensor& grad_output, bool need_input_grad,
                         bool need_weight_grad) {
  if (x.rank() != 2 || weights.rank() != 2 || grad_output.rank() != 2 ||
      x.dim(1) != weights.dim(0) || grad_output.dim(0) != x.dim(0) ||
      grad_output.dim(1) != weights.dim(1)) {
    throw ShapeError("dense backward: grad_output " +
                     grad_output.ShapeString() + " inconsistent with input " +
                     x.ShapeString() + " and weights " + weights.ShapeString());
  }
  const int n = x.dim(0), din = x.dim(1), dout = weights.dim(1);
  DenseGrads grads;
  grads.weights = Tensor(weights.shape());
  grads.bias.assign(dout, 0.0);
  if (need_input_grad) grads.input = Tensor(x.shape());
  for (int r = 0; r < n; ++r) {
    const double* g = grad_output.data() + static_cast<std::size_t>(r) * dout;
    const double* xr = x.data() + static_cast<std::size_t>(r) * din;
    for (int j = 0; j < dout; ++j) grads.bias[j] += g[j];
    for (int i = 0; i < din; ++i) {
      const double* w = weights.data() + static_cast<std::size_t>(i) * dout;
      double* gw = grads.weights.data() + static_cast<std::size_t>(i) * dout;
      const double xi = xr[i];
      double acc = 0.0;
      if (need_weight_grad) {
        for (int j = 0; j < dout; ++j) gw[j] += xi * g[j];
      }
      if (!need_input_grad) continue;
      for (int j = 0; j < dout; ++j) acc += g[j] * w[j];
      grads.input[static_cast<std::size_t>(r) * din + i] = acc;
    }
  }
  return grads;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

BceResult SigmoidBce(double logit, int label) {
  return {Softplus(logit) - label * logit, Sigmoid(logit) - label};
}

}  // namespace aucnn::kernels
