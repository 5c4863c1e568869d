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

#ifndef AUCNN_GRAD_CHECK_H_
#define AUCNN_GRAD_CHECK_H_

#include <cstdint>
#include <vector>

#include "aucnn/model.h"
#include "aucnn/tensor.h"

namespace aucnn {

struct GradCheckEntry {
  int layer = 0;
  int parameter = 0;
  std::size_t index = 0;
  double analytic = 0.0;
  double numeric = 0.0;
  double relative_error = 0.0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_relative_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct GradCheckOptions {
  int num_samples = 200;
  double step = 1e-5;
  double tolerance = 1e-4;
  std::uint64_t seed = 0;
};

// |a - n| / max(1e-8, |a| + |n|)
double GradRelativeError(double analytic, double numeric);

// Mean binary cross-entropy of the model's logits over a batch.
double BatchLoss(const Model& model, const Tensor& batch,
                 const std::vector<int>& labels, const ForwardContext& ctx,
                 ForwardTrace* trace);

// Compares backpropagated gradients of the mean BCE loss (train mode, fixed
// dropout masks) against central finite differences at `num_samples`
// uniformly sampled trainable scalars. Requires a batch of at least 2.
GradCheckReport GradCheck(const Model& model, const Tensor& batch,
                          const std::vector<int>& labels,
                          const GradCheckOptions& options);

}  // namespace aucnn

#endif  // AUCNN_GRAD_CHECK_H_
