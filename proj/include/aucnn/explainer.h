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

#ifndef AUCNN_EXPLAINER_H_
#define AUCNN_EXPLAINER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aucnn/dataset.h"
#include "aucnn/model.h"
#include "aucnn/tensor.h"

namespace aucnn {

// Background inputs for DeepSHAP, stacked as [K, per-sample shape...].
struct ReferenceSet {
  Tensor inputs;
  std::string provenance;  // "zeros" or "training-sample draw"

  int size() const { return inputs.empty() ? 0 : inputs.dim(0); }
};

// A single all-zero reference of the given per-sample shape.
ReferenceSet ZeroReference(const std::vector<int>& sample_shape);
// `count` trials drawn without replacement from `pool` (indices into
// `trials`, which should already be normalized), seeded.
ReferenceSet DrawReferences(std::span<const AUTrial> trials,
                            std::span<const int> pool, int count,
                            std::uint64_t seed);

enum class AttributionTarget {
  kProbability,  // sigmoid of the logit
  kLogit,
};

struct AttributionMap {
  std::string trial_id;
  Tensor values;  // per-sample input shape, 17 x 87 for the networks
  std::string target = "stuttered";
  std::string reference;

  double at(int au_row, int frame) const { return values[au_row * kNumFrames + frame]; }
};

// DeepLIFT rescale-rule multipliers averaged over a reference set. Linear
// layers (convolutions, pooling, inference batch norm, dense) pass
// multipliers through their transposes; elementwise nonlinearities use the
// secant slope between input and reference, falling back to the derivative
// at the midpoint when the two are closer than 1e-9. Reference activations
// are computed once at construction.
class DeepShap {
 public:
  // Throws ConfigError for an untrained model or an empty reference set.
  DeepShap(const Model& model, ReferenceSet references,
           AttributionTarget target = AttributionTarget::kProbability);

  // Attribution for each reference separately, [K, per-sample shape...].
  Tensor ExplainPerReference(const Tensor& x) const;
  // Mean over references.
  AttributionMap Explain(const Tensor& x, const std::string& trial_id = "") const;

  // Target value (probability or logit) for one input.
  double Output(const Tensor& x) const;
  // Target value for every reference.
  const std::vector<double>& reference_outputs() const { return reference_outputs_; }

 private:
  double TargetOf(double logit) const;

  const Model& model_;
  ReferenceSet references_;
  AttributionTarget target_;
  ForwardTrace reference_trace_;
  std::vector<double> reference_outputs_;
};

// floor(t / (1500/87)); 1500 ms maps to the exclusive end frame 87. Throws
// ConfigError outside [0, 1500].
int MsToFrame(double t_ms);

// Mean of one AU row over frames [MsToFrame(t0), MsToFrame(t1)). Throws
// ConfigError for an unknown AU or an empty range.
double WindowMean(const AttributionMap& map, double t0_ms, double t1_ms, int au_id);

// Element-wise max(0, v).
AttributionMap PositivePart(AttributionMap map);

// CSV with columns au_id, frame, t_start_ms, attribution in catalog row
// order, one line per cell.
std::string AttributionCsv(const AttributionMap& map);
AttributionMap ParseAttributionCsv(const std::string& text, const std::string& trial_id);

}  // namespace aucnn

#endif  // AUCNN_EXPLAINER_H_
