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

#include "aucnn/grad_check.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "aucnn/errors.h"
#include "aucnn/kernels.h"

namespace aucnn {

double GradRelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

double BatchLoss(const Model& model, const Tensor& batch,
                 const std::vector<int>& labels, const ForwardContext& ctx,
                 ForwardTrace* trace) {
  const Tensor logits = model.Forward(batch, ctx, trace);
  if (static_cast<int>(labels.size()) != logits.dim(0)) {
    throw ShapeError("label count does not match batch size");
  }
  double loss = 0.0;
  for (int i = 0; i < logits.dim(0); ++i) {
    loss += kernels::SigmoidBce(logits[i], labels[i]).loss;
  }
  return loss / logits.dim(0);
}

GradCheckReport GradCheck(const Model& model, const Tensor& batch,
                          const std::vector<int>& labels,
                          const GradCheckOptions& options) {
  if (batch.dim(0) < 2) {
    throw ShapeError("gradient check needs a batch of at least 2");
  }
  std::mt19937_64 rng(options.seed);
  std::mt19937_64 mask_rng(options.seed ^ 0x9e3779b97f4a7c15ULL);

  ForwardContext draw{Mode::kTrain, &mask_rng, false};
  ForwardTrace trace;
  const Tensor logits = model.Forward(batch, draw, &trace);
  const int n = logits.dim(0);
  Tensor grad_logits({n, 1});
  for (int i = 0; i < n; ++i) {
    grad_logits[i] = kernels::SigmoidBce(logits[i], labels.at(i)).dloss_dlogit / n;
  }
  const Gradients grads = model.Backward(trace, grad_logits);

  struct Slot {
    int layer, parameter;
    std::size_t size;
  };
  std::vector<Slot> slots;
  std::size_t total = 0;
  for (int l = 0; l < model.num_layers(); ++l) {
    const auto& params = model.layer(l).parameters();
    for (int p = 0; p < static_cast<int>(params.size()); ++p) {
      slots.push_back({l, p, params[p].size()});
      total += params[p].size();
    }
  }
  if (total == 0) throw ConfigError("model has no trainable parameters");

  Model probe = model;
  ForwardContext replay{Mode::kTrain, nullptr, true};
  ForwardTrace scratch = trace;
  GradCheckReport report;
  report.tolerance = options.tolerance;
  std::uniform_int_distribution<std::size_t> pick(0, total - 1);
  for (int s = 0; s < options.num_samples; ++s) {
    std::size_t flat = pick(rng);
    const Slot* slot = nullptr;
    for (const Slot& candidate : slots) {
      if (flat < candidate.size) {
        slot = &candidate;
        break;
      }
      flat -= candidate.size;
    }
    Tensor& param = probe.mutable_layer(slot->layer).parameters()[slot->parameter];
    const double original = param[flat];
    param[flat] = original + options.step;
    const double plus = BatchLoss(probe, batch, labels, replay, &scratch);
    param[flat] = original - options.step;
    const double minus = BatchLoss(probe, batch, labels, replay, &scratch);
    param[flat] = original;

    GradCheckEntry e;
    e.layer = slot->layer;
    e.parameter = slot->parameter;
    e.index = flat;
    e.analytic = grads[slot->layer][slot->parameter][flat];
    e.numeric = (plus - minus) / (2.0 * options.step);
    e.relative_error = GradRelativeError(e.analytic, e.numeric);
    report.max_relative_error = std::max(report.max_relative_error, e.relative_error);
    report.entries.push_back(e);
  }
  report.passed = report.max_relative_error <= options.tolerance;
  return report;
}

}  // namespace aucnn
