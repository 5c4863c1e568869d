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

#include "aucnn/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <string>

#include "aucnn/errors.h"
#include "aucnn/kernels.h"
#include "aucnn/metrics.h"
#include "aucnn/random.h"

namespace aucnn {

void TrainConfig::Validate() const {
  if (batch_size < 2) throw ConfigError("batch_size must be at least 2");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (early_stop_patience < 1 || lr_patience < 1) {
    throw ConfigError("patience values must be at least 1");
  }
  if (!(lr0 > 0.0) || !(lr_min > 0.0) || lr_min > lr0) {
    throw ConfigError("need 0 < lr_min <= lr0");
  }
  if (!(lr_factor > 0.0 && lr_factor < 1.0)) {
    throw ConfigError("lr_factor must lie in (0,1)");
  }
  if (min_delta < 0.0) throw ConfigError("min_delta must be non-negative");
  if (folds < 2) throw ConfigError("folds must be at least 2");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0,1)");
  }
}

PlateauScheduler::PlateauScheduler(const TrainConfig& config, double initial_loss)
    : config_(config), lr_(config.lr0), best_(initial_loss) {}

PlateauScheduler::Step PlateauScheduler::Observe(double validation_loss) {
  Step step;
  if (best_ - validation_loss >= config_.min_delta) {
    best_ = validation_loss;
    lr_wait_ = 0;
    stop_wait_ = 0;
    step.improved = true;
    return step;
  }
  if (++lr_wait_ >= config_.lr_patience) {
    lr_ = std::max(lr_ * config_.lr_factor, config_.lr_min);
    lr_wait_ = 0;
  }
  if (++stop_wait_ >= config_.early_stop_patience) step.stop = true;
  return step;
}

Evaluation Evaluate(const Model& model, const Tensor& inputs,
                    const std::vector<int>& labels) {
  const std::vector<double> logits = model.Logits(inputs);
  if (logits.size() != labels.size()) {
    throw ShapeError("label count does not match the number of inputs");
  }
  Evaluation e;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    e.loss += kernels::SigmoidBce(logits[i], labels[i]).loss;
    const int predicted = kernels::Sigmoid(logits[i]) >= kDecisionThreshold ? 1 : 0;
    hits += predicted == labels[i] ? 1 : 0;
  }
  e.loss /= static_cast<double>(logits.size());
  e.accuracy = static_cast<double>(hits) / static_cast<double>(logits.size());
  return e;
}

History TrainModel(Model& model, const Tensor& train_inputs,
                   const std::vector<int>& train_labels,
                   const Tensor& validation_inputs,
                   const std::vector<int>& validation_labels,
                   const TrainConfig& config, const TrainHooks& hooks) {
  config.Validate();
  const Tensor train = model.PrepareBatch(train_inputs);
  const int n = train.dim(0);
  if (n < 2 || static_cast<int>(train_labels.size()) != n) {
    throw DataError("training set needs at least 2 labelled trials");
  }
  if (validation_labels.empty()) throw DataError("validation set is empty");

  auto validation_loss = [&](int epoch, double measured) {
    const double v = hooks.validation_loss ? hooks.validation_loss(epoch, measured)
                                           : measured;
    if (!std::isfinite(v)) {
      throw TrainingDiverged(epoch, "non-finite validation loss at epoch " +
                                        std::to_string(epoch));
    }
    return v;
  };

  History history;
  history.initial_validation_loss =
      validation_loss(0, Evaluate(model, validation_inputs, validation_labels).loss);
  history.best_validation_loss = history.initial_validation_loss;
  PlateauScheduler scheduler(config, history.initial_validation_loss);
  Model best = model;

  std::mt19937_64 rng(DeriveSeed(config.seed, "train"));
  const std::size_t per_sample = train.size() / n;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    EpochRecord record;
    record.epoch = epoch;
    record.lr = scheduler.lr();
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0.0;
    std::size_t hits = 0;
    for (int start = 0; start < n;) {
      int end = std::min(n, start + config.batch_size);
      // A trailing batch of one cannot be batch-normalized; fold it in.
      if (n - end == 1) end = n;
      const int b = end - start;
      std::vector<int> batch_shape = train.shape();
      batch_shape[0] = b;
      Tensor batch(batch_shape);
      std::vector<int> labels(b);
      for (int i = 0; i < b; ++i) {
        const int src = order[start + i];
        std::memcpy(batch.data() + i * per_sample, train.data() + src * per_sample,
                    per_sample * sizeof(double));
        labels[i] = train_labels[src];
      }

      ForwardTrace trace;
      const Tensor logits = model.Forward(batch, {Mode::kTrain, &rng, false}, &trace);
      Tensor grad_logits({b, 1});
      double batch_loss = 0.0;
      for (int i = 0; i < b; ++i) {
        const auto bce = kernels::SigmoidBce(logits[i], labels[i]);
        batch_loss += bce.loss;
        grad_logits[i] = bce.dloss_dlogit / b;
        const int predicted = kernels::Sigmoid(logits[i]) >= kDecisionThreshold ? 1 : 0;
        hits += predicted == labels[i] ? 1 : 0;
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged(epoch, "non-finite training loss at epoch " +
                                          std::to_string(epoch));
      }
      loss_sum += batch_loss;

      const Gradients grads = model.Backward(trace, grad_logits);
      for (int l = 0; l < model.num_layers(); ++l) {
        auto& params = model.mutable_layer(l).parameters();
        for (std::size_t p = 0; p < params.size(); ++p) {
          double* w = params[p].data();
          const double* g = grads[l][p].data();
          for (std::size_t k = 0; k < params[p].size(); ++k) w[k] -= record.lr * g[k];
        }
      }
      model.CommitStatistics(trace);
      start = end;
    }
    record.train_loss = loss_sum / n;
    record.train_accuracy = static_cast<double>(hits) / n;

    const Evaluation val = Evaluate(model, validation_inputs, validation_labels);
    record.validation_loss = validation_loss(epoch, val.loss);
    record.validation_accuracy = val.accuracy;
    history.epochs.push_back(record);
    if (hooks.on_epoch) hooks.on_epoch(record);

    const PlateauScheduler::Step step = scheduler.Observe(record.validation_loss);
    if (step.improved) {
      history.best_epoch = epoch;
      history.best_validation_loss = record.validation_loss;
      best = model;
    }
    if (step.stop) {
      history.stopped_early = true;
      break;
    }
  }
  model = std::move(best);
  model.set_trained(true);
  return history;
}

}  // namespace aucnn
