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

#ifndef AUCNN_TRAINER_H_
#define AUCNN_TRAINER_H_

#include <cstdint>
#include <functional>
#include <vector>

#include "aucnn/model.h"
#include "aucnn/tensor.h"

namespace aucnn {

struct TrainConfig {
  int batch_size = 256;
  int max_epochs = 500;
  int early_stop_patience = 30;
  double lr0 = 0.01;
  double lr_factor = 0.5;
  int lr_patience = 15;
  double lr_min = 1e-6;
  double min_delta = 1e-6;  // smallest decrease counted as an improvement
  int folds = 5;
  double test_fraction = 0.20;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

// Reduce-on-plateau learning rate plus early stopping, both driven by the
// validation loss. The loss of the untrained model seeds the best value, so
// epoch 1 must beat it to count as an improvement.
class PlateauScheduler {
 public:
  PlateauScheduler(const TrainConfig& config, double initial_loss);

  struct Step {
    bool improved = false;
    bool stop = false;
  };
  // Records the validation loss of a finished epoch.
  Step Observe(double validation_loss);

  double lr() const { return lr_; }
  double best() const { return best_; }

 private:
  TrainConfig config_;
  double lr_;
  double best_;
  int lr_wait_ = 0;
  int stop_wait_ = 0;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;  // rate used during this epoch
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double validation_loss = 0.0;
  double validation_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct History {
  double initial_validation_loss = 0.0;
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;  // 0 when no epoch improved on the untrained model
  double best_validation_loss = 0.0;
  bool stopped_early = false;

  friend bool operator==(const History&, const History&) = default;
};

struct TrainHooks {
  // Replaces the measured validation loss of an epoch (epoch 0 is the
  // untrained model). Used to drive the scheduler deterministically.
  std::function<double(int epoch, double measured)> validation_loss;
  std::function<void(const EpochRecord&)> on_epoch;
};

// Mean binary cross-entropy and accuracy of inference-mode predictions.
struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};
Evaluation Evaluate(const Model& model, const Tensor& inputs,
                    const std::vector<int>& labels);

// Mini-batch SGD on the mean BCE loss. Returns with `model` holding the
// parameters of the best validation epoch and marked trained. Throws
// TrainingDiverged on a non-finite loss.
History TrainModel(Model& model, const Tensor& train_inputs,
                   const std::vector<int>& train_labels,
                   const Tensor& validation_inputs,
                   const std::vector<int>& validation_labels,
                   const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace aucnn

#endif  // AUCNN_TRAINER_H_
