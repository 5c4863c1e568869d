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

#ifndef AUCNN_CROSS_VALIDATION_H_
#define AUCNN_CROSS_VALIDATION_H_

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aucnn/dataset.h"
#include "aucnn/metrics.h"
#include "aucnn/model.h"
#include "aucnn/random_forest.h"
#include "aucnn/split.h"
#include "aucnn/trainer.h"

namespace aucnn {

struct FoldResult {
  int fold = 0;
  double accuracy = 0.0;
  double auc_roc = 0.0;
  double f1 = 0.0;
  // Lower is better: best validation loss for networks, validation Brier
  // score for the forest.
  double selection_score = 0.0;
  History history;
  std::vector<double> test_probabilities;
};

struct MetricsReport {
  std::vector<FoldResult> folds;
  MeanStd accuracy;
  MeanStd auc_roc;
  MeanStd f1;
};

// Recomputes the aggregate fields from the per-fold values.
void Aggregate(MetricsReport& report);

struct CvOptions {
  int threads = 1;
  // Called from the fold's worker thread.
  std::function<void(int fold, const EpochRecord&)> on_epoch;
};

struct CvResult {
  SplitPlan plan;
  NormalizationManifest normalization;
  MetricsReport report;
  int best_fold = 0;
  // Exactly one of these holds the model of the best fold.
  std::optional<Model> best_model;
  std::optional<RandomForest> best_forest;
};

// Splits `trials`, fits min-max normalization on every non-test trial,
// trains one model per fold and scores each on the shared hold-out test set.
CvResult CrossValidate(const std::vector<AUTrial>& trials,
                       const ModelConfig& model_config,
                       const TrainConfig& train_config,
                       const CvOptions& options = {});

// CSV columns fold, accuracy, auc_roc, f1; then "mean" and "std" rows.
std::string MetricsCsv(const MetricsReport& report);
// One record per fold plus the aggregate, as readable text.
std::string MetricsText(const MetricsReport& report, const std::string& title);

}  // namespace aucnn

#endif  // AUCNN_CROSS_VALIDATION_H_
