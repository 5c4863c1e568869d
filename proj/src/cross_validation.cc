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

#include "aucnn/cross_validation.h"

#include <algorithm>
#include <charconv>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "aucnn/errors.h"
#include "aucnn/random.h"

namespace aucnn {
namespace {

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct FoldOutput {
  FoldResult result;
  std::optional<Model> model;
  std::optional<RandomForest> forest;
};

FoldOutput RunFold(int k, const std::vector<AUTrial>& normalized,
                   const SplitPlan& plan, const Tensor& test_inputs,
                   const std::vector<int>& test_labels,
                   const ModelConfig& model_config, const TrainConfig& train_config,
                   const CvOptions& options) {
  const Fold& fold = plan.folds[k];
  const Tensor train = StackTrials(normalized, fold.train);
  const Tensor val = StackTrials(normalized, fold.validation);
  std::vector<int> train_labels, val_labels;
  for (int i : fold.train) train_labels.push_back(static_cast<int>(normalized[i].label));
  for (int i : fold.validation) val_labels.push_back(static_cast<int>(normalized[i].label));

  FoldOutput out;
  out.result.fold = k;
  ModelConfig mc = model_config;
  mc.seed = DeriveSeed(model_config.seed, "fold", k);
  if (mc.architecture == Architecture::kRandomForest) {
    RandomForest forest({mc.rf_trees, mc.rf_max_depth, 2, mc.seed});
    forest.Fit(train, train_labels);
    const std::vector<double> val_p = forest.PredictProba(val);
    double brier = 0.0;
    for (std::size_t i = 0; i < val_p.size(); ++i) {
      brier += (val_p[i] - val_labels[i]) * (val_p[i] - val_labels[i]);
    }
    out.result.selection_score = brier / static_cast<double>(val_p.size());
    out.result.test_probabilities = forest.PredictProba(test_inputs);
    out.forest = std::move(forest);
  } else {
    Model model = BuildModel(mc);
    TrainConfig tc = train_config;
    tc.seed = DeriveSeed(train_config.seed, "fold", k);
    TrainHooks hooks;
    if (options.on_epoch) {
      hooks.on_epoch = [&options, k](const EpochRecord& r) { options.on_epoch(k, r); };
    }
    out.result.history = TrainModel(model, train, train_labels, val, val_labels, tc, hooks);
    out.result.selection_score = out.result.history.best_validation_loss;
    out.result.test_probabilities = PredictProba(model, test_inputs);
    out.model = std::move(model);
  }
  const std::vector<int> predicted = Threshold(out.result.test_probabilities);
  out.result.accuracy = Accuracy(predicted, test_labels);
  out.result.auc_roc = AucRoc(out.result.test_probabilities, test_labels);
  out.result.f1 = F1Score(predicted, test_labels);
  return out;
}

}  // namespace

void Aggregate(MetricsReport& report) {
  std::vector<double> acc, auc, f1;
  for (const FoldResult& f : report.folds) {
    acc.push_back(f.accuracy);
    auc.push_back(f.auc_roc);
    f1.push_back(f.f1);
  }
  report.accuracy = Summarize(acc);
  report.auc_roc = Summarize(auc);
  report.f1 = Summarize(f1);
}

CvResult CrossValidate(const std::vector<AUTrial>& trials,
                       const ModelConfig& model_config,
                       const TrainConfig& train_config, const CvOptions& options) {
  model_config.Validate();
  train_config.Validate();
  const std::vector<int> labels = LabelsOf(trials);

  CvResult result;
  result.plan = StratifiedSplit(labels, train_config.folds,
                                train_config.test_fraction, train_config.seed);
  std::vector<char> is_test(trials.size(), 0);
  for (int i : result.plan.test) is_test[i] = 1;
  std::vector<AUTrial> pool;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!is_test[i]) pool.push_back(trials[i]);
  }
  result.normalization = FitNormalization(pool);
  pool.clear();
  const std::vector<AUTrial> normalized = ApplyNormalization(trials, result.normalization);
  const Tensor test_inputs = StackTrials(normalized, result.plan.test);
  std::vector<int> test_labels;
  for (int i : result.plan.test) test_labels.push_back(labels[i]);

  const int folds = train_config.folds;
  std::vector<FoldOutput> outputs(folds);
  std::vector<std::exception_ptr> errors(folds);
  auto run = [&](int k) {
    try {
      outputs[k] = RunFold(k, normalized, result.plan, test_inputs, test_labels,
                           model_config, train_config, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const int threads = std::clamp(options.threads, 1, folds);
  if (threads == 1) {
    for (int k = 0; k < folds; ++k) run(k);
  } else {
    std::mutex mu;
    int next = 0;
    std::vector<std::thread> workers;
    for (int t = 0; t < threads; ++t) {
      workers.emplace_back([&] {
        while (true) {
          int k;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= folds) return;
            k = next++;
          }
          run(k);
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (int k = 0; k < folds; ++k) {
    result.report.folds.push_back(outputs[k].result);
    if (outputs[k].result.selection_score <
        outputs[result.best_fold].result.selection_score) {
      result.best_fold = k;
    }
  }
  Aggregate(result.report);
  result.best_model = std::move(outputs[result.best_fold].model);
  result.best_forest = std::move(outputs[result.best_fold].forest);
  return result;
}

std::string MetricsCsv(const MetricsReport& report) {
  std::ostringstream out;
  out << "fold,accuracy,auc_roc,f1\n";
  for (const FoldResult& f : report.folds) {
    out << f.fold + 1 << ',' << Num(f.accuracy) << ',' << Num(f.auc_roc) << ','
        << Num(f.f1) << '\n';
  }
  out << "mean," << Num(report.accuracy.mean) << ',' << Num(report.auc_roc.mean)
      << ',' << Num(report.f1.mean) << '\n';
  out << "std," << Num(report.accuracy.std) << ',' << Num(report.auc_roc.std) << ','
      << Num(report.f1.std) << '\n';
  return out.str();
}

std::string MetricsText(const MetricsReport& report, const std::string& title) {
  std::ostringstream out;
  char line[160];
  out << title << '\n';
  for (const FoldResult& f : report.folds) {
    std::snprintf(line, sizeof(line),
                  "fold %d  accuracy %.4f  auc_roc %.4f  f1 %.4f  epochs %zu\n",
                  f.fold + 1, f.accuracy, f.auc_roc, f.f1, f.history.epochs.size());
    out << line;
  }
  std::snprintf(line, sizeof(line),
                "mean +- std  accuracy %.4f +- %.4f  auc_roc %.4f +- %.4f  "
                "f1 %.4f +- %.4f\n",
                report.accuracy.mean, report.accuracy.std, report.auc_roc.mean,
                report.auc_roc.std, report.f1.mean, report.f1.std);
  out << line;
  return out.str();
}

}  // namespace aucnn
