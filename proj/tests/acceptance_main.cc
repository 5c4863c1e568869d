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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Pass criterion numbers as arguments to
// run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "aucnn/commands.h"
#include "aucnn/cross_validation.h"
#include "aucnn/dataset.h"
#include "aucnn/explainer.h"
#include "aucnn/grad_check.h"
#include "aucnn/metrics.h"
#include "aucnn/model.h"
#include "aucnn/random.h"
#include "aucnn/split.h"
#include "aucnn/stats.h"
#include "aucnn/synthetic.h"
#include "aucnn/trainer.h"

namespace aucnn {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

void Progress(const std::string& message) { std::cerr << "  .. " << message << std::endl; }

Tensor RandomInputs(int n, std::mt19937_64& rng) {
  Tensor t({n, kNumAUs, kNumFrames});
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double& v : t.values()) v = u(rng);
  return t;
}

// 1. Finite-difference gradient check.
Outcome GradientCorrectness() {
  std::mt19937_64 rng(101);
  const Tensor batch = RandomInputs(4, rng);
  const std::vector<int> labels{0, 1, 1, 0};
  double worst = 0.0;
  bool pass = true;
  for (Architecture arch : {Architecture::kCnnA, Architecture::kCnnB}) {
    ModelConfig config;
    config.architecture = arch;
    config.seed = 7;
    GradCheckOptions options;
    options.num_samples = 200;
    options.step = 1e-5;
    options.tolerance = 1e-4;
    options.seed = 11;
    const GradCheckReport r = GradCheck(BuildModel(config), batch, labels, options);
    worst = std::max(worst, r.max_relative_error);
    pass = pass && r.passed && r.entries.size() == 200;
  }
  return {pass, Fmt("max relative error %.3g over 2x200 parameters (tol 1e-4)", worst)};
}

// 2. Summation to delta over (model, input, reference) triples.
Outcome DeepShapCompleteness() {
  SynthConfig synth;
  synth.n_trials = 400;
  synth.seed = 21;
  std::vector<AUTrial> trials = GenerateSynthetic(synth).trials;
  trials = ApplyNormalization(trials, FitNormalization(trials));
  std::vector<int> all(trials.size());
  std::iota(all.begin(), all.end(), 0);
  const Tensor inputs = StackTrials(trials, all);
  const std::vector<int> labels = LabelsOf(trials);

  std::vector<Model> models;
  for (Architecture arch : {Architecture::kCnnA, Architecture::kCnnB}) {
    ModelConfig config;
    config.architecture = arch;
    config.seed = 5;
    Model m = BuildModel(config);
    TrainConfig train;
    train.max_epochs = 3;
    train.batch_size = 64;
    train.seed = 6;
    TrainModel(m, inputs, labels, inputs, labels, train);
    models.push_back(std::move(m));
  }

  std::mt19937_64 rng(22);
  std::uniform_int_distribution<int> pick(0, static_cast<int>(trials.size()) - 1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Model& model = models[t % 2];
    const AttributionTarget target =
        (t / 2) % 2 == 0 ? AttributionTarget::kProbability : AttributionTarget::kLogit;
    const std::vector<int> ref_index{pick(rng)};
    const DeepShap shap(model, {StackTrials(trials, ref_index), "draw"}, target);
    const Tensor x = StackTrials(trials, std::vector<int>{pick(rng)});
    const AttributionMap map = shap.Explain(x);
    const double sum = std::accumulate(map.values.values().begin(),
                                       map.values.values().end(), 0.0);
    const double delta = shap.Output(x) - shap.reference_outputs()[0];
    worst = std::max(worst, std::abs(sum - delta) / std::max(1e-8, std::abs(delta)));
  }
  return {worst <= 1e-6,
          Fmt("max relative completeness gap %.3g over 100 triples (tol 1e-6)", worst)};
}

// 3. Linear classifier attributions.
Outcome DeepShapLinear() {
  ModelConfig config;
  config.seed = 31;
  Model m = BuildFromSpecs(config, {kNumAUs, kNumFrames},
                           {FlattenSpec(), DenseSpec(kTrialSize, 1)});
  m.set_trained(true);
  const Tensor& w = m.layer(1).parameters()[0];
  std::mt19937_64 rng(32);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const Tensor r = RandomInputs(1, rng);
    const Tensor x = RandomInputs(1, rng);
    const DeepShap shap(m, {r, "draw"}, AttributionTarget::kLogit);
    const AttributionMap map = shap.Explain(x);
    for (int i = 0; i < kTrialSize; ++i) {
      worst = std::max(worst, std::abs(map.values[i] - w[i] * (x[i] - r[i])));
    }
  }
  return {worst <= 1e-10, Fmt("max |g - w*(x-r)| %.3g (tol 1e-10)", worst)};
}

// 4. Plateau scheduler on a stagnating validation loss.
Outcome SchedulerTrace() {
  std::mt19937_64 rng(41);
  const Tensor x = RandomInputs(16, rng);
  std::vector<int> labels(16);
  for (int i = 0; i < 16; ++i) labels[i] = i % 2;
  ModelConfig config;
  config.seed = 42;
  Model m = BuildFromSpecs(config, {kNumAUs, kNumFrames},
                           {FlattenSpec(), DenseSpec(kTrialSize, 1)});
  TrainConfig train;
  train.batch_size = 8;
  TrainHooks hooks;
  hooks.validation_loss = [](int, double) { return 0.7; };
  const History h = TrainModel(m, x, labels, x, labels, train, hooks);
  bool pass = h.epochs.size() == 30 && h.stopped_early;
  for (std::size_t e = 0; pass && e < h.epochs.size(); ++e) {
    pass = h.epochs[e].lr == (e < 15 ? 0.01 : 0.005);
  }
  return {pass, "stopped after " + std::to_string(h.epochs.size()) +
                    " epochs, lr 0.01 x15 then 0.005 x15 expected"};
}

// 5. Metric oracles.
Outcome MetricOracles() {
  std::mt19937_64 rng(51);
  bool auc_exact = true;
  for (int set = 0; set < 100; ++set) {
    const int n = 4 + set % 20;
    std::uniform_int_distribution<int> level(0, 5 + set % 7);
    std::vector<double> s(n);
    std::vector<int> y(n);
    for (int i = 0; i < n; ++i) {
      s[i] = level(rng) * 0.1;
      y[i] = i < 2 ? i : static_cast<int>(rng() % 2);
    }
    double wins = 0.0;
    double pairs = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (y[i] != 1 || y[j] != 0) continue;
        pairs += 1.0;
        wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
    }
    auc_exact = auc_exact && AucRoc(s, y) == wins / pairs;
  }

  std::normal_distribution<double> normal(0.0, 1.0);
  double worst_t2 = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<std::vector<double>> g(2);
    for (int i = 0; i < 9; ++i) g[0].push_back(normal(rng));
    for (int i = 0; i < 13; ++i) g[1].push_back(normal(rng) + 0.4);
    double m[2], ss[2];
    for (int k = 0; k < 2; ++k) {
      m[k] = std::accumulate(g[k].begin(), g[k].end(), 0.0) / g[k].size();
      ss[k] = 0.0;
      for (double v : g[k]) ss[k] += (v - m[k]) * (v - m[k]);
    }
    const double sp2 = (ss[0] + ss[1]) / 20.0;
    const double t = (m[0] - m[1]) / std::sqrt(sp2 * (1.0 / 9 + 1.0 / 13));
    const double f = AnovaOneway(g).f;
    worst_t2 = std::max(worst_t2, std::abs(f - t * t) / std::max(1.0, t * t));
  }

  // Permutation reference: 3 groups of 200 with a small shift.
  std::vector<std::vector<double>> g(3);
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 200; ++i) g[k].push_back(normal(rng) + 0.04 * k);
  }
  const AnovaTable observed = AnovaOneway(g);
  std::vector<double> pooled;
  for (const auto& group : g) pooled.insert(pooled.end(), group.begin(), group.end());
  const int resamples = 100000;
  int exceed = 0;
  std::vector<std::vector<double>> perm(3, std::vector<double>(200));
  for (int r = 0; r < resamples; ++r) {
    std::shuffle(pooled.begin(), pooled.end(), rng);
    for (int k = 0; k < 3; ++k) {
      std::copy(pooled.begin() + 200 * k, pooled.begin() + 200 * (k + 1), perm[k].begin());
    }
    exceed += AnovaOneway(perm).f >= observed.f ? 1 : 0;
  }
  const double p_perm = static_cast<double>(exceed) / resamples;
  const double se = std::sqrt(p_perm * (1.0 - p_perm) / resamples);
  const bool perm_ok = std::abs(observed.p - p_perm) <= 3.0 * se;
  return {auc_exact && worst_t2 <= 1e-9 && perm_ok,
          std::string(auc_exact ? "auc exact on 100 sets" : "auc MISMATCH") +
              Fmt(", F vs t^2 rel %.2g, p %.4f vs permutation %.4f (3 SE = %.4f)",
                  worst_t2, observed.p, p_perm, 3.0 * se)};
}

// Shared state of criteria 6 and 7.
struct EndToEnd {
  bool ready = false;
  std::vector<AUTrial> trials;
  GeneratorOracle oracle;
  CvResult cv;
};

EndToEnd& Pipeline() {
  static EndToEnd e2e;
  if (e2e.ready) return e2e;
  const SynthConfig synth;  // defaults: 3704 trials, 50/50, label noise 0.15
  SynthResult data = GenerateSynthetic(synth);
  e2e.trials = std::move(data.trials);
  e2e.oracle = std::move(data.oracle);
  ModelConfig model;
  model.seed = DeriveSeed(synth.seed, "model");
  TrainConfig train;
  train.seed = DeriveSeed(synth.seed, "training");
  const auto t0 = std::chrono::steady_clock::now();
  CvOptions options;
  options.on_epoch = [&](int fold, const EpochRecord& r) {
    if (r.epoch % 25 == 0) {
      const double s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      Progress("fold " + std::to_string(fold + 1) + " epoch " + std::to_string(r.epoch) +
               Fmt(" val loss %.4f (%.0f s)", r.validation_loss, s));
    }
  };
  e2e.cv = CrossValidate(e2e.trials, model, train, options);
  e2e.ready = true;
  return e2e;
}

// 6. CNN-A against the Bayes oracle and a shuffled-label control.
Outcome EndToEndReproduction() {
  EndToEnd& e2e = Pipeline();
  const double auc = e2e.cv.report.auc_roc.mean;
  const double bayes = e2e.oracle.bayes_auc;

  std::vector<AUTrial> shuffled = e2e.trials;
  std::vector<Label> labels;
  for (const AUTrial& t : shuffled) labels.push_back(t.label);
  std::mt19937_64 rng(61);
  std::shuffle(labels.begin(), labels.end(), rng);
  for (std::size_t i = 0; i < shuffled.size(); ++i) shuffled[i].label = labels[i];
  ModelConfig model;
  model.seed = 62;
  TrainConfig train;
  train.seed = 63;
  Progress("shuffled-label control");
  const double control = CrossValidate(shuffled, model, train).report.auc_roc.mean;

  const bool pass = std::abs(auc - bayes) <= 0.05 && auc > control && control >= 0.45 &&
                    control <= 0.55;
  return {pass, Fmt("mean test AUC %.4f, Bayes AUC %.4f (tol 0.05), shuffled control %.4f "
                    "(want [0.45, 0.55])",
                    auc, bayes, control)};
}

// 7. Attribution statistics on the held-out trials.
Outcome AttributionStatistics() {
  EndToEnd& e2e = Pipeline();
  const Model& model = *e2e.cv.best_model;
  const std::vector<AUTrial> normalized =
      ApplyNormalization(e2e.trials, e2e.cv.normalization);
  std::set<int> test(e2e.cv.plan.test.begin(), e2e.cv.plan.test.end());
  std::vector<int> pool;
  for (int i = 0; i < static_cast<int>(normalized.size()); ++i) {
    if (!test.count(i)) pool.push_back(i);
  }
  const DeepShap shap(model, DrawReferences(normalized, pool, 100, 71));
  std::vector<AttributionMap> maps;
  std::vector<AUTrial> test_trials;
  for (int i : e2e.cv.plan.test) {
    maps.push_back(shap.Explain(StackTrials(normalized, std::vector<int>{i}),
                                normalized[i].trial_id));
    test_trials.push_back(normalized[i]);
  }
  const std::vector<TrialMetadata> metadata = MetadataFor(e2e.trials);
  const std::vector<AnovaRow> rows = AttributionAnova(maps, metadata, {});
  double p6 = 1.0, p14 = 1.0;
  int flagged = 0;
  for (const AnovaRow& r : rows) {
    if (r.au_id == 6) p6 = r.table.p;
    else if (r.au_id == 14) p14 = r.table.p;
    else if (r.table.p < 0.05) ++flagged;
  }

  auto stuttered_mean = [&](int au, double t0, double t1) {
    double sum = 0.0;
    int n = 0;
    for (std::size_t k = 0; k < maps.size(); ++k) {
      if (test_trials[k].label != Label::kStuttered) continue;
      sum += WindowMean(maps[k], t0, t1, au);
      ++n;
    }
    return sum / n;
  };
  int peak = 0;
  double peak_value = -1e300;
  const auto& windows = DefaultWindows();
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const double v = stuttered_mean(6, windows[w].t0_ms, windows[w].t1_ms);
    if (v > peak_value) {
      peak_value = v;
      peak = static_cast<int>(w);
    }
  }
  const bool peak_ok = windows[peak].t0_ms <= 700.0 && 700.0 < windows[peak].t1_ms;
  const double late14 = stuttered_mean(14, 1100, 1500);
  const double mid14 = stuttered_mean(14, 500, 800);

  const bool pass = p6 < 0.005 && p14 < 0.005 && flagged <= 2 && peak_ok && late14 > mid14;
  return {pass, Fmt("p(AU6) %.3g, p(AU14) %.3g, ", p6, p14) + std::to_string(flagged) +
                    "/15 other AUs at p<0.05, AU6 peak window " + windows[peak].Name() +
                    Fmt(", AU14 1100-1500 %.4g vs 500-800 %.4g", late14, mid14)};
}

// 8. Byte-identical reruns of synth, train and explain.
Outcome Determinism() {
  const fs::path root =
      fs::temp_directory_path() / ("aucnn_acceptance_" + std::to_string(getpid()));
  auto run = [&](const std::string& name) {
    const fs::path dir = root / name;
    fs::create_directories(dir);
    std::ostringstream log;
    SynthOptions synth;
    synth.synth.n_trials = 300;
    synth.synth.seed = 81;
    synth.out_csv = (dir / "data.csv").string();
    CmdSynth(synth, log);
    TrainOptions train;
    train.dataset = synth.out_csv;
    train.model.seed = DeriveSeed(81, "model");
    train.train.seed = DeriveSeed(81, "training");
    train.train.max_epochs = 3;
    train.train.batch_size = 64;
    train.out_dir = (dir / "run").string();
    CmdTrain(train, log);
    ExplainOptions explain;
    explain.checkpoint = (dir / "run" / "checkpoint.json").string();
    explain.dataset = synth.out_csv;
    explain.all_test = true;
    explain.references = 10;
    explain.out_dir = (dir / "explain").string();
    CmdExplain(explain, log);
    return dir;
  };
  auto read = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  const fs::path a = run("a");
  const fs::path b = run("b");
  bool same = read(a / "data.csv") == read(b / "data.csv") &&
              read(a / "run" / "metrics.csv") == read(b / "run" / "metrics.csv");
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a / "explain" / "attributions")) {
    same = same && read(entry.path()) ==
                       read(b / "explain" / "attributions" / entry.path().filename());
    ++files;
  }
  fs::remove_all(root);
  return {same && files > 0, "dataset, metrics and " + std::to_string(files) +
                                 " attribution files compared"};
}

// 9. Split sizes on 3704 balanced trials.
Outcome SplitArithmetic() {
  std::vector<int> labels(3704);
  for (int i = 0; i < 3704; ++i) labels[i] = i % 2;
  const SplitPlan plan = StratifiedSplit(labels, 5, 0.2, 91);
  bool pass = plan.test.size() == 741;
  std::string sizes;
  for (const Fold& f : plan.folds) {
    pass = pass && std::abs(static_cast<int>(f.train_pool.size()) - 2370) <= 1 &&
           std::abs(static_cast<int>(f.validation.size()) - 593) <= 1;
    sizes += " " + std::to_string(f.train_pool.size()) + "/" +
             std::to_string(f.validation.size());
  }
  return {pass, "test " + std::to_string(plan.test.size()) + ", train/validation" + sizes};
}

}  // namespace
}  // namespace aucnn

int main(int argc, char** argv) {
  using aucnn::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"gradient correctness", aucnn::GradientCorrectness},
      {"DeepSHAP completeness", aucnn::DeepShapCompleteness},
      {"DeepSHAP linear exactness", aucnn::DeepShapLinear},
      {"scheduler state machine", aucnn::SchedulerTrace},
      {"metric oracles", aucnn::MetricOracles},
      {"end-to-end synthetic reproduction", aucnn::EndToEndReproduction},
      {"attribution statistics", aucnn::AttributionStatistics},
      {"determinism", aucnn::Determinism},
      {"split arithmetic", aucnn::SplitArithmetic},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[k].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s [%.1f s]\n", outcome.pass ? "PASS" : "FAIL", id,
                criteria[k].first.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    failures += outcome.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
