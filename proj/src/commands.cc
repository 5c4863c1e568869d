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

#include "aucnn/commands.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "aucnn/checkpoint.h"
#include "aucnn/errors.h"
#include "aucnn/heatmap.h"
#include "aucnn/random.h"

namespace aucnn {
namespace {

namespace fs = std::filesystem;

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void MakeDirectory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create directory '" + dir.string() + "': " + ec.message());
}

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string HistoryCsv(const MetricsReport& report) {
  std::string out =
      "fold,epoch,lr,train_loss,train_accuracy,validation_loss,validation_accuracy\n";
  for (const FoldResult& f : report.folds) {
    for (const EpochRecord& e : f.history.epochs) {
      out += std::to_string(f.fold + 1) + ',' + std::to_string(e.epoch) + ',' +
             Num(e.lr) + ',' + Num(e.train_loss) + ',' + Num(e.train_accuracy) + ',' +
             Num(e.validation_loss) + ',' + Num(e.validation_accuracy) + '\n';
    }
  }
  return out;
}

std::vector<std::string> SplitFields(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream s(line);
  std::string field;
  while (std::getline(s, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

SynthResult CmdSynth(const SynthOptions& options, std::ostream& log) {
  SynthResult result = GenerateSynthetic(options.synth);
  SaveDatasetCsv(options.out_csv, result.trials);
  const std::string manifest =
      options.manifest.empty() ? options.out_csv + ".manifest.json" : options.manifest;
  WriteFile(manifest, SynthManifestJson(options.synth, result));
  log << "wrote " << result.trials.size() << " trials to " << options.out_csv
      << " (Bayes AUC " << result.oracle.bayes_auc << ")\n";
  if (result.oracle.saturation_warning) {
    log << "warning: more than half of the planted signal saturates\n";
  }
  return result;
}

namespace {

// Canonical paradigm name of a filter, or "all". Throws ConfigError.
std::string CanonicalFilter(const std::string& filter) {
  if (filter == "all") return filter;
  if (filter == "CW" || filter == "cw") return "CW";
  if (filter == "WG" || filter == "wg") return "WG";
  throw ConfigError("unknown paradigm filter '" + filter + "' (want all, CW or WG)");
}

}  // namespace

std::vector<AUTrial> FilterParadigm(std::vector<AUTrial> trials,
                                    const std::string& filter) {
  const std::string name = CanonicalFilter(filter);
  if (name == "all") return trials;
  const Paradigm keep = ParadigmFromName(name);
  std::erase_if(trials, [keep](const AUTrial& t) { return t.paradigm != keep; });
  if (trials.empty()) throw DataError("no trials of paradigm " + name + " in the dataset");
  return trials;
}

CvResult CmdTrain(const TrainOptions& options, std::ostream& log) {
  options.model.Validate();
  options.train.Validate();
  CanonicalFilter(options.paradigm);
  const std::vector<AUTrial> trials =
      FilterParadigm(LoadDatasetCsv(options.dataset), options.paradigm);
  MakeDirectory(options.out_dir);

  CvOptions cv;
  cv.threads = options.threads;
  std::mutex log_mutex;
  if (options.verbose) {
    cv.on_epoch = [&](int fold, const EpochRecord& e) {
      std::lock_guard<std::mutex> lock(log_mutex);
      log << "fold " << fold + 1 << " epoch " << e.epoch << " lr " << e.lr
          << " train_loss " << e.train_loss << " val_loss " << e.validation_loss
          << " val_acc " << e.validation_accuracy << '\n';
    };
  }
  CvResult result = CrossValidate(trials, options.model, options.train, cv);

  const fs::path dir(options.out_dir);
  WriteFile(dir / "metrics.csv", MetricsCsv(result.report));
  const std::string title = std::string(ArchitectureName(options.model.architecture)) +
                            " paradigm=" + options.paradigm;
  WriteFile(dir / "metrics.txt", MetricsText(result.report, title));
  WriteFile(dir / "history.csv", HistoryCsv(result.report));

  Checkpoint ck;
  ck.config = options.model;
  ck.model = result.best_model;
  ck.forest = result.best_forest;
  ck.normalization = result.normalization;
  ck.paradigm_filter = options.paradigm;
  for (int i : result.plan.test) ck.test_trial_ids.push_back(trials[i].trial_id);
  ck.dataset_fingerprint = DatasetFingerprint(trials);
  ck.train_seed = options.train.seed;
  ck.best_fold = result.best_fold;
  SaveCheckpoint((dir / "checkpoint.json").string(), ck);
  log << MetricsText(result.report, title);
  return result;
}

std::vector<AttributionMap> CmdExplain(const ExplainOptions& options, std::ostream& log) {
  const Checkpoint ck = LoadCheckpoint(options.checkpoint);
  if (!ck.model) throw ConfigError("checkpoint holds no network; only CNNs can be explained");
  const std::vector<AUTrial> trials =
      FilterParadigm(LoadDatasetCsv(options.dataset), ck.paradigm_filter);

  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    index[trials[i].trial_id] = static_cast<int>(i);
  }
  std::unordered_set<std::string> test_ids(ck.test_trial_ids.begin(), ck.test_trial_ids.end());
  for (const std::string& id : ck.test_trial_ids) {
    if (!index.count(id)) {
      throw DataError("dataset lacks test trial '" + id + "' recorded in the checkpoint");
    }
  }
  std::vector<int> pool;
  std::vector<AUTrial> pool_trials;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (!test_ids.count(trials[i].trial_id)) {
      pool.push_back(static_cast<int>(i));
      pool_trials.push_back(trials[i]);
    }
  }
  if (FitNormalization(pool_trials) != ck.normalization) {
    throw DataError("dataset does not reproduce the checkpoint's normalization manifest");
  }
  pool_trials.clear();
  const std::vector<AUTrial> normalized = ApplyNormalization(trials, ck.normalization);

  const ReferenceSet refs =
      options.zero_reference
          ? ZeroReference(ck.model->input_shape())
          : DrawReferences(normalized, pool, options.references, options.seed);
  const DeepShap shap(*ck.model, refs);

  std::vector<std::string> ids = options.trial_ids;
  if (options.all_test) ids.insert(ids.end(), ck.test_trial_ids.begin(), ck.test_trial_ids.end());
  if (ids.empty()) throw ConfigError("no trials to explain; pass --trial or --all-test");

  const fs::path dir(options.out_dir);
  MakeDirectory(dir / "attributions");
  MakeDirectory(dir / "heatmaps");
  const auto rates = SubjectStutterRates(trials);
  std::string metadata =
      "trial_id,subject_id,session_id,paradigm,label,subject_stutter_rate\n";
  std::vector<AttributionMap> maps;
  for (const std::string& id : ids) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("trial '" + id + "' is not in the dataset");
    const AUTrial& t = normalized[it->second];
    const Tensor x({kNumAUs, kNumFrames}, t.matrix);
    AttributionMap map = shap.Explain(x, id);
    if (options.positive_only) map = PositivePart(std::move(map));
    WriteFile(dir / "attributions" / (id + ".csv"), AttributionCsv(map));
    WriteFile(dir / "heatmaps" / (id + ".ppm"), EncodePpm(RenderHeatmap(map, options.cell)));
    metadata += id + ',' + t.subject_id + ',' + t.session_id + ',' +
                ParadigmName(t.paradigm) + ',' + LabelName(t.label) + ',' +
                Num(rates.at(t.subject_id)) + '\n';
    maps.push_back(std::move(map));
  }
  WriteFile(dir / "metadata.csv", metadata);
  log << "explained " << maps.size() << " trials against " << refs.size() << " "
      << refs.provenance << " reference(s)\n";
  return maps;
}

std::vector<TrialMetadata> LoadMetadataCsv(const std::string& path, Factor factor) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError("metadata file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = SplitFields(line);
  auto column = [&](const std::string& name, bool required) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      if (required) {
        throw DataError("metadata file '" + path + "' lacks column '" + name +
                        "' needed for factor " + FactorName(factor));
      }
      return -1;
    }
    return static_cast<int>(it - header.begin());
  };
  const int id_col = column("trial_id", true);
  const int subject_col = column("subject_id", false);
  const int label_col = column("label", factor == Factor::kLabel || factor == Factor::kWindow);
  const int paradigm_col = column("paradigm", factor == Factor::kParadigm);
  const int rate_col = column("subject_stutter_rate", factor == Factor::kStutterBand);

  std::vector<TrialMetadata> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = SplitFields(line);
    if (f.size() != header.size()) {
      throw DataError("metadata line " + std::to_string(line_no) + " has " +
                      std::to_string(f.size()) + " fields");
    }
    TrialMetadata m;
    m.trial_id = f[id_col];
    if (subject_col >= 0) m.subject_id = f[subject_col];
    try {
      if (label_col >= 0) m.label = LabelFromName(f[label_col]);
      if (paradigm_col >= 0) m.paradigm = ParadigmFromName(f[paradigm_col]);
    } catch (const DataError& e) {
      throw DataError("metadata line " + std::to_string(line_no) + ": " + e.what());
    }
    if (rate_col >= 0) {
      const std::string& s = f[rate_col];
      auto res = std::from_chars(s.data(), s.data() + s.size(), m.subject_stutter_rate);
      if (res.ec != std::errc()) {
        throw DataError("metadata line " + std::to_string(line_no) +
                        ": bad subject_stutter_rate '" + s + "'");
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<AnovaRow> CmdStats(const StatsOptions& options, std::ostream& log) {
  const fs::path dir(options.attributions_dir);
  const std::string metadata_path =
      options.metadata.empty() ? (dir / "metadata.csv").string() : options.metadata;
  const std::vector<TrialMetadata> metadata =
      LoadMetadataCsv(metadata_path, options.grouping.factor);
  std::vector<AttributionMap> maps;
  for (const TrialMetadata& m : metadata) {
    maps.push_back(ParseAttributionCsv(
        ReadFile(dir / "attributions" / (m.trial_id + ".csv")), m.trial_id));
  }
  const std::vector<AnovaRow> rows = AttributionAnova(maps, metadata, options.grouping);
  WriteFile(options.out_csv, AnovaCsv(rows));

  std::ostringstream summary;
  summary << "factor " << FactorName(options.grouping.factor) << ", " << maps.size()
          << " trials\n";
  for (double alpha : {0.005, 0.05}) {
    summary << "p < " << alpha << ":";
    bool any = false;
    for (const AnovaRow& r : rows) {
      if (r.table.p < alpha) {
        const AUInfo& au = AUCatalog()[AURow(r.au_id)];
        summary << "\n  AU " << r.au_id << " (" << au.name << ", " << r.region;
        if (options.grouping.factor == Factor::kWindow) summary << ", " << r.window << " ms";
        summary << ") F=" << r.table.f << " p=" << r.table.p;
        any = true;
      }
    }
    summary << (any ? "\n" : " none\n");
  }
  const std::string summary_path =
      options.summary.empty() ? options.out_csv + ".summary.txt" : options.summary;
  WriteFile(summary_path, summary.str());
  log << summary.str();
  return rows;
}

}  // namespace aucnn
