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

#ifndef AUCNN_COMMANDS_H_
#define AUCNN_COMMANDS_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aucnn/cross_validation.h"
#include "aucnn/explainer.h"
#include "aucnn/model.h"
#include "aucnn/stats.h"
#include "aucnn/synthetic.h"
#include "aucnn/trainer.h"

namespace aucnn {

struct SynthOptions {
  SynthConfig synth;
  std::string out_csv = "dataset.csv";
  std::string manifest;  // defaults to <out_csv>.manifest.json
};

// Writes the dataset CSV and its manifest.
SynthResult CmdSynth(const SynthOptions& options, std::ostream& log);

// Keeps trials of one paradigm: "all", "CW" or "WG". Throws DataError when
// nothing remains and ConfigError for an unknown filter.
std::vector<AUTrial> FilterParadigm(std::vector<AUTrial> trials,
                                    const std::string& filter);

struct TrainOptions {
  std::string dataset;
  ModelConfig model;
  TrainConfig train;
  std::string paradigm = "all";
  std::string out_dir = "run";
  int threads = 1;
  bool verbose = false;
};

// Cross-validates and writes metrics.csv, metrics.txt, history.csv and
// checkpoint.json (best fold) into out_dir.
CvResult CmdTrain(const TrainOptions& options, std::ostream& log);

struct ExplainOptions {
  std::string checkpoint;
  std::string dataset;
  std::vector<std::string> trial_ids;
  bool all_test = false;
  std::string out_dir = "explain";
  int references = 100;
  bool zero_reference = false;
  bool positive_only = false;
  int cell = 4;
  std::uint64_t seed = 0;
};

// Writes attributions/<trial>.csv, heatmaps/<trial>.ppm and metadata.csv.
// Throws DataError when the dataset does not reproduce the checkpoint's
// normalization.
std::vector<AttributionMap> CmdExplain(const ExplainOptions& options, std::ostream& log);

struct StatsOptions {
  std::string attributions_dir = "explain";
  std::string metadata;  // defaults to <attributions_dir>/metadata.csv
  GroupingSpec grouping;
  std::string out_csv = "anova.csv";
  std::string summary;  // defaults to <out_csv>.summary.txt
};

std::vector<AnovaRow> CmdStats(const StatsOptions& options, std::ostream& log);

// Reads metadata.csv as written by CmdExplain. Throws DataError when a column
// needed by `factor` is missing.
std::vector<TrialMetadata> LoadMetadataCsv(const std::string& path, Factor factor);

}  // namespace aucnn

#endif  // AUCNN_COMMANDS_H_
