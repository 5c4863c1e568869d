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

#ifndef AUCNN_DATASET_H_
#define AUCNN_DATASET_H_

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "aucnn/model.h"
#include "aucnn/tensor.h"

namespace aucnn {

enum class Label { kFluent = 0, kStuttered = 1 };
enum class Paradigm { kCW, kWG };
enum class Region { kUpper, kLower };

const char* LabelName(Label label);  // "fluent" / "stuttered"
Label LabelFromName(const std::string& name);
const char* ParadigmName(Paradigm paradigm);  // "CW" / "WG"
Paradigm ParadigmFromName(const std::string& name);
const char* RegionName(Region region);  // "upper" / "lower"

struct AUInfo {
  int id;
  Region region;
  const char* name;
  const char* column;
};

// The 17 action units in matrix row order: eight upper-face units followed
// by nine lower-face units.
const std::array<AUInfo, kNumAUs>& AUCatalog();
// Row index of an AU id. Throws ConfigError for ids outside the catalog.
int AURow(int au_id);

inline constexpr int kTrialSize = kNumAUs * kNumFrames;
// Every trial covers the 1500 ms preparation interval.
inline constexpr double kTrialMs = 1500.0;

// Start time of a frame in milliseconds.
inline double FrameStartMs(int frame) { return frame * kTrialMs / kNumFrames; }

struct AUTrial {
  std::string trial_id;
  std::string subject_id;
  std::string session_id;
  Paradigm paradigm = Paradigm::kCW;
  Label label = Label::kFluent;
  // kNumAUs rows of kNumFrames intensities, row-major.
  std::vector<double> matrix = std::vector<double>(kTrialSize, 0.0);

  double& at(int au_row, int frame) { return matrix[au_row * kNumFrames + frame]; }
  double at(int au_row, int frame) const {
    return matrix[au_row * kNumFrames + frame];
  }
};

// Dataset CSV: one row per (trial, frame) with columns trial_id, subject_id,
// session_id, paradigm, label, frame, au01 ... au26. Values are written in
// shortest round-trip form.
void SaveDatasetCsv(const std::string& path, std::span<const AUTrial> trials);
// Throws DataError naming the offending line/column or trial.
std::vector<AUTrial> LoadDatasetCsv(const std::string& path);

struct NormalizationManifest {
  std::string version = "aucnn-minmax-v1";
  std::array<double, kNumAUs> min{};
  std::array<double, kNumAUs> max{};

  friend bool operator==(const NormalizationManifest&,
                         const NormalizationManifest&) = default;
};

// Per-AU min/max over the given trials. Throws DataError for an empty set or
// a constant AU.
NormalizationManifest FitNormalization(std::span<const AUTrial> trials);
// Min-max scales every AU row and clamps to [0,1].
std::vector<AUTrial> ApplyNormalization(std::vector<AUTrial> trials,
                                        const NormalizationManifest& manifest);

// Stacks trial matrices into a [N,17,87] tensor.
Tensor StackTrials(std::span<const AUTrial> trials);
Tensor StackTrials(std::span<const AUTrial> trials, std::span<const int> indices);
std::vector<int> LabelsOf(std::span<const AUTrial> trials);

// Stuttered / (stuttered + fluent) per subject, over every given trial.
std::map<std::string, double> SubjectStutterRates(std::span<const AUTrial> trials);

// Order-sensitive FNV-1a fingerprint of ids, labels and matrix bits.
std::string DatasetFingerprint(std::span<const AUTrial> trials);

}  // namespace aucnn

#endif  // AUCNN_DATASET_H_
