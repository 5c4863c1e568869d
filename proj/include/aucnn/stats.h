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

#ifndef AUCNN_STATS_H_
#define AUCNN_STATS_H_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aucnn/dataset.h"
#include "aucnn/explainer.h"

namespace aucnn {

struct AnovaTable {
  double f = 0.0;
  int df_between = 0;
  int df_within = 0;
  double p = 1.0;
};

// One-way ANOVA. Requires at least 2 groups of at least 2 samples each
// (ConfigError otherwise). Zero within-group variance with distinct means
// reports the largest finite double as F and p = 0.
AnovaTable AnovaOneway(const std::vector<std::vector<double>>& groups);

// Regularized incomplete beta I_x(a, b), continued fraction evaluation.
double RegularizedIncompleteBeta(double a, double b, double x);

// Survival function of the F distribution with (d1, d2) degrees of freedom.
double FSurvival(double f, double d1, double d2);

enum class Factor { kLabel, kParadigm, kStutterBand, kWindow };
const char* FactorName(Factor factor);  // "label", "paradigm", "stutter-band", "window"
Factor FactorFromName(const std::string& name);

enum class AUScope { kAll, kUpper, kLower, kSingle };

struct TimeWindow {
  double t0_ms = 0.0;
  double t1_ms = kTrialMs;
  std::string Name() const;  // e.g. "0-500"
};

const std::vector<TimeWindow>& DefaultWindows();

struct GroupingSpec {
  Factor factor = Factor::kLabel;
  double stutter_band_threshold = 40.0;  // percent; above is HSR
  std::vector<TimeWindow> windows = DefaultWindows();
  AUScope scope = AUScope::kAll;
  int au_id = 0;  // used with AUScope::kSingle
  bool positive_only = false;
};

struct TrialMetadata {
  std::string trial_id;
  std::string subject_id;
  Paradigm paradigm = Paradigm::kCW;
  Label label = Label::kFluent;
  double subject_stutter_rate = 0.0;  // fraction in [0,1]
};

// Metadata for each trial with its subject's stutter rate over all trials.
std::vector<TrialMetadata> MetadataFor(std::span<const AUTrial> trials);

struct AnovaRow {
  std::string factor;
  int au_id = 0;
  std::string region;
  std::string window;
  AnovaTable table;
  double p_bonferroni = 1.0;
};

// One ANOVA per AU in scope (and per window for Factor::kWindow, where the
// grouping is by label within each window). The per-trial response is the
// window-mean attribution; the full trial for factors other than window.
// Rows are sorted by F descending. Throws DataError when maps and metadata
// disagree or a factor level has fewer than 2 trials.
std::vector<AnovaRow> AttributionAnova(const std::vector<AttributionMap>& maps,
                                       const std::vector<TrialMetadata>& metadata,
                                       const GroupingSpec& spec);

// CSV columns factor, au_id, region, window, F, df1, df2, p, p_bonferroni.
std::string AnovaCsv(const std::vector<AnovaRow>& rows);

}  // namespace aucnn

#endif  // AUCNN_STATS_H_
