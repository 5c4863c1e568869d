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

#ifndef AUCNN_METRICS_H_
#define AUCNN_METRICS_H_

#include <span>
#include <vector>

namespace aucnn {

inline constexpr double kDecisionThreshold = 0.5;

// Area under the ROC curve as the Mann-Whitney statistic: the fraction of
// (positive, negative) pairs where the positive scores higher, ties counting
// one half. Throws DataError unless both classes are present.
double AucRoc(std::span<const double> scores, std::span<const int> labels);

// 2TP / (2TP + FP + FN), or 0 when the denominator is 0.
double F1Score(std::span<const int> predictions, std::span<const int> labels);

// Thresholds probabilities at kDecisionThreshold (p >= 0.5 is positive).
std::vector<int> Threshold(std::span<const double> probabilities);
double Accuracy(std::span<const int> predictions, std::span<const int> labels);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population (ddof = 0)
};
MeanStd Summarize(std::span<const double> values);

}  // namespace aucnn

#endif  // AUCNN_METRICS_H_
