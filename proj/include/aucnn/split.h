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

#ifndef AUCNN_SPLIT_H_
#define AUCNN_SPLIT_H_

#include <cstdint>
#include <span>
#include <vector>

namespace aucnn {

struct Fold {
  std::vector<int> train_pool;  // non-test, non-validation trials
  std::vector<int> train;       // train_pool after class balancing
  std::vector<int> validation;
};

struct SplitPlan {
  std::vector<int> test;
  std::vector<Fold> folds;
};

// Seeded stratified partition of trial indices. The hold-out test set takes
// round(test_fraction * N) trials, apportioned to the classes by largest
// remainder. The rest is cut into `folds` stratified validation folds; each
// fold's training set is the remainder, down-sampled to an exact 50/50 class
// balance. All index lists are sorted ascending.
//
// Throws DataError when a class is absent or has fewer than `folds` trials,
// ConfigError for invalid fractions or fold counts.
SplitPlan StratifiedSplit(std::span<const int> labels, int folds,
                          double test_fraction, std::uint64_t seed);

}  // namespace aucnn

#endif  // AUCNN_SPLIT_H_
