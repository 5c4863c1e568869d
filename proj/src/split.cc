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

#include "aucnn/split.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "aucnn/errors.h"
#include "aucnn/random.h"

namespace aucnn {

SplitPlan StratifiedSplit(std::span<const int> labels, int folds,
                          double test_fraction, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least 2 folds");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError("test_fraction must lie in (0,1)");
  }
  std::array<std::vector<int>, 2> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw DataError("labels must be 0 or 1");
    by_class[labels[i]].push_back(static_cast<int>(i));
  }
  for (int c = 0; c < 2; ++c) {
    if (by_class[c].empty()) {
      throw DataError("class " + std::to_string(c) + " is absent from the dataset");
    }
    if (static_cast<int>(by_class[c].size()) < folds) {
      throw DataError("class " + std::to_string(c) + " has fewer trials than folds");
    }
  }
  std::mt19937_64 rng(DeriveSeed(seed, "split"));
  for (auto& members : by_class) std::shuffle(members.begin(), members.end(), rng);

  // Largest-remainder apportionment of the test total; ties favour class 0.
  const double n = static_cast<double>(labels.size());
  const long test_total = std::lround(test_fraction * n);
  std::array<long, 2> test_count{};
  std::array<double, 2> remainder{};
  for (int c = 0; c < 2; ++c) {
    const double quota = test_total * static_cast<double>(by_class[c].size()) / n;
    test_count[c] = static_cast<long>(std::floor(quota));
    remainder[c] = quota - test_count[c];
  }
  if (test_count[0] + test_count[1] < test_total) {
    test_count[remainder[1] > remainder[0] ? 1 : 0] += 1;
  }
  for (int c = 0; c < 2; ++c) {
    const long rest = static_cast<long>(by_class[c].size()) - test_count[c];
    if (rest < folds) {
      throw DataError("class " + std::to_string(c) +
                      " leaves fewer non-test trials than folds");
    }
  }

  SplitPlan plan;
  plan.folds.resize(folds);
  int extra_offset = 0;
  for (int c = 0; c < 2; ++c) {
    const auto& members = by_class[c];
    plan.test.insert(plan.test.end(), members.begin(), members.begin() + test_count[c]);
    const int rest = static_cast<int>(members.size() - test_count[c]);
    const int base = rest / folds;
    const int extras = rest % folds;
    std::vector<int> sizes(folds, base);
    // Rotate where the extras land so class 1 fills folds class 0 left short.
    for (int e = 0; e < extras; ++e) sizes[(extra_offset + e) % folds] += 1;
    extra_offset = (extra_offset + extras) % folds;
    std::size_t pos = static_cast<std::size_t>(test_count[c]);
    for (int k = 0; k < folds; ++k) {
      auto& val = plan.folds[k].validation;
      val.insert(val.end(), members.begin() + pos, members.begin() + pos + sizes[k]);
      pos += sizes[k];
    }
  }
  std::sort(plan.test.begin(), plan.test.end());
  for (Fold& f : plan.folds) std::sort(f.validation.begin(), f.validation.end());

  std::vector<char> is_test(labels.size(), 0);
  for (int i : plan.test) is_test[i] = 1;
  for (int k = 0; k < folds; ++k) {
    Fold& fold = plan.folds[k];
    std::vector<char> excluded = is_test;
    for (int i : fold.validation) excluded[i] = 1;
    std::array<std::vector<int>, 2> pool;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (!excluded[i]) {
        fold.train_pool.push_back(static_cast<int>(i));
        pool[labels[i]].push_back(static_cast<int>(i));
      }
    }
    const std::size_t keep = std::min(pool[0].size(), pool[1].size());
    std::mt19937_64 balance_rng(DeriveSeed(seed, "balance", k));
    for (auto& members : pool) {
      if (members.size() > keep) {
        std::shuffle(members.begin(), members.end(), balance_rng);
        members.resize(keep);
      }
      fold.train.insert(fold.train.end(), members.begin(), members.end());
    }
    std::sort(fold.train.begin(), fold.train.end());
  }
  return plan;
}

}  // namespace aucnn
