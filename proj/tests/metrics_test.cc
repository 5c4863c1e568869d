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

#include "aucnn/metrics.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

// Mann-Whitney statistic counted over every positive/negative pair.
double BruteForceAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  int pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      ++pairs;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

TEST(AucRocTest, Examples) {
  EXPECT_DOUBLE_EQ(AucRoc(std::vector<double>{0.1, 0.4, 0.35, 0.8},
                          std::vector<int>{0, 0, 1, 1}),
                   0.75);
  EXPECT_DOUBLE_EQ(AucRoc(std::vector<double>{0.1, 0.2, 0.8, 0.9},
                          std::vector<int>{0, 0, 1, 1}),
                   1.0);
  EXPECT_DOUBLE_EQ(AucRoc(std::vector<double>{0.9, 0.8, 0.2, 0.1},
                          std::vector<int>{0, 0, 1, 1}),
                   0.0);
}

TEST(AucRocTest, ConstantScoresGiveHalf) {
  EXPECT_DOUBLE_EQ(AucRoc(std::vector<double>(6, 0.3),
                          std::vector<int>{0, 1, 0, 1, 1, 0}),
                   0.5);
}

TEST(AucRocTest, SingleClassThrows) {
  EXPECT_THROW(AucRoc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
               DataError);
  EXPECT_THROW(AucRoc(std::vector<double>{0.1}, std::vector<int>{1, 0}),
               DataError);
}

TEST(AucRocTest, MatchesPairCountWithTies) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> level(0, 9);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> s(60);
    std::vector<int> y(60);
    for (int i = 0; i < 60; ++i) {
      s[i] = level(rng) / 10.0;
      y[i] = (i % 3 == 0) ? 1 : 0;
    }
    EXPECT_NEAR(AucRoc(s, y), BruteForceAuc(s, y), 1e-12);
  }
}

TEST(AucRocTest, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(80), t(80);
  std::vector<int> y(80);
  for (int i = 0; i < 80; ++i) {
    s[i] = u(rng);
    t[i] = std::exp(3.0 * s[i]) - 7.0;
    y[i] = u(rng) < s[i] ? 1 : 0;
  }
  EXPECT_DOUBLE_EQ(AucRoc(s, y), AucRoc(t, y));
}

TEST(AucRocTest, ComplementFlipsScore) {
  std::vector<double> s{0.2, 0.7, 0.4, 0.9, 0.1, 0.5};
  std::vector<int> y{0, 1, 1, 0, 0, 1};
  std::vector<double> neg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  EXPECT_NEAR(AucRoc(s, y) + AucRoc(neg, y), 1.0, 1e-12);
}

TEST(F1ScoreTest, Examples) {
  EXPECT_DOUBLE_EQ(F1Score(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 0, 0, 1}),
                   0.8);
  EXPECT_DOUBLE_EQ(F1Score(std::vector<int>{0, 0}, std::vector<int>{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(F1Score(std::vector<int>{1, 1}, std::vector<int>{1, 1}), 1.0);
}

TEST(ThresholdTest, HalfIsPositive) {
  EXPECT_EQ(Threshold(std::vector<double>{0.49, 0.5, 0.51, 0.0}),
            (std::vector<int>{0, 1, 1, 0}));
}

TEST(AccuracyTest, Example) {
  EXPECT_DOUBLE_EQ(Accuracy(std::vector<int>{1, 0, 1, 1}, std::vector<int>{1, 0, 0, 1}),
                   0.75);
  EXPECT_THROW(Accuracy(std::vector<int>{1}, std::vector<int>{1, 0}), DataError);
}

TEST(SummarizeTest, PopulationStd) {
  const MeanStd m = Summarize(std::vector<double>{1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.std, std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(Summarize(std::vector<double>{7.0}).std, 0.0);
}

}  // namespace
}  // namespace aucnn
