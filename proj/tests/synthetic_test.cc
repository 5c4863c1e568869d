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

#include "aucnn/synthetic.h"

#include <cmath>

#include <gtest/gtest.h>
#include <json.hpp>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

SynthConfig Small(int n = 1000, std::uint64_t seed = 1) {
  SynthConfig c;
  c.n_trials = n;
  c.seed = seed;
  return c;
}

TEST(SyntheticTest, NoSignalFullNoiseGivesChanceBayesAuc) {
  SynthConfig c = Small(400);
  c.au6_amplitude = 0.0;
  c.au14_amplitude = 0.0;
  c.label_noise = 0.5;
  EXPECT_DOUBLE_EQ(GenerateSynthetic(c).oracle.bayes_auc, 0.5);
}

TEST(SyntheticTest, CleanStrongSignalIsSeparable) {
  SynthConfig c = Small(400);
  c.au6_amplitude = 0.5;
  c.au14_amplitude = 0.5;
  c.label_noise = 0.0;
  EXPECT_GT(GenerateSynthetic(c).oracle.bayes_auc, 0.999);
}

TEST(SyntheticTest, ManifestRecordsBayesAuc) {
  const SynthConfig c = Small(300);
  const SynthResult r = GenerateSynthetic(c);
  const auto j = nlohmann::json::parse(SynthManifestJson(c, r));
  EXPECT_EQ(j.at("bayes_auc").get<double>(), r.oracle.bayes_auc);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), c.seed);
  EXPECT_EQ(j.at("normalization").at("per_au").size(), 17u);
  const SynthConfig back = SynthConfigFromJson(j.dump());
  EXPECT_EQ(back.n_trials, c.n_trials);
  EXPECT_EQ(back.au6_amplitude, c.au6_amplitude);
}

TEST(SyntheticTest, ValuesInUnitIntervalWithFullShape) {
  const SynthResult r = GenerateSynthetic(Small(500));
  ASSERT_EQ(r.trials.size(), 500u);
  for (const AUTrial& t : r.trials) {
    ASSERT_EQ(t.matrix.size(), 17u * 87u);
    for (double v : t.matrix) {
      ASSERT_GE(v, 0.0);
      ASSERT_LE(v, 1.0);
    }
  }
}

TEST(SyntheticTest, PureFunctionOfConfig) {
  const SynthResult a = GenerateSynthetic(Small(200, 9));
  const SynthResult b = GenerateSynthetic(Small(200, 9));
  EXPECT_EQ(DatasetFingerprint(a.trials), DatasetFingerprint(b.trials));
  EXPECT_EQ(a.oracle.posterior, b.oracle.posterior);
  EXPECT_EQ(a.oracle.bayes_auc, b.oracle.bayes_auc);
  const SynthResult c = GenerateSynthetic(Small(200, 10));
  EXPECT_NE(DatasetFingerprint(a.trials), DatasetFingerprint(c.trials));
}

TEST(SyntheticTest, Au6PeakSeparatesClasses) {
  const SynthConfig c = Small(1000);
  const SynthResult r = GenerateSynthetic(c);
  const int frame = static_cast<int>(std::floor(700.0 * 87 / 1500.0));
  double sum[2] = {0, 0};
  int count[2] = {0, 0};
  for (const AUTrial& t : r.trials) {
    const int y = static_cast<int>(t.label);
    sum[y] += t.at(AURow(6), frame);
    ++count[y];
  }
  EXPECT_GE(sum[1] / count[1] - sum[0] / count[0], c.au6_amplitude / 2);
}

TEST(SyntheticTest, LabelFrequencyNearTarget) {
  for (double fraction : {0.5, 0.3}) {
    SynthConfig c = Small(2000, 4);
    c.stutter_fraction = fraction;
    const SynthResult r = GenerateSynthetic(c);
    int stuttered = 0;
    for (const AUTrial& t : r.trials) stuttered += t.label == Label::kStuttered ? 1 : 0;
    EXPECT_NEAR(stuttered / 2000.0, fraction, 0.02);
  }
}

TEST(SyntheticTest, PosteriorIsCalibrated) {
  const SynthResult r = GenerateSynthetic(Small(2000, 5));
  // Mean posterior in posterior deciles tracks the empirical label rate.
  double posterior_sum = 0.0;
  int stuttered = 0;
  for (std::size_t i = 0; i < r.trials.size(); ++i) {
    posterior_sum += r.oracle.posterior[i];
    stuttered += r.trials[i].label == Label::kStuttered ? 1 : 0;
  }
  EXPECT_NEAR(posterior_sum / 2000.0, stuttered / 2000.0, 0.03);
  for (double p : r.oracle.posterior) {
    EXPECT_GE(p, 0.15 - 1e-12);
    EXPECT_LE(p, 0.85 + 1e-12);
  }
}

TEST(SyntheticTest, PosteriorRecomputesFromMatrix) {
  const SynthConfig c = Small(50, 6);
  const SynthResult r = GenerateSynthetic(c);
  for (int i = 0; i < 50; ++i) {
    EXPECT_EQ(GeneratorPosterior(c, r.trials[i]), r.oracle.posterior[i]);
  }
}

TEST(SyntheticTest, SaturationWarning) {
  EXPECT_FALSE(GenerateSynthetic(Small(200)).oracle.saturation_warning);
  SynthConfig c = Small(200);
  c.au6_amplitude = 2.0;
  c.au14_amplitude = 2.0;
  EXPECT_TRUE(GenerateSynthetic(c).oracle.saturation_warning);
}

TEST(SyntheticTest, PlantedShapes) {
  const SynthConfig c;
  const int row6 = AURow(6), row14 = AURow(14);
  int peak = 0;
  for (int f = 0; f < 87; ++f) {
    if (PlantedSignal(c, row6, f) > PlantedSignal(c, row6, peak)) peak = f;
  }
  EXPECT_LE(std::abs(FrameStartMs(peak) - 700.0), 1500.0 / 87 / 2);
  EXPECT_EQ(PlantedSignal(c, row14, 60), 0.0);
  EXPECT_GT(PlantedSignal(c, row14, 86), PlantedSignal(c, row14, 70));
  EXPECT_EQ(PlantedSignal(c, AURow(1), 40), 0.0);
}

TEST(SynthConfigTest, Validation) {
  SynthConfig c;
  c.stutter_fraction = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig();
  c.label_noise = 0.6;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig();
  c.n_trials = 0;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig();
  c.ar_rho = 1.0;
  EXPECT_THROW(c.Validate(), ConfigError);
}

}  // namespace
}  // namespace aucnn
