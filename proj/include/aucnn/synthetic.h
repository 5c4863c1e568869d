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

#ifndef AUCNN_SYNTHETIC_H_
#define AUCNN_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aucnn/dataset.h"

namespace aucnn {

struct SynthConfig {
  int n_trials = 3704;
  double stutter_fraction = 0.5;
  // Relative paradigm weights CW:WG.
  double cw_weight = 1710.0;
  double wg_weight = 1992.0;
  double ar_rho = 0.95;
  double noise_scale = 0.08;  // stationary standard deviation of the baseline
  double au6_amplitude = 0.25;
  double au6_center_ms = 700.0;
  double au6_width_ms = 150.0;
  double au14_amplitude = 0.25;
  double au14_ramp_start_ms = 1100.0;
  double au14_ramp_end_ms = 1500.0;
  double label_noise = 0.15;
  int num_subjects = 12;
  int num_sessions = 2;
  std::uint64_t seed = 0;

  // Throws ConfigError.
  void Validate() const;
};

struct GeneratorOracle {
  // P(label = stuttered | matrix) for every generated trial.
  std::vector<double> posterior;
  // Latent class before label noise.
  std::vector<int> latent;
  double bayes_auc = 0.5;
  // Share of planted-signal cells that landed in the saturating tails.
  double saturation_fraction = 0.0;
  bool saturation_warning = false;
};

struct SynthResult {
  std::vector<AUTrial> trials;
  GeneratorOracle oracle;
};

// Trials are smooth AR(1) baselines per AU. Latent stuttered trials add a
// Gaussian bump to AU6 and a linear ramp to AU14; the observed label flips
// the latent class with probability `label_noise`. Values pass through a
// smooth saturation into (0,1) that is the identity on [0.1, 0.9].
SynthResult GenerateSynthetic(const SynthConfig& config);

// Exact P(label = stuttered | matrix) under the generator.
double GeneratorPosterior(const SynthConfig& config, const AUTrial& trial);

// Planted signal of a latent stuttered trial at AU row / frame.
double PlantedSignal(const SynthConfig& config, int au_row, int frame);

// JSON text recording the config, seed, normalization statistics and the
// oracle's Bayes AUC.
std::string SynthManifestJson(const SynthConfig& config, const SynthResult& result);
SynthConfig SynthConfigFromJson(const std::string& text);

}  // namespace aucnn

#endif  // AUCNN_SYNTHETIC_H_
