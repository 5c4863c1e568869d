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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

#include "aucnn/errors.h"
#include "aucnn/metrics.h"
#include "aucnn/random.h"

namespace aucnn {
namespace {

constexpr double kTail = 0.1;

// Identity on [kTail, 1-kTail] with exponential tails into (0,1).
double Saturate(double v) {
  if (v < kTail) return kTail * std::exp((v - kTail) / kTail);
  if (v > 1.0 - kTail) return 1.0 - kTail * std::exp((1.0 - kTail - v) / kTail);
  return v;
}

double Unsaturate(double x) {
  if (x < kTail) return kTail + kTail * std::log(x / kTail);
  if (x > 1.0 - kTail) return 1.0 - kTail - kTail * std::log((1.0 - x) / kTail);
  return x;
}

double Baseline(int au_row) {
  return 0.25 + 0.2 * static_cast<double>((au_row * 7) % kNumAUs) / (kNumAUs - 1);
}

// Rate of the latent class that yields `stutter_fraction` observed labels.
double LatentRate(const SynthConfig& c) {
  if (c.label_noise >= 0.5) return c.stutter_fraction;
  const double q = (c.stutter_fraction - c.label_noise) / (1.0 - 2.0 * c.label_noise);
  return std::clamp(q, 0.0, 1.0);
}

double SubjectRate(const SynthConfig& c, int subject) {
  const double q = LatentRate(c);
  const double spread = 0.6 * std::min(q, 1.0 - q);
  const double position =
      2.0 * (subject + 0.5) / static_cast<double>(c.num_subjects) - 1.0;
  return q + spread * position;
}

// Log-density of an AR(1) path of residuals up to a shared constant.
double Ar1LogDensity(const std::array<double, kNumFrames>& r, double rho,
                     double innovation_var) {
  double ss = r[0] * r[0] * (1.0 - rho * rho);
  for (int f = 1; f < kNumFrames; ++f) {
    const double e = r[f] - rho * r[f - 1];
    ss += e * e;
  }
  return -0.5 * ss / innovation_var;
}

std::string Padded(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, value);
  return buf;
}

}  // namespace

void SynthConfig::Validate() const {
  if (n_trials <= 0) throw ConfigError("n_trials must be positive");
  if (!(stutter_fraction > 0.0 && stutter_fraction < 1.0)) {
    throw ConfigError("stutter_fraction must lie in (0,1)");
  }
  if (!(cw_weight >= 0.0 && wg_weight >= 0.0 && cw_weight + wg_weight > 0.0)) {
    throw ConfigError("paradigm weights must be non-negative and not both zero");
  }
  if (!(ar_rho >= 0.0 && ar_rho < 1.0)) throw ConfigError("ar_rho must lie in [0,1)");
  if (!(noise_scale > 0.0)) throw ConfigError("noise_scale must be positive");
  if (!(au6_amplitude >= 0.0 && au14_amplitude >= 0.0)) {
    throw ConfigError("signal amplitudes must be non-negative");
  }
  if (!(au6_width_ms > 0.0)) throw ConfigError("au6_width_ms must be positive");
  if (!(au14_ramp_start_ms < au14_ramp_end_ms)) {
    throw ConfigError("AU14 ramp must start before it ends");
  }
  if (!(label_noise >= 0.0 && label_noise <= 0.5)) {
    throw ConfigError("label_noise must lie in [0,0.5]");
  }
  if (num_subjects < 1 || num_sessions < 1) {
    throw ConfigError("need at least one subject and one session");
  }
}

double PlantedSignal(const SynthConfig& c, int au_row, int frame) {
  const double t = FrameStartMs(frame);
  if (au_row == AURow(6)) {
    const double z = (t - c.au6_center_ms) / c.au6_width_ms;
    return c.au6_amplitude * std::exp(-0.5 * z * z);
  }
  if (au_row == AURow(14)) {
    const double u = (t - c.au14_ramp_start_ms) /
                     (c.au14_ramp_end_ms - c.au14_ramp_start_ms);
    return c.au14_amplitude * std::clamp(u, 0.0, 1.0);
  }
  return 0.0;
}

double GeneratorPosterior(const SynthConfig& c, const AUTrial& trial) {
  const double innovation_var =
      c.noise_scale * c.noise_scale * (1.0 - c.ar_rho * c.ar_rho);
  double llr = 0.0;
  for (int row : {AURow(6), AURow(14)}) {
    std::array<double, kNumFrames> r0, r1;
    for (int f = 0; f < kNumFrames; ++f) {
      const double v = Unsaturate(trial.at(row, f)) - Baseline(row);
      r0[f] = v;
      r1[f] = v - PlantedSignal(c, row, f);
    }
    llr += Ar1LogDensity(r1, c.ar_rho, innovation_var) -
           Ar1LogDensity(r0, c.ar_rho, innovation_var);
  }
  const double q = LatentRate(c);
  double latent;
  if (q <= 0.0) {
    latent = 0.0;
  } else if (q >= 1.0) {
    latent = 1.0;
  } else {
    const double logit = std::log(q / (1.0 - q)) + llr;
    latent = 1.0 / (1.0 + std::exp(-logit));
  }
  return c.label_noise + (1.0 - 2.0 * c.label_noise) * latent;
}

SynthResult GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  SynthResult result;
  auto& trials = result.trials;
  auto& oracle = result.oracle;
  trials.resize(config.n_trials);
  oracle.latent.resize(config.n_trials);
  oracle.posterior.resize(config.n_trials);

  const double p_cw = config.cw_weight / (config.cw_weight + config.wg_weight);
  const double innovation_sd =
      config.noise_scale * std::sqrt(1.0 - config.ar_rho * config.ar_rho);
  std::size_t signal_cells = 0, saturated_cells = 0;

  for (int i = 0; i < config.n_trials; ++i) {
    std::mt19937_64 rng(DeriveSeed(config.seed, "synth-trial", i));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    AUTrial& t = trials[i];
    const int subject = i % config.num_subjects;
    const int session = (i / config.num_subjects) % config.num_sessions;
    t.trial_id = Padded("T", i + 1, 5);
    t.subject_id = Padded("S", subject + 1, 2);
    t.session_id = Padded("", session + 1, 1);
    t.paradigm = unit(rng) < p_cw ? Paradigm::kCW : Paradigm::kWG;
    const int z = unit(rng) < SubjectRate(config, subject) ? 1 : 0;
    const bool flip = unit(rng) < config.label_noise;
    t.label = (z == 1) != flip ? Label::kStuttered : Label::kFluent;
    oracle.latent[i] = z;

    for (int a = 0; a < kNumAUs; ++a) {
      double e = config.noise_scale * normal(rng);
      for (int f = 0; f < kNumFrames; ++f) {
        if (f > 0) e = config.ar_rho * e + innovation_sd * normal(rng);
        const double signal = z == 1 ? PlantedSignal(config, a, f) : 0.0;
        const double x = Saturate(Baseline(a) + e + signal);
        t.at(a, f) = x;
        const double peak = a == AURow(6) ? config.au6_amplitude
                            : a == AURow(14) ? config.au14_amplitude
                                             : 0.0;
        if (z == 1 && peak > 0.0 && signal >= 0.5 * peak) {
          ++signal_cells;
          if (x < kTail || x > 1.0 - kTail) ++saturated_cells;
        }
      }
    }
    oracle.posterior[i] = GeneratorPosterior(config, t);
  }

  if (signal_cells > 0) {
    oracle.saturation_fraction =
        static_cast<double>(saturated_cells) / static_cast<double>(signal_cells);
  }
  oracle.saturation_warning = oracle.saturation_fraction > 0.5;
  const std::vector<int> labels = LabelsOf(trials);
  const bool both = std::count(labels.begin(), labels.end(), 1) > 0 &&
                    std::count(labels.begin(), labels.end(), 0) > 0;
  oracle.bayes_auc = both ? AucRoc(oracle.posterior, labels) : 0.5;
  return result;
}

namespace {

nlohmann::json ConfigJson(const SynthConfig& c) {
  return {
      {"n_trials", c.n_trials},
      {"stutter_fraction", c.stutter_fraction},
      {"cw_weight", c.cw_weight},
      {"wg_weight", c.wg_weight},
      {"ar_rho", c.ar_rho},
      {"noise_scale", c.noise_scale},
      {"au6_amplitude", c.au6_amplitude},
      {"au6_center_ms", c.au6_center_ms},
      {"au6_width_ms", c.au6_width_ms},
      {"au14_amplitude", c.au14_amplitude},
      {"au14_ramp_start_ms", c.au14_ramp_start_ms},
      {"au14_ramp_end_ms", c.au14_ramp_end_ms},
      {"label_noise", c.label_noise},
      {"num_subjects", c.num_subjects},
      {"num_sessions", c.num_sessions},
      {"seed", c.seed},
  };
}

}  // namespace

std::string SynthManifestJson(const SynthConfig& config, const SynthResult& result) {
  nlohmann::json j;
  j["format"] = "aucnn-synth-v1";
  j["config"] = ConfigJson(config);
  j["seed"] = config.seed;
  j["bayes_auc"] = result.oracle.bayes_auc;
  j["saturation_fraction"] = result.oracle.saturation_fraction;
  j["saturation_warning"] = result.oracle.saturation_warning;
  const std::vector<int> labels = LabelsOf(result.trials);
  j["n_stuttered"] = std::count(labels.begin(), labels.end(), 1);
  j["n_fluent"] = std::count(labels.begin(), labels.end(), 0);
  j["fingerprint"] = DatasetFingerprint(result.trials);
  const NormalizationManifest norm = FitNormalization(result.trials);
  nlohmann::json stats = nlohmann::json::array();
  for (int a = 0; a < kNumAUs; ++a) {
    stats.push_back({{"au", AUCatalog()[a].column},
                     {"min", norm.min[a]},
                     {"max", norm.max[a]}});
  }
  j["normalization"] = {{"version", norm.version}, {"per_au", stats}};
  return j.dump(2) + "\n";
}

SynthConfig SynthConfigFromJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.contains("config")) j = j["config"];
  SynthConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("n_trials", c.n_trials);
  get("stutter_fraction", c.stutter_fraction);
  get("cw_weight", c.cw_weight);
  get("wg_weight", c.wg_weight);
  get("ar_rho", c.ar_rho);
  get("noise_scale", c.noise_scale);
  get("au6_amplitude", c.au6_amplitude);
  get("au6_center_ms", c.au6_center_ms);
  get("au6_width_ms", c.au6_width_ms);
  get("au14_amplitude", c.au14_amplitude);
  get("au14_ramp_start_ms", c.au14_ramp_start_ms);
  get("au14_ramp_end_ms", c.au14_ramp_end_ms);
  get("label_noise", c.label_noise);
  get("num_subjects", c.num_subjects);
  get("num_sessions", c.num_sessions);
  get("seed", c.seed);
  c.Validate();
  return c;
}

}  // namespace aucnn
