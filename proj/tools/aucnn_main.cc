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

// Command-line entry point: synth, train, explain and stats subcommands.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aucnn/commands.h"
#include "aucnn/errors.h"
#include "aucnn/random.h"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre-speech stuttering prediction from facial action units"};
  app.set_config("--config", "", "Key-value file mirroring the command-line flags");
  app.require_subcommand(1);

  // synth
  aucnn::SynthOptions synth;
  std::uint64_t synth_seed = 0;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Generate a synthetic AU dataset");
  synth_cmd->add_option("--out", synth.out_csv, "Dataset CSV path")->capture_default_str();
  synth_cmd->add_option("--manifest", synth.manifest, "Manifest path (default <out>.manifest.json)");
  synth_cmd->add_option("--n-trials", synth.synth.n_trials)->capture_default_str();
  synth_cmd->add_option("--stutter-fraction", synth.synth.stutter_fraction)->capture_default_str();
  synth_cmd->add_option("--cw-weight", synth.synth.cw_weight)->capture_default_str();
  synth_cmd->add_option("--wg-weight", synth.synth.wg_weight)->capture_default_str();
  synth_cmd->add_option("--ar-rho", synth.synth.ar_rho)->capture_default_str();
  synth_cmd->add_option("--noise-scale", synth.synth.noise_scale)->capture_default_str();
  synth_cmd->add_option("--au6-amplitude", synth.synth.au6_amplitude)->capture_default_str();
  synth_cmd->add_option("--au14-amplitude", synth.synth.au14_amplitude)->capture_default_str();
  synth_cmd->add_option("--label-noise", synth.synth.label_noise)->capture_default_str();
  synth_cmd->add_option("--subjects", synth.synth.num_subjects)->capture_default_str();
  synth_cmd->add_option("--sessions", synth.synth.num_sessions)->capture_default_str();
  synth_cmd->add_option("--seed", synth_seed)->capture_default_str();

  // train
  aucnn::TrainOptions train;
  std::string arch = "cnn-a";
  std::uint64_t train_seed = 0;
  CLI::App* train_cmd = app.add_subcommand("train", "Cross-validate a classifier");
  train_cmd->add_option("--data", train.dataset, "Dataset CSV")->required();
  train_cmd->add_option("--arch", arch, "cnn-a, cnn-b or rf")->capture_default_str();
  train_cmd->add_option("--kernel", train.model.cnn_b_kernel, "CNN-B kernel edge: 2, 4 or 6")
      ->capture_default_str();
  train_cmd->add_option("--dropout", train.model.dropout_rate)->capture_default_str();
  train_cmd->add_option("--rf-trees", train.model.rf_trees)->capture_default_str();
  train_cmd->add_option("--rf-max-depth", train.model.rf_max_depth, "0 grows until pure")
      ->capture_default_str();
  train_cmd->add_option("--paradigm", train.paradigm, "all, CW or WG")->capture_default_str();
  train_cmd->add_option("--out-dir", train.out_dir)->capture_default_str();
  train_cmd->add_option("--batch-size", train.train.batch_size)->capture_default_str();
  train_cmd->add_option("--max-epochs", train.train.max_epochs)->capture_default_str();
  train_cmd->add_option("--early-stop-patience", train.train.early_stop_patience)
      ->capture_default_str();
  train_cmd->add_option("--lr", train.train.lr0)->capture_default_str();
  train_cmd->add_option("--lr-factor", train.train.lr_factor)->capture_default_str();
  train_cmd->add_option("--lr-patience", train.train.lr_patience)->capture_default_str();
  train_cmd->add_option("--lr-min", train.train.lr_min)->capture_default_str();
  train_cmd->add_option("--folds", train.train.folds)->capture_default_str();
  train_cmd->add_option("--test-fraction", train.train.test_fraction)->capture_default_str();
  train_cmd->add_option("--threads", train.threads, "Folds trained in parallel")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_seed)->capture_default_str();
  train_cmd->add_flag("--verbose", train.verbose, "Log every epoch");

  // explain
  aucnn::ExplainOptions explain;
  CLI::App* explain_cmd = app.add_subcommand("explain", "DeepSHAP attribution maps");
  explain_cmd->add_option("--checkpoint", explain.checkpoint)->required();
  explain_cmd->add_option("--data", explain.dataset, "Dataset CSV")->required();
  explain_cmd->add_option("--trial", explain.trial_ids, "Trial id (repeatable)");
  explain_cmd->add_flag("--all-test", explain.all_test, "Explain every held-out test trial");
  explain_cmd->add_option("--out-dir", explain.out_dir)->capture_default_str();
  explain_cmd->add_option("--references", explain.references, "Training draws used as references")
      ->capture_default_str();
  explain_cmd->add_flag("--zero-reference", explain.zero_reference,
                        "Use a single all-zero reference");
  explain_cmd->add_flag("--positive-only", explain.positive_only, "Zero negative attributions");
  explain_cmd->add_option("--cell", explain.cell, "Heatmap pixels per cell")->capture_default_str();
  explain_cmd->add_option("--seed", explain.seed)->capture_default_str();

  // stats
  aucnn::StatsOptions stats;
  std::string factor = "label";
  std::string scope = "all";
  CLI::App* stats_cmd = app.add_subcommand("stats", "ANOVA over attribution maps");
  stats_cmd->add_option("--attributions", stats.attributions_dir, "Output directory of explain")
      ->capture_default_str();
  stats_cmd->add_option("--metadata", stats.metadata, "Default <attributions>/metadata.csv");
  stats_cmd->add_option("--factor", factor, "label, paradigm, stutter-band or window")
      ->capture_default_str();
  stats_cmd->add_option("--threshold", stats.grouping.stutter_band_threshold,
                        "Stutter-rate band split in percent")
      ->capture_default_str();
  stats_cmd->add_option("--scope", scope, "all, upper, lower or au")->capture_default_str();
  stats_cmd->add_option("--au", stats.grouping.au_id, "AU id when --scope au");
  stats_cmd->add_flag("--positive-only", stats.grouping.positive_only);
  stats_cmd->add_option("--out", stats.out_csv)->capture_default_str();
  stats_cmd->add_option("--summary", stats.summary, "Default <out>.summary.txt");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth_cmd) {
      synth.synth.seed = synth_seed;
      aucnn::CmdSynth(synth, std::cout);
    } else if (*train_cmd) {
      train.model.architecture = aucnn::ArchitectureFromName(arch);
      train.model.seed = aucnn::DeriveSeed(train_seed, "model");
      train.train.seed = aucnn::DeriveSeed(train_seed, "training");
      aucnn::CmdTrain(train, std::cout);
    } else if (*explain_cmd) {
      aucnn::CmdExplain(explain, std::cout);
    } else if (*stats_cmd) {
      stats.grouping.factor = aucnn::FactorFromName(factor);
      if (scope == "all") {
        stats.grouping.scope = aucnn::AUScope::kAll;
      } else if (scope == "upper") {
        stats.grouping.scope = aucnn::AUScope::kUpper;
      } else if (scope == "lower") {
        stats.grouping.scope = aucnn::AUScope::kLower;
      } else if (scope == "au") {
        stats.grouping.scope = aucnn::AUScope::kSingle;
      } else {
        throw aucnn::ConfigError("unknown scope '" + scope + "'");
      }
      aucnn::CmdStats(stats, std::cout);
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const aucnn::TrainingDiverged& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
