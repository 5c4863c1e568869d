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

#include "aucnn/checkpoint.h"

#include <fstream>
#include <sstream>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

constexpr const char* kFormat = "aucnn-checkpoint-v1";

nlohmann::json TensorToJson(const Tensor& t) {
  return {{"shape", t.shape()}, {"data", t.vector()}};
}

Tensor TensorFromJson(const nlohmann::json& j) {
  return Tensor(j.at("shape").get<std::vector<int>>(),
                j.at("data").get<std::vector<double>>());
}

nlohmann::json SpecToJson(const LayerSpec& s) {
  return {{"kind", LayerKindName(s.kind)},
          {"in_channels", s.in_channels},
          {"out_channels", s.out_channels},
          {"kernel_h", s.kernel_h},
          {"kernel_w", s.kernel_w},
          {"depth_multiplier", s.depth_multiplier},
          {"pool_h", s.pool_h},
          {"pool_w", s.pool_w},
          {"padding", s.padding == kernels::Padding::kSame ? "same" : "valid"},
          {"use_bias", s.use_bias},
          {"rate", s.rate},
          {"epsilon", s.epsilon},
          {"momentum", s.momentum}};
}

LayerSpec SpecFromJson(const nlohmann::json& j) {
  LayerSpec s;
  s.kind = LayerKindFromName(j.at("kind").get<std::string>());
  j.at("in_channels").get_to(s.in_channels);
  j.at("out_channels").get_to(s.out_channels);
  j.at("kernel_h").get_to(s.kernel_h);
  j.at("kernel_w").get_to(s.kernel_w);
  j.at("depth_multiplier").get_to(s.depth_multiplier);
  j.at("pool_h").get_to(s.pool_h);
  j.at("pool_w").get_to(s.pool_w);
  const std::string padding = j.at("padding").get<std::string>();
  if (padding != "same" && padding != "valid") {
    throw DataError("unknown padding '" + padding + "'");
  }
  s.padding = padding == "same" ? kernels::Padding::kSame : kernels::Padding::kValid;
  j.at("use_bias").get_to(s.use_bias);
  j.at("rate").get_to(s.rate);
  j.at("epsilon").get_to(s.epsilon);
  j.at("momentum").get_to(s.momentum);
  return s;
}

void CopyInto(Tensor& dst, const Tensor& src, const std::string& what) {
  if (dst.shape() != src.shape()) {
    throw DataError(what + " has shape " + src.ShapeString() + ", expected " +
                    dst.ShapeString());
  }
  dst = src;
}

}  // namespace

nlohmann::json ModelConfigToJson(const ModelConfig& c) {
  return {{"architecture", ArchitectureName(c.architecture)},
          {"channels", c.channels},
          {"timesteps", c.timesteps},
          {"cnn_b_kernel", c.cnn_b_kernel},
          {"dropout_rate", c.dropout_rate},
          {"rf_trees", c.rf_trees},
          {"rf_max_depth", c.rf_max_depth},
          {"seed", c.seed}};
}

ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  ModelConfig c;
  c.architecture = ArchitectureFromName(j.at("architecture").get<std::string>());
  j.at("channels").get_to(c.channels);
  j.at("timesteps").get_to(c.timesteps);
  j.at("cnn_b_kernel").get_to(c.cnn_b_kernel);
  j.at("dropout_rate").get_to(c.dropout_rate);
  j.at("rf_trees").get_to(c.rf_trees);
  j.at("rf_max_depth").get_to(c.rf_max_depth);
  j.at("seed").get_to(c.seed);
  return c;
}

nlohmann::json CheckpointToJson(const Checkpoint& ck) {
  nlohmann::json j;
  j["format"] = kFormat;
  j["config"] = ModelConfigToJson(ck.config);
  if (ck.model) {
    const Model& m = *ck.model;
    nlohmann::json layers = nlohmann::json::array();
    for (int i = 0; i < m.num_layers(); ++i) {
      const Layer& layer = m.layer(i);
      nlohmann::json params = nlohmann::json::array();
      for (const Tensor& p : layer.parameters()) params.push_back(TensorToJson(p));
      nlohmann::json buffers = nlohmann::json::array();
      for (const Tensor* b : layer.Buffers()) buffers.push_back(TensorToJson(*b));
      layers.push_back(
          {{"spec", SpecToJson(layer.spec())}, {"params", params}, {"buffers", buffers}});
    }
    j["network"] = {{"input_shape", m.input_shape()},
                    {"trained", m.trained()},
                    {"layers", layers}};
  }
  if (ck.forest) j["forest"] = ck.forest->ToJson();
  j["normalization"] = {{"version", ck.normalization.version},
                        {"min", ck.normalization.min},
                        {"max", ck.normalization.max}};
  j["paradigm_filter"] = ck.paradigm_filter;
  j["test_trial_ids"] = ck.test_trial_ids;
  j["dataset_fingerprint"] = ck.dataset_fingerprint;
  j["train_seed"] = ck.train_seed;
  j["best_fold"] = ck.best_fold;
  return j;
}

Checkpoint CheckpointFromJson(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) {
      throw DataError("unsupported checkpoint format '" +
                      j.at("format").get<std::string>() + "'");
    }
    Checkpoint ck;
    ck.config = ModelConfigFromJson(j.at("config"));
    if (j.contains("network")) {
      const auto& net = j.at("network");
      std::vector<LayerSpec> specs;
      for (const auto& l : net.at("layers")) specs.push_back(SpecFromJson(l.at("spec")));
      Model model =
          BuildFromSpecs(ck.config, net.at("input_shape").get<std::vector<int>>(), specs);
      const auto& layers = net.at("layers");
      for (int i = 0; i < model.num_layers(); ++i) {
        Layer& layer = model.mutable_layer(i);
        const auto& params = layers[i].at("params");
        if (params.size() != layer.parameters().size()) {
          throw DataError("layer " + std::to_string(i) + " has the wrong parameter count");
        }
        for (std::size_t p = 0; p < params.size(); ++p) {
          CopyInto(layer.parameters()[p], TensorFromJson(params[p]),
                   "layer " + std::to_string(i) + " parameter " + std::to_string(p));
        }
        const auto buffers = layer.MutableBuffers();
        const auto& stored = layers[i].at("buffers");
        if (stored.size() != buffers.size()) {
          throw DataError("layer " + std::to_string(i) + " has the wrong buffer count");
        }
        for (std::size_t b = 0; b < buffers.size(); ++b) {
          CopyInto(*buffers[b], TensorFromJson(stored[b]),
                   "layer " + std::to_string(i) + " buffer " + std::to_string(b));
        }
      }
      model.set_trained(net.at("trained").get<bool>());
      ck.model = std::move(model);
    }
    if (j.contains("forest")) ck.forest = RandomForest::FromJson(j.at("forest"));
    const auto& norm = j.at("normalization");
    norm.at("version").get_to(ck.normalization.version);
    norm.at("min").get_to(ck.normalization.min);
    norm.at("max").get_to(ck.normalization.max);
    j.at("paradigm_filter").get_to(ck.paradigm_filter);
    j.at("test_trial_ids").get_to(ck.test_trial_ids);
    j.at("dataset_fingerprint").get_to(ck.dataset_fingerprint);
    j.at("train_seed").get_to(ck.train_seed);
    j.at("best_fold").get_to(ck.best_fold);
    return ck;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void SaveCheckpoint(const std::string& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  out << CheckpointToJson(checkpoint).dump() << '\n';
  if (!out) throw DataError("failed writing '" + path + "'");
}

Checkpoint LoadCheckpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  return CheckpointFromJson(j);
}

}  // namespace aucnn
