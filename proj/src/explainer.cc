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

#include "aucnn/explainer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

#include "aucnn/errors.h"
#include "aucnn/kernels.h"
#include "aucnn/random.h"

namespace aucnn {
namespace {

constexpr double kSecantGuard = 1e-9;

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

ReferenceSet ZeroReference(const std::vector<int>& sample_shape) {
  std::vector<int> shape{1};
  shape.insert(shape.end(), sample_shape.begin(), sample_shape.end());
  return {Tensor(shape), "zeros"};
}

ReferenceSet DrawReferences(std::span<const AUTrial> trials, std::span<const int> pool,
                            int count, std::uint64_t seed) {
  if (count < 1 || pool.empty()) throw ConfigError("reference set would be empty");
  std::vector<int> chosen(pool.begin(), pool.end());
  std::mt19937_64 rng(DeriveSeed(seed, "references"));
  const int k = std::min<int>(count, static_cast<int>(chosen.size()));
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, static_cast<int>(chosen.size()) - 1);
    std::swap(chosen[i], chosen[pick(rng)]);
  }
  chosen.resize(k);
  return {StackTrials(trials, chosen), "training-sample draw"};
}

DeepShap::DeepShap(const Model& model, ReferenceSet references,
                   AttributionTarget target)
    : model_(model), references_(std::move(references)), target_(target) {
  if (!model_.trained()) throw ConfigError("cannot explain an untrained model");
  if (references_.size() == 0) throw ConfigError("reference set is empty");
  const Tensor logits =
      model_.Forward(references_.inputs, {Mode::kInfer, nullptr, false}, &reference_trace_);
  for (int k = 0; k < logits.dim(0); ++k) reference_outputs_.push_back(TargetOf(logits[k]));
}

double DeepShap::TargetOf(double logit) const {
  return target_ == AttributionTarget::kProbability ? kernels::Sigmoid(logit) : logit;
}

double DeepShap::Output(const Tensor& x) const {
  const Tensor batch = x.Reshaped([&] {
    std::vector<int> s{1};
    s.insert(s.end(), model_.input_shape().begin(), model_.input_shape().end());
    return s;
  }());
  return TargetOf(model_.Logits(batch)[0]);
}

Tensor DeepShap::ExplainPerReference(const Tensor& x) const {
  std::vector<int> one_shape{1};
  one_shape.insert(one_shape.end(), model_.input_shape().begin(),
                   model_.input_shape().end());
  if (x.size() != ShapeSize(model_.input_shape())) {
    throw ShapeError("input " + x.ShapeString() + " does not match model input " +
                     ShapeToString(model_.input_shape()));
  }
  ForwardTrace trace;
  const Tensor logit =
      model_.Forward(x.Reshaped(one_shape), {Mode::kInfer, nullptr, false}, &trace);

  const int k_refs = references_.size();
  const auto& ref_acts = reference_trace_.activations;
  const Tensor& ref_logits = ref_acts.back();

  // Multipliers of the target with respect to the logit.
  std::vector<int> out_shape = ref_logits.shape();
  Tensor m(out_shape);
  for (int k = 0; k < k_refs; ++k) {
    if (target_ == AttributionTarget::kLogit) {
      m[k] = 1.0;
      continue;
    }
    const double dx = logit[0] - ref_logits[k];
    if (std::abs(dx) < kSecantGuard) {
      const double s = kernels::Sigmoid(0.5 * (logit[0] + ref_logits[k]));
      m[k] = s * (1.0 - s);
    } else {
      m[k] = (kernels::Sigmoid(logit[0]) - kernels::Sigmoid(ref_logits[k])) / dx;
    }
  }

  for (int i = model_.num_layers() - 1; i >= 0; --i) {
    const Layer& layer = model_.layer(i);
    if (layer.IsElementwiseNonlinear()) {
      const Tensor& in_x = trace.activations[i];
      const Tensor& in_r = ref_acts[i];
      const std::size_t per = in_x.size();
      for (int k = 0; k < k_refs; ++k) {
        double* mk = m.data() + k * per;
        const double* rk = in_r.data() + k * per;
        for (std::size_t j = 0; j < per; ++j) {
          const double dx = in_x[j] - rk[j];
          double slope;
          if (std::abs(dx) < kSecantGuard) {
            slope = layer.ActivationDerivative(0.5 * (in_x[j] + rk[j]));
          } else {
            slope = (layer.Activate(in_x[j]) - layer.Activate(rk[j])) / dx;
          }
          mk[j] *= slope;
        }
      }
    } else {
      m = layer.Backward(m, ref_acts[i], reference_trace_.caches[i], nullptr, true);
    }
  }

  const Tensor& refs = ref_acts[0];
  const std::size_t per = x.size();
  Tensor out(refs.shape());
  for (int k = 0; k < k_refs; ++k) {
    for (std::size_t j = 0; j < per; ++j) {
      const std::size_t idx = k * per + j;
      out[idx] = m[idx] * (x[j] - refs[idx]);
    }
  }
  return out;
}

AttributionMap DeepShap::Explain(const Tensor& x, const std::string& trial_id) const {
  const Tensor per_ref = ExplainPerReference(x);
  const int k_refs = per_ref.dim(0);
  const std::size_t per = per_ref.size() / k_refs;
  AttributionMap map;
  map.trial_id = trial_id;
  map.values = Tensor(model_.input_shape());
  for (int k = 0; k < k_refs; ++k) {
    for (std::size_t j = 0; j < per; ++j) map.values[j] += per_ref[k * per + j];
  }
  for (double& v : map.values.values()) v /= k_refs;
  map.target = target_ == AttributionTarget::kProbability ? "stuttered" : "stuttered-logit";
  map.reference = references_.provenance + " x" + std::to_string(k_refs);
  return map;
}

int MsToFrame(double t_ms) {
  if (!(t_ms >= 0.0 && t_ms <= kTrialMs)) {
    throw ConfigError("time " + Num(t_ms) + " ms outside [0, 1500]");
  }
  return static_cast<int>(std::floor(t_ms * kNumFrames / kTrialMs));
}

double WindowMean(const AttributionMap& map, double t0_ms, double t1_ms, int au_id) {
  const int row = AURow(au_id);
  const int f0 = MsToFrame(t0_ms);
  const int f1 = MsToFrame(t1_ms);
  if (f1 <= f0) {
    throw ConfigError("window [" + Num(t0_ms) + ", " + Num(t1_ms) +
                      ") ms covers no frames");
  }
  double sum = 0.0;
  for (int f = f0; f < f1; ++f) sum += map.at(row, f);
  return sum / (f1 - f0);
}

AttributionMap PositivePart(AttributionMap map) {
  for (double& v : map.values.values()) v = std::max(0.0, v);
  return map;
}

std::string AttributionCsv(const AttributionMap& map) {
  if (map.values.size() != static_cast<std::size_t>(kTrialSize)) {
    throw ShapeError("attribution map " + map.values.ShapeString() + " is not 17x87");
  }
  std::string out = "au_id,frame,t_start_ms,attribution\n";
  for (int a = 0; a < kNumAUs; ++a) {
    const std::string au = std::to_string(AUCatalog()[a].id);
    for (int f = 0; f < kNumFrames; ++f) {
      out += au;
      out += ',';
      out += std::to_string(f);
      out += ',';
      out += Num(FrameStartMs(f));
      out += ',';
      out += Num(map.at(a, f));
      out += '\n';
    }
  }
  return out;
}

AttributionMap ParseAttributionCsv(const std::string& text, const std::string& trial_id) {
  AttributionMap map;
  map.trial_id = trial_id;
  map.values = Tensor({kNumAUs, kNumFrames});
  std::vector<char> seen(kTrialSize, 0);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line.rfind("au_id,frame,t_start_ms,attribution", 0) != 0) {
    throw DataError("attribution file for " + trial_id + " has an unexpected header");
  }
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    int au = 0, frame = 0;
    double t = 0.0, v = 0.0;
    const char* p = line.data();
    const char* end = p + line.size();
    auto field = [&](auto& out) {
      auto res = std::from_chars(p, end, out);
      if (res.ec != std::errc()) {
        throw DataError("attribution file for " + trial_id + ", line " +
                        std::to_string(line_no) + ": malformed number");
      }
      p = res.ptr;
      if (p < end && *p == ',') ++p;
    };
    field(au);
    field(frame);
    field(t);
    field(v);
    const int row = AURow(au);
    if (frame < 0 || frame >= kNumFrames) {
      throw DataError("attribution file for " + trial_id + ", line " +
                      std::to_string(line_no) + ": frame out of range");
    }
    map.values[row * kNumFrames + frame] = v;
    seen[row * kNumFrames + frame] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) != kTrialSize) {
    throw DataError("attribution file for " + trial_id + " does not cover all 1479 cells");
  }
  return map;
}

}  // namespace aucnn
