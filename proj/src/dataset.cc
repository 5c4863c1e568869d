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

#include "aucnn/dataset.h"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

constexpr const char* kMetaColumns[] = {"trial_id", "subject_id", "session_id",
                                        "paradigm", "label",      "frame"};
constexpr int kNumMetaColumns = 6;

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

std::string Location(int line, int column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace

const char* LabelName(Label label) {
  return label == Label::kStuttered ? "stuttered" : "fluent";
}

Label LabelFromName(const std::string& name) {
  if (name == "fluent") return Label::kFluent;
  if (name == "stuttered") return Label::kStuttered;
  throw DataError("unknown label '" + name + "'");
}

const char* ParadigmName(Paradigm paradigm) {
  return paradigm == Paradigm::kCW ? "CW" : "WG";
}

Paradigm ParadigmFromName(const std::string& name) {
  if (name == "CW") return Paradigm::kCW;
  if (name == "WG") return Paradigm::kWG;
  throw DataError("unknown paradigm '" + name + "'");
}

const char* RegionName(Region region) {
  return region == Region::kUpper ? "upper" : "lower";
}

const std::array<AUInfo, kNumAUs>& AUCatalog() {
  static const std::array<AUInfo, kNumAUs> kCatalog = {{
      {1, Region::kUpper, "inner brow raiser", "au01"},
      {2, Region::kUpper, "outer brow raiser", "au02"},
      {4, Region::kUpper, "brow lowerer", "au04"},
      {5, Region::kUpper, "upper lid raiser", "au05"},
      {6, Region::kUpper, "cheek raiser", "au06"},
      {7, Region::kUpper, "lid tightener", "au07"},
      {9, Region::kUpper, "nose wrinkler", "au09"},
      {45, Region::kUpper, "blink", "au45"},
      {10, Region::kLower, "upper lip raiser", "au10"},
      {12, Region::kLower, "lip corner puller", "au12"},
      {14, Region::kLower, "dimpler", "au14"},
      {15, Region::kLower, "lip corner depressor", "au15"},
      {17, Region::kLower, "chin raiser", "au17"},
      {20, Region::kLower, "lip stretcher", "au20"},
      {23, Region::kLower, "lip tightener", "au23"},
      {25, Region::kLower, "lips part", "au25"},
      {26, Region::kLower, "jaw drop", "au26"},
  }};
  return kCatalog;
}

int AURow(int au_id) {
  const auto& catalog = AUCatalog();
  for (int i = 0; i < kNumAUs; ++i) {
    if (catalog[i].id == au_id) return i;
  }
  throw ConfigError("AU " + std::to_string(au_id) + " is not in the catalog");
}

void SaveDatasetCsv(const std::string& path, std::span<const AUTrial> trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  std::string line;
  for (int i = 0; i < kNumMetaColumns; ++i) {
    if (i > 0) line += ',';
    line += kMetaColumns[i];
  }
  for (const AUInfo& au : AUCatalog()) {
    line += ',';
    line += au.column;
  }
  out << line << '\n';
  char buf[64];
  for (const AUTrial& t : trials) {
    if (t.matrix.size() != static_cast<std::size_t>(kTrialSize)) {
      throw DataError("trial " + t.trial_id + " has a malformed matrix");
    }
    const std::string prefix = t.trial_id + ',' + t.subject_id + ',' +
                               t.session_id + ',' + ParadigmName(t.paradigm) +
                               ',' + LabelName(t.label) + ',';
    for (int f = 0; f < kNumFrames; ++f) {
      line = prefix;
      line += std::to_string(f);
      for (int a = 0; a < kNumAUs; ++a) {
        auto res = std::to_chars(buf, buf + sizeof(buf), t.at(a, f));
        line += ',';
        line.append(buf, res.ptr);
      }
      out << line << '\n';
    }
  }
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<AUTrial> LoadDatasetCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    const auto header = SplitCsvLine(line);
    const int expected = kNumMetaColumns + kNumAUs;
    if (static_cast<int>(header.size()) != expected) {
      throw DataError("header has " + std::to_string(header.size()) +
                      " columns, expected " + std::to_string(expected) +
                      " (wrong AU count?)");
    }
    for (int i = 0; i < expected; ++i) {
      const std::string want =
          i < kNumMetaColumns ? kMetaColumns[i] : AUCatalog()[i - kNumMetaColumns].column;
      if (header[i] != want) {
        throw DataError("header column " + std::to_string(i + 1) + " is '" +
                        std::string(header[i]) + "', expected '" + want + "'");
      }
    }
  }

  std::vector<AUTrial> trials;
  std::vector<std::vector<bool>> seen;
  std::unordered_map<std::string, std::size_t> index;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = SplitCsvLine(line);
    if (static_cast<int>(fields.size()) != kNumMetaColumns + kNumAUs) {
      throw DataError(Location(line_no, static_cast<int>(fields.size())) +
                      ": expected " + std::to_string(kNumMetaColumns + kNumAUs) +
                      " fields, found " + std::to_string(fields.size()));
    }
    const std::string trial_id(fields[0]);
    auto [it, inserted] = index.emplace(trial_id, trials.size());
    if (inserted) {
      AUTrial t;
      t.trial_id = trial_id;
      t.subject_id = std::string(fields[1]);
      t.session_id = std::string(fields[2]);
      try {
        t.paradigm = ParadigmFromName(std::string(fields[3]));
      } catch (const DataError& e) {
        throw DataError(Location(line_no, 4) + ": " + e.what());
      }
      try {
        t.label = LabelFromName(std::string(fields[4]));
      } catch (const DataError& e) {
        throw DataError(Location(line_no, 5) + ": " + e.what());
      }
      trials.push_back(std::move(t));
      seen.emplace_back(kNumFrames, false);
    }
    AUTrial& t = trials[it->second];
    if (std::string_view(ParadigmName(t.paradigm)) != fields[3] ||
        std::string_view(LabelName(t.label)) != fields[4]) {
      throw DataError(Location(line_no, 4) + ": trial " + trial_id +
                      " changes paradigm or label between frames");
    }
    int frame = -1;
    {
      auto res = std::from_chars(fields[5].data(), fields[5].data() + fields[5].size(), frame);
      if (res.ec != std::errc() || res.ptr != fields[5].data() + fields[5].size()) {
        throw DataError(Location(line_no, 6) + ": frame '" + std::string(fields[5]) +
                        "' is not an integer");
      }
    }
    if (frame < 0 || frame >= kNumFrames) {
      throw DataError(Location(line_no, 6) + ": frame " + std::to_string(frame) +
                      " of trial " + trial_id + " outside [0," +
                      std::to_string(kNumFrames) + ")");
    }
    if (seen[it->second][frame]) {
      throw DataError(Location(line_no, 6) + ": trial " + trial_id +
                      " repeats frame " + std::to_string(frame));
    }
    seen[it->second][frame] = true;
    for (int a = 0; a < kNumAUs; ++a) {
      const std::string_view cell = fields[kNumMetaColumns + a];
      double v = 0.0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() ||
          !std::isfinite(v)) {
        throw DataError(Location(line_no, kNumMetaColumns + a + 1) +
                        ": non-numeric value '" + std::string(cell) + "'");
      }
      t.at(a, frame) = v;
    }
  }
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const int count = static_cast<int>(std::count(seen[i].begin(), seen[i].end(), true));
    if (count != kNumFrames) {
      throw DataError("trial " + trials[i].trial_id + " has " +
                      std::to_string(count) + " frames, expected " +
                      std::to_string(kNumFrames));
    }
  }
  return trials;
}

NormalizationManifest FitNormalization(std::span<const AUTrial> trials) {
  if (trials.empty()) throw DataError("cannot fit normalization on no trials");
  NormalizationManifest m;
  m.min.fill(std::numeric_limits<double>::infinity());
  m.max.fill(-std::numeric_limits<double>::infinity());
  for (const AUTrial& t : trials) {
    for (int a = 0; a < kNumAUs; ++a) {
      for (int f = 0; f < kNumFrames; ++f) {
        m.min[a] = std::min(m.min[a], t.at(a, f));
        m.max[a] = std::max(m.max[a], t.at(a, f));
      }
    }
  }
  for (int a = 0; a < kNumAUs; ++a) {
    if (!(m.max[a] > m.min[a])) {
      throw DataError(std::string("AU ") + std::to_string(AUCatalog()[a].id) +
                      " (" + AUCatalog()[a].column +
                      ") is constant in the training split");
    }
  }
  return m;
}

std::vector<AUTrial> ApplyNormalization(std::vector<AUTrial> trials,
                                        const NormalizationManifest& manifest) {
  for (AUTrial& t : trials) {
    for (int a = 0; a < kNumAUs; ++a) {
      const double lo = manifest.min[a];
      const double range = manifest.max[a] - lo;
      for (int f = 0; f < kNumFrames; ++f) {
        t.at(a, f) = std::clamp((t.at(a, f) - lo) / range, 0.0, 1.0);
      }
    }
  }
  return trials;
}

Tensor StackTrials(std::span<const AUTrial> trials) {
  std::vector<double> data;
  data.reserve(trials.size() * kTrialSize);
  for (const AUTrial& t : trials) data.insert(data.end(), t.matrix.begin(), t.matrix.end());
  return Tensor({static_cast<int>(trials.size()), kNumAUs, kNumFrames}, std::move(data));
}

Tensor StackTrials(std::span<const AUTrial> trials, std::span<const int> indices) {
  std::vector<double> data;
  data.reserve(indices.size() * kTrialSize);
  for (int i : indices) {
    const auto& m = trials[i].matrix;
    data.insert(data.end(), m.begin(), m.end());
  }
  return Tensor({static_cast<int>(indices.size()), kNumAUs, kNumFrames}, std::move(data));
}

std::vector<int> LabelsOf(std::span<const AUTrial> trials) {
  std::vector<int> labels;
  labels.reserve(trials.size());
  for (const AUTrial& t : trials) labels.push_back(static_cast<int>(t.label));
  return labels;
}

std::map<std::string, double> SubjectStutterRates(std::span<const AUTrial> trials) {
  std::map<std::string, std::pair<int, int>> counts;
  for (const AUTrial& t : trials) {
    auto& c = counts[t.subject_id];
    c.first += t.label == Label::kStuttered ? 1 : 0;
    c.second += 1;
  }
  std::map<std::string, double> rates;
  for (const auto& [subject, c] : counts) {
    rates[subject] = static_cast<double>(c.first) / c.second;
  }
  return rates;
}

std::string DatasetFingerprint(std::span<const AUTrial> trials) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_bytes = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const AUTrial& t : trials) {
    mix_bytes(t.trial_id.data(), t.trial_id.size());
    const int label = static_cast<int>(t.label);
    const int paradigm = static_cast<int>(t.paradigm);
    mix_bytes(&label, sizeof(label));
    mix_bytes(&paradigm, sizeof(paradigm));
    for (double v : t.matrix) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      mix_bytes(&bits, sizeof(bits));
    }
  }
  std::ostringstream s;
  s << std::hex << h;
  return s.str();
}

}  // namespace aucnn
