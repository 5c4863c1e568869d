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

#include "aucnn/stats.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "aucnn/errors.h"

namespace aucnn {
namespace {

std::string Num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Continued fraction for I_x(a,b) by the modified Lentz method.
double BetaContinuedFraction(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

const char* RegionOf(int au_row) { return RegionName(AUCatalog()[au_row].region); }

}  // namespace

double RegularizedIncompleteBeta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ConfigError("beta parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  // The fraction converges quickly on this side of the mean.
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * BetaContinuedFraction(a, b, x) / a;
  }
  return 1.0 - front * BetaContinuedFraction(b, a, 1.0 - x) / b;
}

double FSurvival(double f, double d1, double d2) {
  if (!(d1 >= 1.0 && d2 >= 1.0)) throw ConfigError("degrees of freedom must be >= 1");
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  const double p = RegularizedIncompleteBeta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * f));
  return std::clamp(p, 0.0, 1.0);
}

AnovaTable AnovaOneway(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ConfigError("ANOVA needs at least 2 groups");
  std::size_t n = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.size() < 2) throw ConfigError("every ANOVA group needs at least 2 samples");
    n += g.size();
    grand += std::accumulate(g.begin(), g.end(), 0.0);
  }
  grand /= static_cast<double>(n);
  double ssb = 0.0, ssw = 0.0;
  for (const auto& g : groups) {
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / g.size();
    ssb += g.size() * (mean - grand) * (mean - grand);
    for (double v : g) ssw += (v - mean) * (v - mean);
  }
  AnovaTable t;
  t.df_between = static_cast<int>(groups.size()) - 1;
  t.df_within = static_cast<int>(n - groups.size());
  // Treat between-group spread at rounding level of the data as none.
  double scale = 0.0;
  for (const auto& g : groups) {
    for (double v : g) scale = std::max(scale, std::abs(v));
  }
  const double negligible = 1e-24 * std::max(1.0, scale * scale) * n;
  if (ssb <= negligible) ssb = 0.0;
  if (ssb == 0.0) {
    t.f = 0.0;
    t.p = 1.0;
    return t;
  }
  if (ssw == 0.0) {
    t.f = std::numeric_limits<double>::max();
    t.p = 0.0;
    return t;
  }
  t.f = (ssb / t.df_between) / (ssw / t.df_within);
  t.p = FSurvival(t.f, t.df_between, t.df_within);
  return t;
}

const char* FactorName(Factor factor) {
  switch (factor) {
    case Factor::kLabel: return "label";
    case Factor::kParadigm: return "paradigm";
    case Factor::kStutterBand: return "stutter-band";
    case Factor::kWindow: return "window";
  }
  return "?";
}

Factor FactorFromName(const std::string& name) {
  for (Factor f : {Factor::kLabel, Factor::kParadigm, Factor::kStutterBand, Factor::kWindow}) {
    if (name == FactorName(f)) return f;
  }
  throw ConfigError("unknown factor '" + name +
                    "' (expected label, paradigm, stutter-band or window)");
}

std::string TimeWindow::Name() const { return Num(t0_ms) + "-" + Num(t1_ms); }

const std::vector<TimeWindow>& DefaultWindows() {
  static const std::vector<TimeWindow> kWindows = {
      {0.0, 500.0}, {500.0, 800.0}, {1100.0, 1500.0}};
  return kWindows;
}

std::vector<TrialMetadata> MetadataFor(std::span<const AUTrial> trials) {
  const auto rates = SubjectStutterRates(trials);
  std::vector<TrialMetadata> out;
  out.reserve(trials.size());
  for (const AUTrial& t : trials) {
    out.push_back({t.trial_id, t.subject_id, t.paradigm, t.label, rates.at(t.subject_id)});
  }
  return out;
}

std::vector<AnovaRow> AttributionAnova(const std::vector<AttributionMap>& maps,
                                       const std::vector<TrialMetadata>& metadata,
                                       const GroupingSpec& spec) {
  if (!(spec.stutter_band_threshold > 0.0 && spec.stutter_band_threshold < 100.0)) {
    throw ConfigError("stutter band threshold must lie in (0,100)");
  }
  if (maps.empty()) throw DataError("no attribution maps");
  std::unordered_map<std::string, const TrialMetadata*> by_id;
  for (const TrialMetadata& m : metadata) by_id[m.trial_id] = &m;

  // Level index and name per map.
  std::vector<std::string> level_names;
  std::vector<int> level(maps.size());
  auto level_of = [&](const std::string& name) {
    auto it = std::find(level_names.begin(), level_names.end(), name);
    if (it != level_names.end()) return static_cast<int>(it - level_names.begin());
    level_names.push_back(name);
    return static_cast<int>(level_names.size()) - 1;
  };
  if (spec.factor == Factor::kLabel || spec.factor == Factor::kWindow) {
    level_of("fluent");
    level_of("stuttered");
  } else if (spec.factor == Factor::kParadigm) {
    level_of("CW");
    level_of("WG");
  } else {
    level_of("LSR");
    level_of("HSR");
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    auto it = by_id.find(maps[i].trial_id);
    if (it == by_id.end()) {
      throw DataError("no metadata for trial '" + maps[i].trial_id + "'");
    }
    const TrialMetadata& m = *it->second;
    switch (spec.factor) {
      case Factor::kLabel:
      case Factor::kWindow:
        level[i] = level_of(LabelName(m.label));
        break;
      case Factor::kParadigm:
        level[i] = level_of(ParadigmName(m.paradigm));
        break;
      case Factor::kStutterBand:
        level[i] = level_of(100.0 * m.subject_stutter_rate > spec.stutter_band_threshold
                                ? "HSR"
                                : "LSR");
        break;
    }
  }
  std::vector<int> level_count(level_names.size(), 0);
  for (int l : level) ++level_count[l];
  for (std::size_t l = 0; l < level_names.size(); ++l) {
    if (level_count[l] < 2) {
      throw DataError(std::string("factor ") + FactorName(spec.factor) + " level '" +
                      level_names[l] + "' has " + std::to_string(level_count[l]) +
                      " trials; at least 2 are needed");
    }
  }

  std::vector<int> rows;
  for (int a = 0; a < kNumAUs; ++a) {
    const AUInfo& au = AUCatalog()[a];
    const bool in_scope =
        spec.scope == AUScope::kAll ||
        (spec.scope == AUScope::kUpper && au.region == Region::kUpper) ||
        (spec.scope == AUScope::kLower && au.region == Region::kLower) ||
        (spec.scope == AUScope::kSingle && au.id == spec.au_id);
    if (in_scope) rows.push_back(a);
  }
  if (rows.empty()) throw ConfigError("AU scope selects no action units");

  std::vector<TimeWindow> windows = {TimeWindow{}};
  if (spec.factor == Factor::kWindow) windows = spec.windows;
  if (windows.empty()) throw ConfigError("no time windows");

  std::vector<AttributionMap> filtered;
  const std::vector<AttributionMap>* source = &maps;
  if (spec.positive_only) {
    for (const AttributionMap& m : maps) filtered.push_back(PositivePart(m));
    source = &filtered;
  }

  std::vector<AnovaRow> out;
  for (int a : rows) {
    for (const TimeWindow& w : windows) {
      std::vector<std::vector<double>> groups(level_names.size());
      for (std::size_t i = 0; i < source->size(); ++i) {
        groups[level[i]].push_back(
            WindowMean((*source)[i], w.t0_ms, w.t1_ms, AUCatalog()[a].id));
      }
      AnovaRow row;
      row.factor = FactorName(spec.factor);
      row.au_id = AUCatalog()[a].id;
      row.region = RegionOf(a);
      row.window = w.Name();
      row.table = AnovaOneway(groups);
      out.push_back(row);
    }
  }
  const double tests = static_cast<double>(out.size());
  for (AnovaRow& r : out) r.p_bonferroni = std::min(1.0, r.table.p * tests);
  std::stable_sort(out.begin(), out.end(), [](const AnovaRow& x, const AnovaRow& y) {
    return x.table.f > y.table.f;
  });
  return out;
}

std::string AnovaCsv(const std::vector<AnovaRow>& rows) {
  std::string out = "factor,au_id,region,window,F,df1,df2,p,p_bonferroni\n";
  for (const AnovaRow& r : rows) {
    out += r.factor + ',' + std::to_string(r.au_id) + ',' + r.region + ',' + r.window +
           ',' + Num(r.table.f) + ',' + std::to_string(r.table.df_between) + ',' +
           std::to_string(r.table.df_within) + ',' + Num(r.table.p) + ',' +
           Num(r.p_bonferroni) + '\n';
  }
  return out;
}

}  // namespace aucnn
