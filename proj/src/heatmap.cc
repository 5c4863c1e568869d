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

#include "aucnn/heatmap.h"

#include <algorithm>
#include <cmath>

#include "aucnn/errors.h"

namespace aucnn {

Rgb DivergingColor(double v) {
  const double s = std::clamp(std::abs(v), 0.0, 1.0);
  const auto fade = static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - s)));
  if (v > 0.0) return {255, fade, fade};
  if (v < 0.0) return {fade, fade, 255};
  return {};
}

Image RenderHeatmap(const AttributionMap& map, int cell) {
  if (cell < 1) throw ConfigError("heatmap cell size must be at least 1");
  if (map.values.size() != static_cast<std::size_t>(kTrialSize)) {
    throw ShapeError("attribution map " + map.values.ShapeString() + " is not 17x87");
  }
  double scale = 0.0;
  for (double v : map.values.values()) scale = std::max(scale, std::abs(v));

  Image image;
  image.width = kNumFrames * cell;
  image.height = kNumAUs * cell;
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double v = map.at(y / cell, x / cell);
      image.pixels[y * image.width + x] = DivergingColor(scale > 0.0 ? v / scale : 0.0);
    }
  }
  int upper = 0;
  for (const AUInfo& au : AUCatalog()) upper += au.region == Region::kUpper ? 1 : 0;
  const int separator = upper * cell;
  for (int x = 0; x < image.width; ++x) {
    image.pixels[separator * image.width + x] = {0, 0, 0};
  }
  return image;
}

std::string EncodePpm(const Image& image) {
  std::string out = "P6\n" + std::to_string(image.width) + " " +
                    std::to_string(image.height) + "\n255\n";
  out.reserve(out.size() + image.pixels.size() * 3);
  for (const Rgb& p : image.pixels) {
    out += static_cast<char>(p.r);
    out += static_cast<char>(p.g);
    out += static_cast<char>(p.b);
  }
  return out;
}

}  // namespace aucnn
