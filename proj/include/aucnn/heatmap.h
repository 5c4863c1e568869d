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

#ifndef AUCNN_HEATMAP_H_
#define AUCNN_HEATMAP_H_

#include <cstdint>
#include <string>
#include <vector>

#include "aucnn/explainer.h"

namespace aucnn {

struct Rgb {
  std::uint8_t r = 255, g = 255, b = 255;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// Blue-white-red diverging colour for v in [-1, 1].
Rgb DivergingColor(double v);

struct Image {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;  // row-major

  const Rgb& at(int x, int y) const { return pixels[y * width + x]; }
};

// AU rows top to bottom in catalog order, frames left to right, each cell
// `cell` pixels square. The scale is symmetric around zero and anchored at
// the map's largest |value|. A black line is drawn along the first pixel row
// of the lower-face block.
Image RenderHeatmap(const AttributionMap& map, int cell);

// Binary PPM (P6).
std::string EncodePpm(const Image& image);

}  // namespace aucnn

#endif  // AUCNN_HEATMAP_H_
