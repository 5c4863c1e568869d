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

#include "aucnn/tensor.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "aucnn/errors.h"

namespace aucnn {

std::size_t ShapeSize(const std::vector<int>& shape) {
  std::size_t n = 1;
  for (int d : shape) {
    if (d <= 0) {
      throw ShapeError("non-positive dimension in shape " +
                       ShapeToString(shape));
    }
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::string ShapeToString(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(std::vector<int> shape, double fill)
    : shape_(std::move(shape)), data_(ShapeSize(shape_), fill) {}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != ShapeSize(shape_)) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match shape " + ShapeToString(shape_));
  }
}

Tensor Tensor::Reshaped(std::vector<int> shape) const {
  Tensor out = *this;
  out.Reshape(std::move(shape));
  return out;
}

void Tensor::Reshape(std::vector<int> shape) {
  if (ShapeSize(shape) != data_.size()) {
    throw ShapeError("cannot reshape " + ShapeString() + " to " +
                     ShapeToString(shape));
  }
  shape_ = std::move(shape);
}

void Tensor::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::ShapeString() const { return ShapeToString(shape_); }

Tensor Tensor::Slice(int index) const {
  if (rank() < 1 || index < 0 || index >= shape_[0]) {
    throw ShapeError("slice index " + std::to_string(index) +
                     " out of range for " + ShapeString());
  }
  std::vector<int> sub(shape_.begin() + 1, shape_.end());
  if (sub.empty()) sub.push_back(1);
  const std::size_t stride = data_.size() / shape_[0];
  std::vector<double> values(data_.begin() + index * stride,
                             data_.begin() + (index + 1) * stride);
  return Tensor(std::move(sub), std::move(values));
}

}  // namespace aucnn
