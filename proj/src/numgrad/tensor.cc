// Copyright 2026 The advocr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advocr/tensor.h"

#include <numeric>
#include <utility>

#include "advocr/error.h"

namespace advocr {

std::string ShapeToString(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

std::size_t ShapeSize(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

namespace {

void CheckExtents(const Shape& shape) {
  if (shape.empty()) throw ShapeError("tensor", "rank must be at least 1");
  for (std::size_t d : shape) {
    if (d == 0) {
      throw ShapeError("tensor",
                       "extents must be positive, got " + ShapeToString(shape));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  CheckExtents(shape_);
  values_.assign(ShapeSize(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(std::move(shape)), values_(std::move(values)) {
  CheckExtents(shape_);
  if (ShapeSize(shape_) != values_.size()) {
    throw ShapeError("tensor", "shape " + ShapeToString(shape_) + " needs " +
                                   std::to_string(ShapeSize(shape_)) +
                                   " values, got " +
                                   std::to_string(values_.size()));
  }
}

double Tensor::item() const {
  if (values_.size() != 1) {
    throw ShapeError("item", "expected one element, shape is " +
                                 ShapeToString(shape_));
  }
  return values_[0];
}

Tensor Tensor::Reshaped(Shape shape) const {
  if (ShapeSize(shape) != values_.size()) {
    throw ShapeError("reshape", "cannot view " + ShapeToString(shape_) +
                                    " as " + ShapeToString(shape));
  }
  return Tensor(std::move(shape), values_);
}

}  // namespace advocr
