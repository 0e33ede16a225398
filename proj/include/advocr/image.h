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

#ifndef ADVOCR_IMAGE_H_
#define ADVOCR_IMAGE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "advocr/tensor.h"

namespace advocr {

// Row-major grayscale raster in model range: ink -1, background +1.
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, double fill = 1.0);
  Image(std::size_t height, std::size_t width, std::vector<double> pixels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  double& at(std::size_t row, std::size_t col) {
    return pixels_[row * width_ + col];
  }
  double at(std::size_t row, std::size_t col) const {
    return pixels_[row * width_ + col];
  }
  std::span<double> pixels() { return pixels_; }
  std::span<const double> pixels() const { return pixels_; }

  // [height, width] tensor sharing no storage with the image.
  Tensor ToTensor() const;
  static Image FromTensor(const Tensor& t);

  bool operator==(const Image& other) const = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> pixels_;
};

// Euclidean norm of the pixel difference. Throws ShapeError on mismatch.
double L2Distance(const Image& a, const Image& b);

}  // namespace advocr

#endif  // ADVOCR_IMAGE_H_
