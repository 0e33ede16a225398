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

#ifndef ADVOCR_RESAMPLE_H_
#define ADVOCR_RESAMPLE_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "advocr/graph.h"
#include "advocr/image.h"

namespace advocr {

// Bilinear resampling expressed as a sparse linear map (four taps per output
// pixel, half-pixel centers, edge clamping). Being linear, it is reused both
// for normalization and inside differentiable attack graphs.
class ResampleMap {
 public:
  ResampleMap(std::size_t src_height, std::size_t src_width,
              std::size_t dst_height, std::size_t dst_width);

  std::size_t src_height() const { return src_h_; }
  std::size_t src_width() const { return src_w_; }
  std::size_t dst_height() const { return dst_h_; }
  std::size_t dst_width() const { return dst_w_; }

  Image Apply(const Image& src) const;
  // Differentiable application to a [src_h, src_w] node.
  Node Apply(Graph& g, Node src) const;

 private:
  struct Tap {
    std::uint32_t index;
    double weight;
  };
  std::size_t src_h_, src_w_, dst_h_, dst_w_;
  std::shared_ptr<const std::vector<Tap>> taps_;  // 4 per destination pixel
};

// Width after scaling an image to `height` rows with its aspect preserved.
std::size_t ScaledWidth(std::size_t src_height, std::size_t src_width,
                        std::size_t height);

// Bilinear rescale of the whole image by `factor` in both axes.
Image RescaleImage(const Image& image, double factor);

}  // namespace advocr

#endif  // ADVOCR_RESAMPLE_H_
