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

#include "advocr/resample.h"

#include <algorithm>
#include <cmath>

#include "advocr/error.h"

namespace advocr {
namespace {

struct Axis {
  std::size_t lo, hi;
  double frac;
};

Axis SourceCoordinate(std::size_t dst, std::size_t src_len, std::size_t dst_len) {
  const double scale = static_cast<double>(src_len) / static_cast<double>(dst_len);
  double s = (static_cast<double>(dst) + 0.5) * scale - 0.5;
  s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
  const auto lo = static_cast<std::size_t>(std::floor(s));
  const std::size_t hi = std::min(lo + 1, src_len - 1);
  return {lo, hi, s - static_cast<double>(lo)};
}

}  // namespace

ResampleMap::ResampleMap(std::size_t src_height, std::size_t src_width,
                         std::size_t dst_height, std::size_t dst_width)
    : src_h_(src_height), src_w_(src_width), dst_h_(dst_height),
      dst_w_(dst_width) {
  if (src_h_ == 0 || src_w_ == 0 || dst_h_ == 0 || dst_w_ == 0) {
    throw ShapeError("resample", "extents must be positive");
  }
  auto taps = std::make_shared<std::vector<Tap>>();
  taps->reserve(4 * dst_h_ * dst_w_);
  std::vector<Axis> cols(dst_w_);
  for (std::size_t c = 0; c < dst_w_; ++c) cols[c] = SourceCoordinate(c, src_w_, dst_w_);
  for (std::size_t r = 0; r < dst_h_; ++r) {
    const Axis y = SourceCoordinate(r, src_h_, dst_h_);
    for (std::size_t c = 0; c < dst_w_; ++c) {
      const Axis& x = cols[c];
      auto idx = [&](std::size_t rr, std::size_t cc) {
        return static_cast<std::uint32_t>(rr * src_w_ + cc);
      };
      taps->push_back({idx(y.lo, x.lo), (1 - y.frac) * (1 - x.frac)});
      taps->push_back({idx(y.lo, x.hi), (1 - y.frac) * x.frac});
      taps->push_back({idx(y.hi, x.lo), y.frac * (1 - x.frac)});
      taps->push_back({idx(y.hi, x.hi), y.frac * x.frac});
    }
  }
  taps_ = std::move(taps);
}

Image ResampleMap::Apply(const Image& src) const {
  if (src.height() != src_h_ || src.width() != src_w_) {
    throw ShapeError("resample", "expected " + std::to_string(src_h_) + "x" +
                                     std::to_string(src_w_) + " source, got " +
                                     std::to_string(src.height()) + "x" +
                                     std::to_string(src.width()));
  }
  Image out(dst_h_, dst_w_);
  const auto& taps = *taps_;
  for (std::size_t i = 0; i < dst_h_ * dst_w_; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      acc += taps[4 * i + k].weight * src.pixels()[taps[4 * i + k].index];
    }
    out.pixels()[i] = acc;
  }
  return out;
}

Node ResampleMap::Apply(Graph& g, Node src) const {
  const Tensor& in = g.value(src);
  if (in.shape() != Shape{src_h_, src_w_}) {
    throw ShapeError("resample", "expected [" + std::to_string(src_h_) + ", " +
                                     std::to_string(src_w_) + "] source, got " +
                                     ShapeToString(in.shape()));
  }
  Tensor out({dst_h_, dst_w_});
  const auto& taps = *taps_;
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      acc += taps[4 * i + k].weight * in[taps[4 * i + k].index];
    }
    out[i] = acc;
  }
  auto shared = taps_;
  const Node inputs[] = {src};
  return g.Custom(inputs, std::move(out),
                  [shared](const Tensor& grad, std::span<Tensor* const> in_grads) {
                    Tensor* dx = in_grads[0];
                    if (!dx) return;
                    const auto& t = *shared;
                    for (std::size_t i = 0; i < grad.size(); ++i) {
                      for (std::size_t k = 0; k < 4; ++k) {
                        (*dx)[t[4 * i + k].index] += t[4 * i + k].weight * grad[i];
                      }
                    }
                  });
}

std::size_t ScaledWidth(std::size_t src_height, std::size_t src_width,
                        std::size_t height) {
  const double w = std::round(static_cast<double>(src_width) *
                              static_cast<double>(height) /
                              static_cast<double>(src_height));
  return std::max<std::size_t>(1, static_cast<std::size_t>(w));
}

Image RescaleImage(const Image& image, double factor) {
  if (!(factor > 0.0)) throw InvalidArgument("rescale factor must be positive");
  const auto h = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(image.height() * factor)));
  const auto w = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::round(image.width() * factor)));
  return ResampleMap(image.height(), image.width(), h, w).Apply(image);
}

}  // namespace advocr
