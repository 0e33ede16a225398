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

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "advocr/adam.h"
#include "advocr/error.h"
#include "advocr/recognizer.h"
#include "advocr/resample.h"

namespace advocr {

namespace {

Image BoxBlur(const Image& in) {
  Image out(in.height(), in.width());
  const auto h = static_cast<long>(in.height()), w = static_cast<long>(in.width());
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      double acc = 0.0;
      int n = 0;
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dx = -1; dx <= 1; ++dx) {
          const long yy = y + dy, xx = x + dx;
          if (yy < 0 || xx < 0 || yy >= h || xx >= w) continue;
          acc += in.at(yy, xx);
          ++n;
        }
      }
      out.at(y, x) = acc / n;
    }
  }
  return out;
}

bool BlankColumn(const Image& img, std::size_t col) {
  for (std::size_t r = 0; r < img.height(); ++r) {
    if (img.at(r, col) < 0.99) return false;
  }
  return true;
}

// Adds (`delta` > 0) or trims blank columns on the left or right.
Image Repad(const Image& img, long left, long right) {
  std::size_t lo = 0, hi = img.width();
  while (left < 0 && lo + 3 < hi && BlankColumn(img, lo)) ++lo, ++left;
  while (right < 0 && hi > lo + 3 && BlankColumn(img, hi - 1)) --hi, ++right;
  const std::size_t add_l = left > 0 ? static_cast<std::size_t>(left) : 0;
  const std::size_t add_r = right > 0 ? static_cast<std::size_t>(right) : 0;
  Image out(img.height(), add_l + (hi - lo) + add_r);
  for (std::size_t r = 0; r < img.height(); ++r) {
    for (std::size_t c = lo; c < hi; ++c) out.at(r, add_l + c - lo) = img.at(r, c);
  }
  return out;
}

void Augment(TrainSample& s, const ModelConfig& mc, const TrainConfig& cfg,
             std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (cfg.pad_jitter > 0) {
    const auto j = static_cast<long>(cfg.pad_jitter);
    std::uniform_int_distribution<long> d(-j, j);
    const long left = d(rng), right = d(rng);
    Image padded = Repad(s.image, left, right);
    if (mc.Timesteps(padded.width()) >= MinTimesteps(s.target)) {
      s.image = std::move(padded);
    }
  }
  if (cfg.width_jitter > 0.0) {
    const double f = 1.0 - cfg.width_jitter + 2.0 * cfg.width_jitter * unit(rng);
    const auto w = static_cast<std::size_t>(std::lround(s.image.width() * f));
    if (w >= 3 && w != s.image.width() &&
        mc.Timesteps(w) >= MinTimesteps(s.target)) {
      s.image = ResampleMap(s.image.height(), s.image.width(),
                            s.image.height(), w)
                    .Apply(s.image);
    }
  }
  if (cfg.degrade_prob > 0.0 && unit(rng) < cfg.degrade_prob) {
    const double mix = unit(rng);
    const double contrast = 0.4 + 0.6 * unit(rng);
    const Image blurred = BoxBlur(s.image);
    for (std::size_t i = 0; i < s.image.size(); ++i) {
      double& v = s.image.pixels()[i];
      v = contrast * ((1.0 - mix) * v + mix * blurred.pixels()[i]);
    }
  }
}

TrainSample MakeOutlier(const Image& like, const TrainConfig& cfg,
                        std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TrainSample out{.image = like, .target = {}, .outlier = true};
  if (unit(rng) < 0.5) {
    for (double& v : out.image.pixels()) v = 2.0 * unit(rng) - 1.0;
    return out;
  }
  std::normal_distribution<double> noise(0.0, 1.0);
  const double sigma =
      cfg.outlier_min_std + (cfg.outlier_max_std - cfg.outlier_min_std) * unit(rng);
  for (double& v : out.image.pixels()) {
    v = std::clamp(v + sigma * noise(rng), -1.0, 1.0);
  }
  return out;
}

}  // namespace

BatchGradient ComputeBatchGradient(const ModelParams& params,
                                   std::span<const TrainSample> batch) {
  BatchGradient out;
  for (const auto& [name, t] : params.tensors()) out.grads[name] = Tensor(t.shape());
  double total = 0.0;
  for (const TrainSample& sample : batch) {
    Graph g;
    const Node img = g.Constant(sample.image.ToTensor());
    const ForwardNodes fwd = BuildForward(g, params, img, /*trainable=*/true);
    Node loss;
    if (sample.outlier) {
      // Cross-entropy against the uniform distribution.
      const Shape& sh = g.value(fwd.log_probs).shape();
      const double cells = static_cast<double>(sh[0] * sh[1]);
      loss = g.Scale(g.Sum(fwd.log_probs), -1.0 / cells);
    } else {
      loss = AddCtcLoss(g, fwd.log_probs, sample.target);
    }
    total += g.value(loss).item();
    const Gradients grads = g.Backward(loss);
    for (auto& [name, acc] : out.grads) {
      const Tensor& gr = grads.of(fwd.params.at(name));
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += gr[i];
    }
    ++out.used;
  }
  if (out.used > 0) {
    const double inv = 1.0 / static_cast<double>(out.used);
    out.mean_loss = total * inv;
    for (auto& [name, acc] : out.grads) {
      for (double& v : acc.data()) v *= inv;
    }
  }
  return out;
}

TrainResult Train(ModelParams params, std::span<const TrainSample> dataset,
                  const TrainConfig& config) {
  if (!(config.learning_rate > 0.0)) {
    throw InvalidArgument("learning rate must be positive");
  }
  if (config.batch_size == 0) throw InvalidArgument("batch size must be >= 1");
  if (!(config.width_jitter >= 0.0 && config.width_jitter < 1.0)) {
    throw InvalidArgument("width jitter must lie in [0, 1)");
  }
  if (!(config.outlier_rate >= 0.0 && config.outlier_rate <= 1.0) ||
      !(config.outlier_min_std >= 0.0 &&
        config.outlier_min_std <= config.outlier_max_std)) {
    throw InvalidArgument("outlier rate must lie in [0, 1] with 0 <= min std "
                          "<= max std");
  }
  const ModelConfig& mc = params.config();

  TrainResult result{.params = params, .loss_history = {}};
  std::vector<TrainSample> usable;
  for (const TrainSample& s : dataset) {
    Image img = s.image.height() == mc.input_height
                    ? s.image
                    : NormalizeLine(s.image, mc.input_height);
    const std::size_t need = MinTimesteps(s.target);
    const std::size_t have = mc.Timesteps(img.width());
    if (need > have || have == 0) {
      std::cerr << "warning: skipping training sample (target needs " << need
                << " timesteps, image has " << have << ")\n";
      ++result.skipped;
      continue;
    }
    usable.push_back({std::move(img), s.target});
  }
  if (usable.empty()) {
    throw InvalidArgument("no feasible training samples");
  }

  const AdamOptions adam_opts{config.learning_rate, config.beta1, config.beta2,
                              config.epsilon};
  std::map<std::string, Adam> optimizers;
  for (const auto& [name, t] : result.params.tensors()) {
    optimizers.emplace(name, Adam(t.size(), adam_opts));
  }

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> order(usable.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TrainSample> batch;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) {
        TrainSample s = usable[order[i]];
        Augment(s, mc, config, rng);
        if (config.noise_augment_std > 0.0) {
          for (double& v : s.image.pixels()) {
            v = std::clamp(v + config.noise_augment_std * noise(rng), -1.0, 1.0);
          }
        }
        if (config.outlier_rate > 0.0 && unit(rng) < config.outlier_rate) {
          batch.push_back(MakeOutlier(s.image, config, rng));
        }
        batch.push_back(std::move(s));
      }
      BatchGradient bg = ComputeBatchGradient(result.params, batch);
      if (config.max_grad_norm > 0.0) {
        double sq = 0.0;
        for (const auto& [name, g] : bg.grads) {
          for (double v : g.data()) sq += v * v;
        }
        const double norm = std::sqrt(sq);
        if (norm > config.max_grad_norm) {
          const double s = config.max_grad_norm / norm;
          for (auto& [name, g] : bg.grads) {
            for (double& v : g.data()) v *= s;
          }
        }
      }
      for (auto& [name, t] : result.params.mutable_tensors()) {
        optimizers.at(name).Step(t.data(), bg.grads.at(name).data());
      }
      epoch_total += bg.mean_loss;
      ++batches;
      ++result.steps;
    }
    const double mean = epoch_total / static_cast<double>(batches);
    result.loss_history.push_back(mean);
    if (config.on_epoch) config.on_epoch(epoch, mean);
  }
  return result;
}

}  // namespace advocr
