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

#include "advocr/adam.h"

#include <cmath>

#include "advocr/error.h"

namespace advocr {

Adam::Adam(std::size_t size, AdamOptions options)
    : options_(options), m_(size, 0.0), v_(size, 0.0) {
  if (!(options_.learning_rate > 0.0)) {
    throw InvalidArgument("Adam learning rate must be positive");
  }
  if (!(options_.beta1 > 0.0 && options_.beta1 < 1.0 &&
        options_.beta2 > 0.0 && options_.beta2 < 1.0)) {
    throw InvalidArgument("Adam betas must lie in (0, 1)");
  }
}

void Adam::Step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw ShapeError("adam", "expected " + std::to_string(m_.size()) +
                                 " parameters, got " +
                                 std::to_string(params.size()) + " / " +
                                 std::to_string(grad.size()));
  }
  ++steps_;
  const double b1 = options_.beta1, b2 = options_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = b1 * m_[i] + (1.0 - b1) * grad[i];
    v_[i] = b2 * v_[i] + (1.0 - b2) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= options_.learning_rate * m_hat / (std::sqrt(v_hat) + options_.epsilon);
  }
}

}  // namespace advocr
