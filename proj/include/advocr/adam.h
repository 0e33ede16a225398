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

#ifndef ADVOCR_ADAM_H_
#define ADVOCR_ADAM_H_

#include <cstddef>
#include <span>
#include <vector>

namespace advocr {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam over one flat parameter vector with bias-corrected moments.
class Adam {
 public:
  Adam(std::size_t size, AdamOptions options);

  // Moves `params` against `grad`. Both must have the constructor's size.
  void Step(std::span<double> params, std::span<const double> grad);

  std::size_t steps() const { return steps_; }
  const AdamOptions& options() const { return options_; }

 private:
  AdamOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t steps_ = 0;
};

}  // namespace advocr

#endif  // ADVOCR_ADAM_H_
