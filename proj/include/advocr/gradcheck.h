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

#ifndef ADVOCR_GRADCHECK_H_
#define ADVOCR_GRADCHECK_H_

#include <cstddef>
#include <functional>

#include "advocr/graph.h"
#include "advocr/tensor.h"

namespace advocr {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Relative disagreement between an analytic and a numeric derivative:
// |a - n| / max(1e-8, |a| + |n|).
double RelativeError(double analytic, double numeric);

// Builds a scalar-valued graph from a leaf value. The builder receives the
// graph and the leaf node and returns the scalar output node.
using GraphBuilder = std::function<Node(Graph&, Node)>;

// Compares the reverse-mode gradient of `build` at `at` with central finite
// differences of the given step. Only the first `max_coords` coordinates are
// probed when it is nonzero.
GradCheckReport FiniteDiffCheck(const GraphBuilder& build, const Tensor& at,
                                double step, std::size_t max_coords = 0);

// Same comparison for an arbitrary scalar function with a known gradient.
GradCheckReport FiniteDiffCheck(const std::function<double(const Tensor&)>& f,
                                const Tensor& at, const Tensor& analytic,
                                double step, std::size_t max_coords = 0);

}  // namespace advocr

#endif  // ADVOCR_GRADCHECK_H_
