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

#include "advocr/gradcheck.h"

#include <algorithm>
#include <cmath>

#include "advocr/error.h"

namespace advocr {

double RelativeError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(1e-8, std::abs(analytic) + std::abs(numeric));
}

GradCheckReport FiniteDiffCheck(const std::function<double(const Tensor&)>& f,
                                const Tensor& at, const Tensor& analytic,
                                double step, std::size_t max_coords) {
  if (!(step > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  if (analytic.shape() != at.shape()) {
    throw ShapeError("finite_diff_check",
                     "gradient " + ShapeToString(analytic.shape()) +
                         " vs point " + ShapeToString(at.shape()));
  }
  GradCheckReport report;
  const std::size_t n =
      max_coords == 0 ? at.size() : std::min(max_coords, at.size());
  Tensor probe = at;
  for (std::size_t i = 0; i < n; ++i) {
    const double orig = probe[i];
    probe[i] = orig + step;
    const double up = f(probe);
    probe[i] = orig - step;
    const double down = f(probe);
    probe[i] = orig;
    const double numeric = (up - down) / (2.0 * step);
    const double err = RelativeError(analytic[i], numeric);
    if (i == 0 || err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = i;
      report.worst_analytic = analytic[i];
      report.worst_numeric = numeric;
    }
    ++report.checked;
  }
  return report;
}

GradCheckReport FiniteDiffCheck(const GraphBuilder& build, const Tensor& at,
                                double step, std::size_t max_coords) {
  Graph g;
  const Node leaf = g.Leaf(at);
  const Node out = build(g, leaf);
  const Tensor analytic = g.Backward(out).of(leaf);
  auto f = [&build](const Tensor& x) {
    Graph probe;
    const Node l = probe.Leaf(x);
    return probe.value(build(probe, l)).item();
  };
  return FiniteDiffCheck(f, at, analytic, step, max_coords);
}

}  // namespace advocr
