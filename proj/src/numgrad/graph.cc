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

#include "advocr/graph.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "advocr/error.h"

namespace advocr {
namespace {

double SigmoidOf(double v) { return 1.0 / (1.0 + std::exp(-v)); }

void RequireRank(std::string_view op, const Tensor& t, std::size_t rank,
                 const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op), std::string(what) + " must have rank " +
                                          std::to_string(rank) + ", got " +
                                          ShapeToString(t.shape()));
  }
}

void RequireSameShape(std::string_view op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op), "operand shapes differ: " +
                                          ShapeToString(a.shape()) + " vs " +
                                          ShapeToString(b.shape()));
  }
}

// Splits a shape around `axis` into (outer, mid, inner) extents.
struct AxisSplit {
  std::size_t outer = 1, mid = 1, inner = 1;
};

AxisSplit SplitAt(const Shape& shape, std::size_t axis) {
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.mid = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

}  // namespace

std::string_view OpName(OpKind kind) {
  switch (kind) {
    case OpKind::kLeaf: return "leaf";
    case OpKind::kConstant: return "constant";
    case OpKind::kAffine: return "affine";
    case OpKind::kConv2d3x3: return "conv2d_3x3";
    case OpKind::kMaxPool3x3Stride3: return "maxpool_3x3_stride3";
    case OpKind::kTanh: return "tanh";
    case OpKind::kSigmoid: return "sigmoid";
    case OpKind::kMul: return "elementwise_mul";
    case OpKind::kAdd: return "elementwise_add";
    case OpKind::kSub: return "elementwise_sub";
    case OpKind::kScale: return "scale";
    case OpKind::kShift: return "shift";
    case OpKind::kSoftmaxRows: return "softmax_rows";
    case OpKind::kLogSoftmaxRows: return "log_softmax_rows";
    case OpKind::kLstmStep: return "lstm_step";
    case OpKind::kConcat: return "concat";
    case OpKind::kSlice: return "slice";
    case OpKind::kReshape: return "reshape";
    case OpKind::kSum: return "sum";
    case OpKind::kSumSquares: return "sum_squares";
    case OpKind::kCustom: return "custom";
  }
  return "unknown";
}

const Tensor& Gradients::of(Node leaf) const {
  auto it = grads_.find(leaf.id);
  if (it == grads_.end()) {
    throw InvalidArgument("node " + std::to_string(leaf.id) +
                          " is not a differentiable leaf");
  }
  return it->second;
}

Node Graph::Push(Record record) {
  if (record.kind != OpKind::kLeaf && record.kind != OpKind::kConstant) {
    for (std::size_t in : record.inputs) {
      if (nodes_[in].requires_grad) {
        record.requires_grad = true;
        break;
      }
    }
  }
  nodes_.push_back(std::move(record));
  return Node{nodes_.size() - 1};
}

Node Graph::Leaf(Tensor value) {
  Record r{.kind = OpKind::kLeaf, .value = std::move(value)};
  r.requires_grad = true;
  return Push(std::move(r));
}

Node Graph::Constant(Tensor value) {
  return Push(Record{.kind = OpKind::kConstant, .value = std::move(value)});
}

Node Graph::Affine(Node x, Node w, Node b) {
  const Tensor& xv = value(x);
  const Tensor& wv = value(w);
  const Tensor& bv = value(b);
  RequireRank("affine", xv, 2, "input");
  RequireRank("affine", wv, 2, "weight");
  const std::size_t n = xv.dim(0), in = xv.dim(1), out = wv.dim(0);
  if (wv.dim(1) != in || bv.size() != out) {
    throw ShapeError("affine", "input " + ShapeToString(xv.shape()) +
                                   ", weight " + ShapeToString(wv.shape()) +
                                   ", bias " + ShapeToString(bv.shape()));
  }
  Tensor y({n, out});
  const double* xp = xv.data().data();
  const double* wp = wv.data().data();
  for (std::size_t r = 0; r < n; ++r) {
    const double* xr = xp + r * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double* wr = wp + o * in;
      double acc = bv[o];
      for (std::size_t i = 0; i < in; ++i) acc += xr[i] * wr[i];
      y[r * out + o] = acc;
    }
  }
  return Push(Record{.kind = OpKind::kAffine,
                     .inputs = {x.id, w.id, b.id},
                     .value = std::move(y)});
}

Node Graph::Conv2d3x3(Node x, Node kernel, Node bias) {
  const Tensor& xv = value(x);
  const Tensor& kv = value(kernel);
  const Tensor& bv = value(bias);
  RequireRank("conv2d_3x3", xv, 3, "input");
  RequireRank("conv2d_3x3", kv, 4, "kernel");
  const std::size_t h = xv.dim(0), w = xv.dim(1), ci = xv.dim(2);
  if (kv.dim(0) != 3 || kv.dim(1) != 3 || kv.dim(2) != ci) {
    throw ShapeError("conv2d_3x3",
                     "kernel " + ShapeToString(kv.shape()) +
                         " does not match input " + ShapeToString(xv.shape()));
  }
  const std::size_t co = kv.dim(3);
  if (bv.size() != co) {
    throw ShapeError("conv2d_3x3", "bias " + ShapeToString(bv.shape()) +
                                       " does not match " +
                                       std::to_string(co) + " channels");
  }
  Tensor y({h, w, co});
  const double* xp = xv.data().data();
  const double* kp = kv.data().data();
  double* yp = y.data().data();
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double* out = yp + (r * w + c) * co;
      for (std::size_t o = 0; o < co; ++o) out[o] = bv[o];
      for (std::size_t dy = 0; dy < 3; ++dy) {
        const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r + dy) - 1;
        if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(h)) continue;
        for (std::size_t dx = 0; dx < 3; ++dx) {
          const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c + dx) - 1;
          if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(w)) continue;
          const double* in = xp + (rr * w + cc) * ci;
          const double* k = kp + (dy * 3 + dx) * ci * co;
          for (std::size_t i = 0; i < ci; ++i) {
            const double v = in[i];
            const double* kr = k + i * co;
            for (std::size_t o = 0; o < co; ++o) out[o] += v * kr[o];
          }
        }
      }
    }
  }
  return Push(Record{.kind = OpKind::kConv2d3x3,
                     .inputs = {x.id, kernel.id, bias.id},
                     .value = std::move(y)});
}

Node Graph::MaxPool3x3Stride3(Node x) {
  const Tensor& xv = value(x);
  RequireRank("maxpool_3x3_stride3", xv, 3, "input");
  const std::size_t h = xv.dim(0), w = xv.dim(1), ch = xv.dim(2);
  if (h < 3 || w < 3) {
    throw ShapeError("maxpool_3x3_stride3",
                     "input " + ShapeToString(xv.shape()) +
                         " is smaller than the 3x3 window");
  }
  const std::size_t oh = h / 3, ow = w / 3;
  Tensor y({oh, ow, ch});
  std::vector<std::size_t> argmax(y.size());
  for (std::size_t r = 0; r < oh; ++r) {
    for (std::size_t c = 0; c < ow; ++c) {
      for (std::size_t k = 0; k < ch; ++k) {
        std::size_t best = ((3 * r) * w + 3 * c) * ch + k;
        double best_v = xv[best];
        for (std::size_t dy = 0; dy < 3; ++dy) {
          for (std::size_t dx = 0; dx < 3; ++dx) {
            const std::size_t idx = ((3 * r + dy) * w + 3 * c + dx) * ch + k;
            if (xv[idx] > best_v) {
              best_v = xv[idx];
              best = idx;
            }
          }
        }
        const std::size_t o = (r * ow + c) * ch + k;
        y[o] = best_v;
        argmax[o] = best;
      }
    }
  }
  return Push(Record{.kind = OpKind::kMaxPool3x3Stride3,
                     .inputs = {x.id},
                     .value = std::move(y),
                     .indices = std::move(argmax)});
}

Node Graph::Tanh(Node x) {
  Tensor y = value(x);
  for (double& v : y.data()) v = std::tanh(v);
  return Push(
      Record{.kind = OpKind::kTanh, .inputs = {x.id}, .value = std::move(y)});
}

Node Graph::Sigmoid(Node x) {
  Tensor y = value(x);
  for (double& v : y.data()) v = SigmoidOf(v);
  return Push(Record{
      .kind = OpKind::kSigmoid, .inputs = {x.id}, .value = std::move(y)});
}

Node Graph::Mul(Node a, Node b) {
  RequireSameShape("elementwise_mul", value(a), value(b));
  Tensor y = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return Push(Record{
      .kind = OpKind::kMul, .inputs = {a.id, b.id}, .value = std::move(y)});
}

Node Graph::Add(Node a, Node b) {
  RequireSameShape("elementwise_add", value(a), value(b));
  Tensor y = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return Push(Record{
      .kind = OpKind::kAdd, .inputs = {a.id, b.id}, .value = std::move(y)});
}

Node Graph::Sub(Node a, Node b) {
  RequireSameShape("elementwise_sub", value(a), value(b));
  Tensor y = value(a);
  const Tensor& bv = value(b);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  return Push(Record{
      .kind = OpKind::kSub, .inputs = {a.id, b.id}, .value = std::move(y)});
}

Node Graph::Scale(Node x, double factor) {
  Tensor y = value(x);
  for (double& v : y.data()) v *= factor;
  return Push(Record{.kind = OpKind::kScale,
                     .inputs = {x.id},
                     .value = std::move(y),
                     .scalar = factor});
}

Node Graph::Shift(Node x, double offset) {
  Tensor y = value(x);
  for (double& v : y.data()) v += offset;
  return Push(Record{.kind = OpKind::kShift,
                     .inputs = {x.id},
                     .value = std::move(y),
                     .scalar = offset});
}

Node Graph::SoftmaxRows(Node x) {
  const Tensor& xv = value(x);
  RequireRank("softmax_rows", xv, 2, "input");
  const std::size_t rows = xv.dim(0), cols = xv.dim(1);
  Tensor y({rows, cols});
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data().data() + r * cols;
    double* out = y.data().data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      out[c] = std::exp(in[c] - mx);
      total += out[c];
    }
    for (std::size_t c = 0; c < cols; ++c) out[c] /= total;
  }
  return Push(Record{
      .kind = OpKind::kSoftmaxRows, .inputs = {x.id}, .value = std::move(y)});
}

Node Graph::LogSoftmaxRows(Node x) {
  const Tensor& xv = value(x);
  RequireRank("log_softmax_rows", xv, 2, "input");
  const std::size_t rows = xv.dim(0), cols = xv.dim(1);
  Tensor y({rows, cols});
  std::vector<double> probs(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* in = xv.data().data() + r * cols;
    double* out = y.data().data() + r * cols;
    const double mx = *std::max_element(in, in + cols);
    double total = 0.0;
    for (std::size_t c = 0; c < cols; ++c) total += std::exp(in[c] - mx);
    const double lse = mx + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) {
      out[c] = in[c] - lse;
      probs[r * cols + c] = std::exp(out[c]);
    }
  }
  return Push(Record{.kind = OpKind::kLogSoftmaxRows,
                     .inputs = {x.id},
                     .value = std::move(y),
                     .saved = std::move(probs)});
}

Node Graph::LstmStep(Node x, Node h, Node c, Node w, Node bias) {
  const Tensor& xv = value(x);
  const Tensor& hv = value(h);
  const Tensor& cv = value(c);
  const Tensor& wv = value(w);
  const Tensor& bv = value(bias);
  RequireRank("lstm_step", xv, 2, "input");
  RequireRank("lstm_step", hv, 2, "hidden state");
  RequireRank("lstm_step", wv, 2, "weight");
  const std::size_t batch = xv.dim(0), in = xv.dim(1), hid = hv.dim(1);
  if (hv.dim(0) != batch || cv.shape() != hv.shape() ||
      wv.dim(0) != 4 * hid || wv.dim(1) != in + hid || bv.size() != 4 * hid) {
    throw ShapeError("lstm_step", "x " + ShapeToString(xv.shape()) + ", h " +
                                      ShapeToString(hv.shape()) + ", c " +
                                      ShapeToString(cv.shape()) + ", w " +
                                      ShapeToString(wv.shape()) + ", b " +
                                      ShapeToString(bv.shape()));
  }
  const std::size_t stride = in + hid;
  // saved: activated gates [batch, 4*hid] followed by tanh(c') [batch, hid].
  std::vector<double> saved(batch * 5 * hid);
  Tensor y({batch, 2 * hid});
  const double* wp = wv.data().data();
  for (std::size_t n = 0; n < batch; ++n) {
    const double* xr = xv.data().data() + n * in;
    const double* hr = hv.data().data() + n * hid;
    double* gates = saved.data() + n * 4 * hid;
    for (std::size_t g = 0; g < 4 * hid; ++g) {
      const double* wr = wp + g * stride;
      double acc = bv[g];
      for (std::size_t i = 0; i < in; ++i) acc += wr[i] * xr[i];
      const double* wh = wr + in;
      for (std::size_t j = 0; j < hid; ++j) acc += wh[j] * hr[j];
      gates[g] = acc;
    }
    double* tanh_c = saved.data() + batch * 4 * hid + n * hid;
    for (std::size_t j = 0; j < hid; ++j) {
      const double ig = SigmoidOf(gates[j]);
      const double fg = SigmoidOf(gates[hid + j]);
      const double og = SigmoidOf(gates[2 * hid + j]);
      const double cg = std::tanh(gates[3 * hid + j]);
      gates[j] = ig;
      gates[hid + j] = fg;
      gates[2 * hid + j] = og;
      gates[3 * hid + j] = cg;
      const double c_new = fg * cv[n * hid + j] + ig * cg;
      tanh_c[j] = std::tanh(c_new);
      y[n * 2 * hid + j] = og * tanh_c[j];
      y[n * 2 * hid + hid + j] = c_new;
    }
  }
  return Push(Record{.kind = OpKind::kLstmStep,
                     .inputs = {x.id, h.id, c.id, w.id, bias.id},
                     .value = std::move(y),
                     .saved = std::move(saved)});
}

Node Graph::Concat(std::span<const Node> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat", "no inputs");
  const Shape& first = value(parts[0]).shape();
  if (axis >= first.size()) {
    throw ShapeError("concat", "axis " + std::to_string(axis) +
                                   " out of range for " +
                                   ShapeToString(first));
  }
  Shape out_shape = first;
  out_shape[axis] = 0;
  std::vector<std::size_t> ids;
  for (Node p : parts) {
    const Shape& s = value(p).shape();
    bool ok = s.size() == first.size();
    for (std::size_t d = 0; ok && d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) ok = false;
    }
    if (!ok) {
      throw ShapeError("concat", "part " + ShapeToString(s) +
                                     " incompatible with " +
                                     ShapeToString(first) + " along axis " +
                                     std::to_string(axis));
    }
    out_shape[axis] += s[axis];
    ids.push_back(p.id);
  }
  Tensor y(out_shape);
  const AxisSplit os = SplitAt(out_shape, axis);
  std::size_t offset = 0;
  for (Node p : parts) {
    const Tensor& v = value(p);
    const AxisSplit ps = SplitAt(v.shape(), axis);
    for (std::size_t o = 0; o < ps.outer; ++o) {
      std::copy_n(v.data().data() + o * ps.mid * ps.inner, ps.mid * ps.inner,
                  y.data().data() + (o * os.mid + offset) * os.inner);
    }
    offset += ps.mid;
  }
  return Push(Record{.kind = OpKind::kConcat,
                     .inputs = std::move(ids),
                     .value = std::move(y),
                     .axis = axis});
}

Node Graph::Slice(Node x, std::size_t axis, std::size_t begin,
                  std::size_t end) {
  const Tensor& xv = value(x);
  if (axis >= xv.rank() || begin >= end || end > xv.dim(axis)) {
    throw ShapeError("slice", "range [" + std::to_string(begin) + ", " +
                                  std::to_string(end) + ") on axis " +
                                  std::to_string(axis) + " of " +
                                  ShapeToString(xv.shape()));
  }
  Shape out_shape = xv.shape();
  out_shape[axis] = end - begin;
  Tensor y(out_shape);
  const AxisSplit xs = SplitAt(xv.shape(), axis);
  const std::size_t len = (end - begin) * xs.inner;
  for (std::size_t o = 0; o < xs.outer; ++o) {
    std::copy_n(xv.data().data() + (o * xs.mid + begin) * xs.inner, len,
                y.data().data() + o * len);
  }
  return Push(Record{.kind = OpKind::kSlice,
                     .inputs = {x.id},
                     .value = std::move(y),
                     .axis = axis,
                     .begin = begin});
}

Node Graph::Reshape(Node x, Shape shape) {
  return Push(Record{.kind = OpKind::kReshape,
                     .inputs = {x.id},
                     .value = value(x).Reshaped(std::move(shape))});
}

Node Graph::Sum(Node x) {
  double total = 0.0;
  for (double v : value(x).data()) total += v;
  return Push(Record{.kind = OpKind::kSum,
                     .inputs = {x.id},
                     .value = Tensor::Scalar(total)});
}

Node Graph::SumSquares(Node x) {
  double total = 0.0;
  for (double v : value(x).data()) total += v * v;
  return Push(Record{.kind = OpKind::kSumSquares,
                     .inputs = {x.id},
                     .value = Tensor::Scalar(total)});
}

Node Graph::Custom(std::span<const Node> inputs, Tensor value,
                   CustomBackward backward) {
  std::vector<std::size_t> ids;
  for (Node n : inputs) ids.push_back(n.id);
  return Push(Record{.kind = OpKind::kCustom,
                     .inputs = std::move(ids),
                     .value = std::move(value),
                     .custom = std::move(backward)});
}

Gradients Graph::Backward(Node output) const {
  const Tensor& out = value(output);
  if (out.size() != 1) {
    throw ShapeError("backward", "output must be a scalar, got shape " +
                                     ShapeToString(out.shape()));
  }
  std::vector<Tensor> grads(output.id + 1);
  if (at(output).requires_grad) grads[output.id] = Tensor(out.shape(), 1.0);
  Gradients result;
  std::vector<Tensor*> in_grads;
  for (std::size_t i = output.id + 1; i-- > 0;) {
    const Record& r = nodes_[i];
    if (r.kind == OpKind::kLeaf) {
      result.grads_[i] =
          grads[i].empty() ? Tensor(r.value.shape()) : std::move(grads[i]);
      continue;
    }
    if (!r.requires_grad || grads[i].empty()) continue;
    in_grads.assign(r.inputs.size(), nullptr);
    for (std::size_t k = 0; k < r.inputs.size(); ++k) {
      const std::size_t in = r.inputs[k];
      if (!nodes_[in].requires_grad) continue;
      if (grads[in].empty()) grads[in] = Tensor(nodes_[in].value.shape());
      in_grads[k] = &grads[in];
    }
    BackwardNode(r, grads[i], in_grads);
    grads[i] = Tensor();
  }
  for (std::size_t i = output.id + 1; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == OpKind::kLeaf) {
      result.grads_[i] = Tensor(nodes_[i].value.shape());
    }
  }
  return result;
}

void Graph::BackwardNode(const Record& r, const Tensor& g,
                         std::span<Tensor* const> in_grads) const {
  auto input = [&](std::size_t k) -> const Tensor& {
    return nodes_[r.inputs[k]].value;
  };
  switch (r.kind) {
    case OpKind::kLeaf:
    case OpKind::kConstant:
      return;
    case OpKind::kAffine: {
      const Tensor& x = input(0);
      const Tensor& w = input(1);
      const std::size_t n = x.dim(0), in = x.dim(1), out = w.dim(0);
      const double* gp = g.data().data();
      if (Tensor* dx = in_grads[0]) {
        for (std::size_t row = 0; row < n; ++row) {
          double* dxr = dx->data().data() + row * in;
          for (std::size_t o = 0; o < out; ++o) {
            const double go = gp[row * out + o];
            if (go == 0.0) continue;
            const double* wr = w.data().data() + o * in;
            for (std::size_t i = 0; i < in; ++i) dxr[i] += go * wr[i];
          }
        }
      }
      if (Tensor* dw = in_grads[1]) {
        for (std::size_t row = 0; row < n; ++row) {
          const double* xr = x.data().data() + row * in;
          for (std::size_t o = 0; o < out; ++o) {
            const double go = gp[row * out + o];
            double* dwr = dw->data().data() + o * in;
            for (std::size_t i = 0; i < in; ++i) dwr[i] += go * xr[i];
          }
        }
      }
      if (Tensor* db = in_grads[2]) {
        for (std::size_t row = 0; row < n; ++row) {
          for (std::size_t o = 0; o < out; ++o) (*db)[o] += gp[row * out + o];
        }
      }
      return;
    }
    case OpKind::kConv2d3x3: {
      const Tensor& x = input(0);
      const Tensor& k = input(1);
      const std::size_t h = x.dim(0), w = x.dim(1), ci = x.dim(2),
                        co = k.dim(3);
      Tensor* dx = in_grads[0];
      Tensor* dk = in_grads[1];
      for (std::size_t r0 = 0; r0 < h; ++r0) {
        for (std::size_t c0 = 0; c0 < w; ++c0) {
          const double* go = g.data().data() + (r0 * w + c0) * co;
          if (Tensor* db = in_grads[2]) {
            for (std::size_t o = 0; o < co; ++o) (*db)[o] += go[o];
          }
          for (std::size_t dy = 0; dy < 3; ++dy) {
            const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r0 + dy) - 1;
            if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(h)) continue;
            for (std::size_t dxo = 0; dxo < 3; ++dxo) {
              const std::ptrdiff_t cc =
                  static_cast<std::ptrdiff_t>(c0 + dxo) - 1;
              if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(w)) continue;
              const std::size_t in_off = (rr * w + cc) * ci;
              const std::size_t k_off = (dy * 3 + dxo) * ci * co;
              for (std::size_t i = 0; i < ci; ++i) {
                const double* kr = k.data().data() + k_off + i * co;
                if (dx) {
                  double acc = 0.0;
                  for (std::size_t o = 0; o < co; ++o) acc += go[o] * kr[o];
                  (*dx)[in_off + i] += acc;
                }
                if (dk) {
                  const double v = x[in_off + i];
                  double* dkr = dk->data().data() + k_off + i * co;
                  for (std::size_t o = 0; o < co; ++o) dkr[o] += v * go[o];
                }
              }
            }
          }
        }
      }
      return;
    }
    case OpKind::kMaxPool3x3Stride3: {
      Tensor& dx = *in_grads[0];
      for (std::size_t o = 0; o < g.size(); ++o) dx[r.indices[o]] += g[o];
      return;
    }
    case OpKind::kTanh: {
      Tensor& dx = *in_grads[0];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = r.value[i];
        dx[i] += g[i] * (1.0 - y * y);
      }
      return;
    }
    case OpKind::kSigmoid: {
      Tensor& dx = *in_grads[0];
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double y = r.value[i];
        dx[i] += g[i] * y * (1.0 - y);
      }
      return;
    }
    case OpKind::kMul: {
      const Tensor& a = input(0);
      const Tensor& b = input(1);
      if (Tensor* da = in_grads[0]) {
        for (std::size_t i = 0; i < g.size(); ++i) (*da)[i] += g[i] * b[i];
      }
      if (Tensor* db = in_grads[1]) {
        for (std::size_t i = 0; i < g.size(); ++i) (*db)[i] += g[i] * a[i];
      }
      return;
    }
    case OpKind::kAdd:
    case OpKind::kSub: {
      const double sign = r.kind == OpKind::kAdd ? 1.0 : -1.0;
      if (Tensor* da = in_grads[0]) {
        for (std::size_t i = 0; i < g.size(); ++i) (*da)[i] += g[i];
      }
      if (Tensor* db = in_grads[1]) {
        for (std::size_t i = 0; i < g.size(); ++i) (*db)[i] += sign * g[i];
      }
      return;
    }
    case OpKind::kScale: {
      Tensor& dx = *in_grads[0];
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i] * r.scalar;
      return;
    }
    case OpKind::kShift:
    case OpKind::kReshape: {
      Tensor& dx = *in_grads[0];
      for (std::size_t i = 0; i < g.size(); ++i) dx[i] += g[i];
      return;
    }
    case OpKind::kSoftmaxRows: {
      Tensor& dx = *in_grads[0];
      const std::size_t rows = r.value.dim(0), cols = r.value.dim(1);
      for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t off = row * cols;
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
          dot += g[off + c] * r.value[off + c];
        }
        for (std::size_t c = 0; c < cols; ++c) {
          dx[off + c] += r.value[off + c] * (g[off + c] - dot);
        }
      }
      return;
    }
    case OpKind::kLogSoftmaxRows: {
      Tensor& dx = *in_grads[0];
      const std::size_t rows = r.value.dim(0), cols = r.value.dim(1);
      for (std::size_t row = 0; row < rows; ++row) {
        const std::size_t off = row * cols;
        double total = 0.0;
        for (std::size_t c = 0; c < cols; ++c) total += g[off + c];
        for (std::size_t c = 0; c < cols; ++c) {
          dx[off + c] += g[off + c] - r.saved[off + c] * total;
        }
      }
      return;
    }
    case OpKind::kLstmStep: {
      const Tensor& x = input(0);
      const Tensor& h = input(1);
      const Tensor& c = input(2);
      const Tensor& w = input(3);
      const std::size_t batch = x.dim(0), in = x.dim(1), hid = h.dim(1);
      const std::size_t stride = in + hid;
      std::vector<double> dz(4 * hid);
      for (std::size_t n = 0; n < batch; ++n) {
        const double* gates = r.saved.data() + n * 4 * hid;
        const double* tanh_c = r.saved.data() + batch * 4 * hid + n * hid;
        const double* gh = g.data().data() + n * 2 * hid;
        const double* gc = gh + hid;
        for (std::size_t j = 0; j < hid; ++j) {
          const double ig = gates[j], fg = gates[hid + j],
                       og = gates[2 * hid + j], cg = gates[3 * hid + j];
          const double tc = tanh_c[j];
          const double dc = gc[j] + gh[j] * og * (1.0 - tc * tc);
          const double d_o = gh[j] * tc;
          const double d_i = dc * cg;
          const double d_g = dc * ig;
          const double d_f = dc * c[n * hid + j];
          if (Tensor* dc_prev = in_grads[2]) (*dc_prev)[n * hid + j] += dc * fg;
          dz[j] = d_i * ig * (1.0 - ig);
          dz[hid + j] = d_f * fg * (1.0 - fg);
          dz[2 * hid + j] = d_o * og * (1.0 - og);
          dz[3 * hid + j] = d_g * (1.0 - cg * cg);
        }
        const double* xr = x.data().data() + n * in;
        const double* hr = h.data().data() + n * hid;
        for (std::size_t q = 0; q < 4 * hid; ++q) {
          const double d = dz[q];
          if (d == 0.0) continue;
          const double* wr = w.data().data() + q * stride;
          if (Tensor* dx = in_grads[0]) {
            double* dxr = dx->data().data() + n * in;
            for (std::size_t i = 0; i < in; ++i) dxr[i] += d * wr[i];
          }
          if (Tensor* dh = in_grads[1]) {
            double* dhr = dh->data().data() + n * hid;
            for (std::size_t j = 0; j < hid; ++j) dhr[j] += d * wr[in + j];
          }
          if (Tensor* dw = in_grads[3]) {
            double* dwr = dw->data().data() + q * stride;
            for (std::size_t i = 0; i < in; ++i) dwr[i] += d * xr[i];
            for (std::size_t j = 0; j < hid; ++j) dwr[in + j] += d * hr[j];
          }
          if (Tensor* db = in_grads[4]) (*db)[q] += d;
        }
      }
      return;
    }
    case OpKind::kConcat: {
      const AxisSplit os = SplitAt(r.value.shape(), r.axis);
      std::size_t offset = 0;
      for (std::size_t k = 0; k < r.inputs.size(); ++k) {
        const AxisSplit ps = SplitAt(input(k).shape(), r.axis);
        if (Tensor* dp = in_grads[k]) {
          for (std::size_t o = 0; o < ps.outer; ++o) {
            const double* src =
                g.data().data() + (o * os.mid + offset) * os.inner;
            double* dst = dp->data().data() + o * ps.mid * ps.inner;
            for (std::size_t i = 0; i < ps.mid * ps.inner; ++i) {
              dst[i] += src[i];
            }
          }
        }
        offset += ps.mid;
      }
      return;
    }
    case OpKind::kSlice: {
      Tensor& dx = *in_grads[0];
      const AxisSplit xs = SplitAt(input(0).shape(), r.axis);
      const std::size_t len = r.value.dim(r.axis) * xs.inner;
      for (std::size_t o = 0; o < xs.outer; ++o) {
        double* dst = dx.data().data() + (o * xs.mid + r.begin) * xs.inner;
        const double* src = g.data().data() + o * len;
        for (std::size_t i = 0; i < len; ++i) dst[i] += src[i];
      }
      return;
    }
    case OpKind::kSum: {
      Tensor& dx = *in_grads[0];
      for (double& v : dx.data()) v += g[0];
      return;
    }
    case OpKind::kSumSquares: {
      Tensor& dx = *in_grads[0];
      const Tensor& x = input(0);
      for (std::size_t i = 0; i < x.size(); ++i) dx[i] += 2.0 * x[i] * g[0];
      return;
    }
    case OpKind::kCustom:
      r.custom(g, in_grads);
      return;
  }
}

}  // namespace advocr
