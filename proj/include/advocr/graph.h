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

#ifndef ADVOCR_GRAPH_H_
#define ADVOCR_GRAPH_H_

#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "advocr/tensor.h"

namespace advocr {

enum class OpKind {
  kLeaf,
  kConstant,
  kAffine,
  kConv2d3x3,
  kMaxPool3x3Stride3,
  kTanh,
  kSigmoid,
  kMul,
  kAdd,
  kSub,
  kScale,
  kShift,
  kSoftmaxRows,
  kLogSoftmaxRows,
  kLstmStep,
  kConcat,
  kSlice,
  kReshape,
  kSum,
  kSumSquares,
  kCustom,
};

std::string_view OpName(OpKind kind);

// Handle to a node of a Graph. Only meaningful for the graph that issued it.
struct Node {
  std::size_t id = 0;
};

// Accumulates into the gradient buffers of a custom node's inputs. A null
// pointer marks an input that does not need a gradient.
using CustomBackward = std::function<void(
    const Tensor& output_grad, std::span<Tensor* const> input_grads)>;

// Gradients of a scalar output with respect to every differentiable leaf.
class Gradients {
 public:
  const Tensor& of(Node leaf) const;
  bool has(Node leaf) const { return grads_.count(leaf.id) != 0; }

 private:
  friend class Graph;
  std::map<std::size_t, Tensor> grads_;
};

// Tape of eagerly evaluated operations supporting reverse-mode
// differentiation. Nodes are appended in topological order and never
// modified after creation.
class Graph {
 public:
  Graph() = default;

  // A differentiable input (parameter or pixel tensor).
  Node Leaf(Tensor value);
  // An input that never receives a gradient.
  Node Constant(Tensor value);

  // x [n, in] times w^T [in, out] plus b [out] -> [n, out].
  Node Affine(Node x, Node w, Node b);
  // x [h, w, c_in], kernel [3, 3, c_in, c_out], bias [c_out] -> [h, w, c_out].
  // Zero padding of one pixel keeps the spatial extent.
  Node Conv2d3x3(Node x, Node kernel, Node bias);
  // x [h, w, c] -> [h/3, w/3, c]; trailing rows/columns are dropped.
  Node MaxPool3x3Stride3(Node x);
  Node Tanh(Node x);
  Node Sigmoid(Node x);
  Node Mul(Node a, Node b);
  Node Add(Node a, Node b);
  Node Sub(Node a, Node b);
  Node Scale(Node x, double factor);
  Node Shift(Node x, double offset);
  // Row-wise (last axis) softmax of a rank-2 tensor.
  Node SoftmaxRows(Node x);
  Node LogSoftmaxRows(Node x);
  // One LSTM cell step for a batch of b sequences.
  //   x [b, in], h [b, hidden], c [b, hidden],
  //   w [4*hidden, in + hidden] (gate order: input, forget, output, cell),
  //   bias [4*hidden]  ->  [b, 2*hidden] holding (h', c') side by side.
  Node LstmStep(Node x, Node h, Node c, Node w, Node bias);
  Node Concat(std::span<const Node> parts, std::size_t axis);
  Node Slice(Node x, std::size_t axis, std::size_t begin, std::size_t end);
  Node Reshape(Node x, Shape shape);
  Node Sum(Node x);
  Node SumSquares(Node x);
  // Escape hatch for operations defined outside this library (CTC loss,
  // resampling). `backward` must accumulate, not overwrite.
  Node Custom(std::span<const Node> inputs, Tensor value,
              CustomBackward backward);

  const Tensor& value(Node n) const { return nodes_.at(n.id).value; }
  OpKind kind(Node n) const { return nodes_.at(n.id).kind; }
  bool requires_grad(Node n) const { return nodes_.at(n.id).requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse pass from a one-element output. Throws ShapeError otherwise.
  Gradients Backward(Node output) const;

 private:
  struct Record {
    OpKind kind = OpKind::kConstant;
    std::vector<std::size_t> inputs = {};
    Tensor value = {};
    bool requires_grad = false;
    // Op-specific saved state.
    std::vector<double> saved = {};
    std::vector<std::size_t> indices = {};
    double scalar = 0.0;
    std::size_t axis = 0;
    std::size_t begin = 0;
    CustomBackward custom = {};
  };

  Node Push(Record record);
  const Record& at(Node n) const { return nodes_.at(n.id); }
  void BackwardNode(const Record& r, const Tensor& grad,
                    std::span<Tensor* const> in_grads) const;

  std::deque<Record> nodes_;  // stable references across appends
};

}  // namespace advocr

#endif  // ADVOCR_GRAPH_H_
