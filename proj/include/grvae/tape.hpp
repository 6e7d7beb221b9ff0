// Copyright 2026 The grvae Authors
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

#pragma once

// Reverse-mode automatic differentiation over dense tensors.
//
// A Tape records every operation as a node holding its value, its parents and
// a backward rule. Nodes are appended after their parents, so the record order
// is already a topological order and backward() is one reverse sweep. Values
// are immutable once recorded. A tape is not thread-safe; use one per thread.

#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <unordered_map>
#include <vector>

#include "grvae/tensor.hpp"

namespace grvae {

// Probabilities are clamped to this before taking logs.
inline constexpr double kLogClamp = 1e-10;

class Tape;

// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Gradients {
 public:
  // Gradient of the root with respect to a parameter leaf. Throws
  // std::out_of_range for vars that are not parameters of the tape.
  const Tensor& operator[](const Var& v) const;
  bool contains(const Var& v) const { return grads_.contains(v.id()); }

 private:
  friend class Tape;
  std::unordered_map<std::size_t, Tensor> grads_;
};

// Handed to backward rules. Adjoints are allocated lazily as zeros.
class BackwardContext {
 public:
  const Tensor& grad() const { return *grad_; }
  const Tensor& out() const;
  const Tensor& value(std::size_t id) const;
  bool wants(std::size_t id) const;
  Tensor& adjoint(std::size_t id);

 private:
  friend class Tape;
  BackwardContext(Tape& tape, std::vector<Tensor>& adj) : tape_(tape), adj_(adj) {}

  Tape& tape_;
  std::vector<Tensor>& adj_;
  const Tensor* grad_ = nullptr;
  std::size_t self_ = 0;
};

class Tape {
 public:
  using BackwardFn = std::function<void(BackwardContext&)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Tensor value);
  // Trainable leaf; backward() reports its gradient.
  Var parameter(Tensor value);

  // Records an operation result. The backward rule is dropped when no parent
  // needs a gradient.
  Var record(Tensor value, std::vector<std::size_t> parents, BackwardFn backward);

  // Gradient of a single-element root with respect to every parameter leaf.
  // Parameters not reachable from the root get zero gradients.
  Gradients backward(const Var& root);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    bool trainable = false;
  };

  std::deque<Node> nodes_;
};

// ---------------------------------------------------------------------------
// Primitive operations. Binary elementwise operations broadcast numpy-style
// (shapes aligned from the right, size-1 or missing axes repeat). Shape errors
// throw ShapeError naming the primitive and both shapes.

Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var add_scalar(const Var& a, double c);
Var mul_scalar(const Var& a, double c);
Var neg(const Var& a);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(const Var& a, const Var& b) { return mul(a, b); }
inline Var operator+(const Var& a, double c) { return add_scalar(a, c); }
inline Var operator+(double c, const Var& a) { return add_scalar(a, c); }
inline Var operator-(const Var& a, double c) { return add_scalar(a, -c); }
inline Var operator-(double c, const Var& a) { return add_scalar(neg(a), c); }
inline Var operator*(const Var& a, double c) { return mul_scalar(a, c); }
inline Var operator*(double c, const Var& a) { return mul_scalar(a, c); }
inline Var operator-(const Var& a) { return neg(a); }

// (..., m, k) x (k, n) -> (..., m, n), or batched (B..., m, k) x (B..., k, n).
Var matmul(const Var& a, const Var& b);
// Swaps the last two axes.
Var transpose(const Var& a);
Var reshape(const Var& a, Shape shape);

Var sum(const Var& a);
Var mean(const Var& a);
// Sums out the last axis: (..., n) -> (...). A rank-1 input yields a scalar.
Var sum_last(const Var& a);

Var exp(const Var& a);
// log(max(a, kLogClamp)); zero gradient where the clamp is active.
Var log(const Var& a);
// 1 / (1 + exp(-scale * (a - shift)))
Var sigmoid(const Var& a, double scale = 1.0, double shift = 0.0);
Var relu(const Var& a);
// max(a, 0): the penalty ramp. Same values as relu; kept separate for intent.
Var ramp(const Var& a);
Var square(const Var& a);
Var sqrt(const Var& a);
// Softmax over the last axis, max-subtracted.
Var softmax(const Var& a);

// out[p] = a[index[p]] for index[p] >= 0, else 0. index has shape_size(shape)
// entries; the backward rule scatter-adds.
Var gather(const Var& a, std::shared_ptr<const std::vector<std::ptrdiff_t>> index,
           Shape shape);

}  // namespace grvae
