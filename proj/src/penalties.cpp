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

#include "grvae/penalties.hpp"

#include <algorithm>

#include "grvae/errors.hpp"

namespace grvae {
namespace {

Tensor identity(std::size_t n) {
  Tensor t({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 1.0;
  return t;
}

Tensor off_diagonal(std::size_t n) {
  Tensor t({n, n}, 1.0);
  for (std::size_t i = 0; i < n; ++i) t[i * n + i] = 0.0;
  return t;
}

Tensor strict_upper(std::size_t n) {
  Tensor t({n, n}, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) t[i * n + j] = 1.0;
  return t;
}

// Channel c of the last axis: (..., C) -> (...).
Var channel(const Var& x, std::size_t c) {
  const Shape& s = x.shape();
  const std::size_t cn = s.back();
  const std::size_t rows = shape_size(s) / cn;
  auto idx = std::make_shared<std::vector<std::ptrdiff_t>>(rows);
  for (std::size_t r = 0; r < rows; ++r) (*idx)[r] = static_cast<std::ptrdiff_t>(r * cn + c);
  return gather(x, idx, Shape(s.begin(), s.end() - 1));
}

void check_batch(const ProbGraphVar& m) {
  const Shape& fs = m.nodes.shape();
  const Shape& es = m.edges.shape();
  if (fs.size() != 3 || es.size() != 4 || es[0] != fs[0] || es[1] != fs[1] || es[2] != fs[1])
    throw ShapeError("penalty: expected nodes (B,N,1+d) and edges (B,N,N,1+t), got " +
                     shape_str(fs) + " and " + shape_str(es));
}

// Ramp, keep entries selected by the (N, N) mask, sum each graph: (B).
Var masked_ramp_sum(const Var& g, const Tensor& mask) {
  Tape& tape = g.tape();
  const std::size_t b = g.shape()[0], n = g.shape()[1];
  return sum_last(reshape(ramp(g) * tape.constant(mask), {b, n * n}));
}

}  // namespace

ProbGraphVar stack(Tape& tape, const std::vector<GraphProb>& models, bool trainable) {
  if (models.empty()) throw std::invalid_argument("stack: no graph models");
  const GraphSchema& s = models.front().schema;
  const std::size_t n = s.max_nodes, dc = s.node_channels(), tc = s.edge_channels();
  Tensor f({models.size(), n, dc});
  Tensor e({models.size(), n, n, tc});
  for (std::size_t b = 0; b < models.size(); ++b) {
    if (!(models[b].schema == s)) throw ConfigError("stack: mixed schemas");
    std::copy(models[b].nodes.data().begin(), models[b].nodes.data().end(), f.data().begin() + b * n * dc);
    std::copy(models[b].edges.data().begin(), models[b].edges.data().end(),
              e.data().begin() + b * n * n * tc);
  }
  if (trainable) return {tape.parameter(std::move(f)), tape.parameter(std::move(e))};
  return {tape.constant(std::move(f)), tape.constant(std::move(e))};
}

std::vector<GraphProb> unstack(const ProbGraphVar& m, const GraphSchema& schema) {
  check_batch(m);
  const std::size_t n = schema.max_nodes, dc = schema.node_channels(), tc = schema.edge_channels();
  if (m.max_nodes() != n || m.nodes.shape()[2] != dc || m.edges.shape()[3] != tc)
    throw ShapeError("unstack: batch " + shape_str(m.nodes.shape()) + " does not match the schema");
  const Tensor& f = m.nodes.value();
  const Tensor& e = m.edges.value();
  std::vector<GraphProb> out;
  out.reserve(m.batch());
  for (std::size_t b = 0; b < m.batch(); ++b) {
    GraphProb g{schema, Tensor({n, dc}), Tensor({n, n, tc})};
    std::copy_n(f.data().begin() + b * n * dc, n * dc, g.nodes.data().begin());
    std::copy_n(e.data().begin() + b * n * n * tc, n * n * tc, g.edges.data().begin());
    out.push_back(std::move(g));
  }
  return out;
}

Var valence_penalty(const ProbGraphVar& m, const ConstraintSpec& spec) {
  check_batch(m);
  Tape& tape = m.nodes.tape();
  const std::size_t b = m.batch(), n = m.max_nodes();
  const std::size_t dc = m.nodes.shape()[2], tc = m.edges.shape()[3];
  if (spec.edge_capacity.size() != tc || spec.node_capacity.size() != dc)
    throw ConfigError("valence_penalty: constraint spec does not match the schema");
  Var h = tape.constant(Tensor({tc, 1}, spec.edge_capacity));
  Var u = tape.constant(Tensor({dc, 1}, spec.node_capacity));
  Var pair_capacity = reshape(matmul(m.edges, h), {b, n, n}) * tape.constant(off_diagonal(n));
  Var used = sum_last(pair_capacity);
  Var allowed = reshape(matmul(m.nodes, u), {b, n});
  return used - allowed;
}

Var connectivity_penalty(const ProbGraphVar& m, const ConstraintSpec& spec) {
  check_batch(m);
  Tape& tape = m.nodes.tape();
  const std::size_t b = m.batch(), n = m.max_nodes();
  const double a = spec.sharpness;

  Var q = 1.0 - channel(m.nodes, 0);         // (B, N)
  Var adj = 1.0 - channel(m.edges, 0);       // (B, N, N)
  Var qq = reshape(q, {b, n, 1}) * reshape(q, {b, 1, n});

  // reach = A_0 + A_1 + ... + A_{N-1}, with A_0 = I and A_1 = A.
  Var eye = tape.constant(identity(n));
  Var reach = n >= 2 ? adj + eye : adj * 0.0 + eye;
  if (n >= 2) {
    Var power = adj;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      power = sigmoid(matmul(power, adj), a, 0.5);
      reach = reach + power;
    }
  }
  Var c = sigmoid(reach, a, 0.5);
  Var g = qq * (1.0 - c) + (1.0 - qq) * c;
  return g * tape.constant(off_diagonal(n));
}

Var compatibility_penalty(const ProbGraphVar& m, const ConstraintSpec& spec) {
  check_batch(m);
  Tape& tape = m.nodes.tape();
  const std::size_t dc = m.nodes.shape()[2];
  if (spec.compatibility.size() != dc * dc)
    throw ConfigError("compatibility_penalty: constraint spec does not match the schema");
  Var d = tape.constant(Tensor({dc, dc}, spec.compatibility));
  Var p = matmul(matmul(m.nodes, d), transpose(m.nodes));  // (B, N, N)
  Var exists = 1.0 - channel(m.edges, 0);
  return exists * (1.0 - p) - spec.alpha;
}

namespace {

Var weighted_sum(const ProbGraphVar& m, const ConstraintSpec& spec, const Regularizer& reg,
                 bool weighted) {
  if (!reg.any_enabled()) throw ConfigError("regularizer: no constraint family enabled");
  const std::size_t n = m.max_nodes();
  const Tensor upper = strict_upper(n);
  Var total;
  auto accumulate = [&](Var term, double w) {
    if (weighted) term = term * w;
    total = total.valid() ? total + term : term;
  };
  if (reg.use_valence) accumulate(sum_last(ramp(valence_penalty(m, spec))), reg.valence_weight);
  if (reg.use_connectivity)
    accumulate(masked_ramp_sum(connectivity_penalty(m, spec), upper), reg.connectivity_weight);
  if (reg.use_compatibility)
    accumulate(masked_ramp_sum(compatibility_penalty(m, spec), upper), reg.compatibility_weight);
  return total;
}

}  // namespace

Var total_regularizer(const ProbGraphVar& m, const ConstraintSpec& spec, const Regularizer& reg) {
  return sum(weighted_sum(m, spec, reg, true));
}

Var ramped_penalty(const ProbGraphVar& m, const ConstraintSpec& spec, const Regularizer& reg) {
  return weighted_sum(m, spec, reg, false);
}

namespace {
template <class F>
Tensor single(const GraphProb& m, F f) {
  Tape tape;
  ProbGraphVar v = stack(tape, {m});
  const Tensor& out = f(v).value();
  Shape s(out.shape().begin() + 1, out.shape().end());
  return out.reshaped(s);
}
}  // namespace

Tensor valence_penalty(const GraphProb& m, const ConstraintSpec& spec) {
  return single(m, [&](const ProbGraphVar& v) { return valence_penalty(v, spec); });
}

Tensor connectivity_penalty(const GraphProb& m, const ConstraintSpec& spec) {
  return single(m, [&](const ProbGraphVar& v) { return connectivity_penalty(v, spec); });
}

Tensor compatibility_penalty(const GraphProb& m, const ConstraintSpec& spec) {
  return single(m, [&](const ProbGraphVar& v) { return compatibility_penalty(v, spec); });
}

}  // namespace grvae
