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

// Differentiable validity constraints g <= 0 evaluated on a batch of
// probabilistic graphs. Inputs are tape values
//
//   nodes: (B, N, 1+d)     edges: (B, N, N, 1+t)
//
// so gradients reach whatever produced them (normally the decoder).

#include "grvae/constraints.hpp"
#include "grvae/graph.hpp"
#include "grvae/tape.hpp"

namespace grvae {

struct ProbGraphVar {
  Var nodes;
  Var edges;

  std::size_t batch() const { return nodes.shape()[0]; }
  std::size_t max_nodes() const { return nodes.shape()[1]; }
};

// Stacks graph models into a batch on the tape, as constants or as trainable
// leaves (for gradient checks).
ProbGraphVar stack(Tape& tape, const std::vector<GraphProb>& models, bool trainable = false);
// Inverse of stack: the current values split per graph.
std::vector<GraphProb> unstack(const ProbGraphVar& m, const GraphSchema& schema);

// Capacity used minus capacity allowed, per node: (B, N).
//   g_i = sum_{j != i} sum_k h(k) E~(i,j,k) - sum_r u(r) F~(i,r)
Var valence_penalty(const ProbGraphVar& m, const ConstraintSpec& spec);

// Pairwise reachability mismatch, (B, N, N), symmetric with zero diagonal.
// A = 1 - E~(:,:,0) is raised to powers through sharpened sigmoids,
// C = sigma(I + A + A_2 + ... + A_{N-1}) and, with q = 1 - F~(:,0),
//   g_ij = q_i q_j (1 - C_ij) + (1 - q_i q_j) C_ij.
Var connectivity_penalty(const ProbGraphVar& m, const ConstraintSpec& spec);

// Edge existence on poorly compatible pairs, (B, N, N). With P = F~ D F~^T,
//   g_ij = (1 - E~(i,j,0)) (1 - P_ij) - alpha.
// The diagonal equals -alpha.
Var compatibility_penalty(const ProbGraphVar& m, const ConstraintSpec& spec);

// Weighted sum over the batch of ramped per-node and per-pair (i < j)
// penalties of the enabled families. Scalar. Throws ConfigError when no family
// is enabled.
Var total_regularizer(const ProbGraphVar& m, const ConstraintSpec& spec, const Regularizer& reg);

// Unweighted ramped penalty of the enabled families, per graph: (B).
Var ramped_penalty(const ProbGraphVar& m, const ConstraintSpec& spec, const Regularizer& reg);

// Single-graph conveniences returning plain values.
Tensor valence_penalty(const GraphProb& m, const ConstraintSpec& spec);       // (N)
Tensor connectivity_penalty(const GraphProb& m, const ConstraintSpec& spec);  // (N, N)
Tensor compatibility_penalty(const GraphProb& m, const ConstraintSpec& spec); // (N, N)

}  // namespace grvae
