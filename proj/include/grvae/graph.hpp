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

// Labeled graphs in matrix form.
//
// A graph over a schema (N, d, t) is a node-label matrix F of shape N x (1+d)
// and an edge-label tensor E of shape N x N x (1+t). Channel 0 means "absent":
// F(i,0)=1 marks a ghost node and E(i,j,0)=1 a missing edge. Graphs are
// undirected without self-loops, so the upper triangle of E is authoritative.

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "grvae/tensor.hpp"

namespace grvae {

using Rng = std::mt19937_64;

struct GraphSchema {
  std::size_t max_nodes = 1;   // N
  std::size_t node_types = 1;  // d
  std::size_t edge_types = 1;  // t

  std::size_t node_channels() const { return node_types + 1; }
  std::size_t edge_channels() const { return edge_types + 1; }
  std::size_t pair_count() const { return max_nodes * (max_nodes - 1) / 2; }

  // Throws ConfigError unless N, d, t >= 1.
  void validate() const;

  friend bool operator==(const GraphSchema&, const GraphSchema&) = default;
};

// One-hot graph stored in index form: a label per node (0 = ghost) and an edge
// type per unordered pair (0 = none). The one-hot tensors are produced on
// demand, so the row/fiber one-hot and symmetry invariants hold by
// construction.
class GraphOneHot {
 public:
  GraphOneHot() = default;
  // All-ghost graph with no edges.
  explicit GraphOneHot(GraphSchema schema);

  // Validates one-hot rows and fibers, symmetry and an empty diagonal.
  // Throws DataError on violation, ShapeError on wrong shapes.
  static GraphOneHot from_tensors(const GraphSchema& schema, const Tensor& nodes,
                                  const Tensor& edges);

  const GraphSchema& schema() const { return schema_; }
  std::size_t size() const { return schema_.max_nodes; }

  int label(std::size_t i) const { return labels_.at(i); }
  void set_label(std::size_t i, int type);
  int edge(std::size_t i, std::size_t j) const { return edges_.at(i * size() + j); }
  // Sets both (i,j) and (j,i). i != j.
  void set_edge(std::size_t i, std::size_t j, int type);

  bool is_ghost(std::size_t i) const { return label(i) == 0; }
  std::size_t active_count() const;
  std::size_t edge_count() const;
  std::size_t degree(std::size_t i) const;

  const std::vector<int>& labels() const { return labels_; }

  // N x (1+d) and N x N x (1+t) one-hot tensors.
  Tensor node_tensor() const;
  Tensor edge_tensor() const;

  // Relabels nodes: node i of the result is node perm[i] of this graph.
  GraphOneHot permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const GraphOneHot&, const GraphOneHot&) = default;

 private:
  GraphSchema schema_;
  std::vector<int> labels_;
  std::vector<int> edges_;  // N*N, symmetric, zero diagonal
};

// Probabilistic graph: rows of nodes (N x (1+d)) and fibers of edges
// (N x N x (1+t)) are probability vectors, edges symmetric, diagonal fibers
// fixed to "absent".
struct GraphProb {
  GraphSchema schema;
  Tensor nodes;
  Tensor edges;

  // Exact relaxation of a one-hot graph.
  static GraphProb relax(const GraphOneHot& g);
  // Rows 1/(1+d), off-diagonal fibers 1/(1+t).
  static GraphProb uniform(const GraphSchema& schema);

  // Throws DataError when a row/fiber is not a distribution within tol, or on
  // asymmetry or a non-absent diagonal.
  void validate(double tol = 1e-9) const;
};

// log of the independent-categorical likelihood of g under m:
//   sum_i sum_r F(i,r) log F~(i,r) + sum_{i<j} sum_k E(i,j,k) log E~(i,j,k)
// with probabilities clamped at kLogClamp. Throws ConfigError on schema mismatch.
double log_likelihood(const GraphOneHot& g, const GraphProb& m);

// Independent categorical draw per node row and per upper-triangle fiber.
GraphOneHot sample(const GraphProb& m, Rng& rng);

// Most likely graph: argmax per row/fiber, ties to the lowest index.
GraphOneHot argmax_decode(const GraphProb& m);

}  // namespace grvae
