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

#include <vector>

#include "grvae/constraints.hpp"
#include "grvae/graph.hpp"

namespace grvae {

struct CompatGenConfig {
  std::size_t count = 1000;
  std::size_t node_min = 10;
  std::size_t node_max = 15;
  double edge_prob = 0.4;

  void validate(const GraphSchema& schema) const;
};

// Node count uniform in [node_min, node_max], labels uniform over 1..d, and
// each compatible pair joined by an edge of uniform type with probability
// edge_prob. Graphs need not be connected.
std::vector<GraphOneHot> gen_node_compatible(const GraphSchema& schema, const ConstraintSpec& spec,
                                             const CompatGenConfig& config, Rng& rng);

struct MoleculeGenConfig {
  std::size_t count = 1000;
  std::size_t node_min = 1;
  std::size_t node_max = 0;  // 0 means the schema's N
  // Chance per growth step of closing a ring instead of adding an atom.
  double ring_prob = 0.1;

  void validate(const GraphSchema& schema) const;
};

// Random connected growth under the valence rule of spec: start from one atom,
// then either attach a new atom or join two existing ones with a bond whose
// capacity fits both residual valences, until the drawn size is reached or no
// bond fits. Throws ConfigError when no node type admits a bond.
std::vector<GraphOneHot> gen_toy_molecules(const GraphSchema& schema, const ConstraintSpec& spec,
                                           const MoleculeGenConfig& config, Rng& rng);

struct CorruptConfig {
  std::size_t min_insertions = 1;
  std::size_t max_insertions = 3;

  void validate() const;
};

// Adds k edges (k uniform in [min, max]) of uniform type between distinct
// unconnected real nodes whose types are incompatible. Graphs with fewer
// candidate pairs receive as many as exist.
std::vector<GraphOneHot> corrupt_with_incompatible_edges(const std::vector<GraphOneHot>& data,
                                                         const ConstraintSpec& spec,
                                                         const CorruptConfig& config, Rng& rng);

}  // namespace grvae
