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

// Exact validity checks on one-hot graphs. These are the ground truth for
// "% Valid" and the reference the differentiable penalties are tested against.

#include <vector>

#include "grvae/constraints.hpp"
#include "grvae/graph.hpp"

namespace grvae {

struct ValenceReport {
  std::vector<bool> pass;          // per node
  std::vector<double> violation;   // max(used - allowed, 0) per node

  bool ok() const;
  double total_violation() const;
};

// Node i passes iff sum_j h(type(i,j)) <= u(type(i)) and, for ghosts, it has
// no incident edge.
ValenceReport check_valence(const GraphOneHot& g, const ConstraintSpec& spec);

// True iff every ghost is isolated and all real nodes lie in one component.
// Graphs with fewer than two real nodes pass when their ghosts are isolated.
bool check_connectivity(const GraphOneHot& g);

// True iff every edge joins compatible node types.
bool check_compatibility(const GraphOneHot& g, const ConstraintSpec& spec);

// No ghost node has an incident edge.
bool check_ghosts(const GraphOneHot& g);

struct ValidityOptions {
  // Whether an all-ghost graph counts as a valid molecule.
  bool empty_molecule_valid = false;
};

// molecule: valence, connectivity, ghost rule and at least one real node.
// compat:   ghost rule and compatibility (connectivity not required).
bool is_valid(const GraphOneHot& g, const ConstraintSpec& spec, Task task,
              const ValidityOptions& options = {});

}  // namespace grvae
