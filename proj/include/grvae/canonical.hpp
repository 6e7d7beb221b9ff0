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

#include <cstddef>
#include <string>

#include "grvae/graph.hpp"

namespace grvae {

struct CanonicalOptions {
  // Largest color cell tolerated after the initial refinement.
  std::size_t max_cell = 8;
};

// Permutation-invariant byte string: equal for two graphs iff they are
// isomorphic under a node relabeling that preserves node and edge types.
//
// Isolated nodes are factored out as per-label counts. The rest is colored by
// label, refined (1-WL with edge types), and the remaining ties are resolved
// by exhaustive individualization/refinement, keeping the lexicographically
// smallest adjacency certificate. Throws CanonicalizationError when a cell of
// the refined partition exceeds options.max_cell.
std::string canonical_form(const GraphOneHot& g, const CanonicalOptions& options = {});

}  // namespace grvae
