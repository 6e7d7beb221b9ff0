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

// Dataset files: one JSON object per line,
//
//   {"n":3,"labels":[1,2,1],"edges":[[0,1,1],[1,2,1]]}
//
// n is the active node count, labels[i] in 1..d is the type of node i < n, and
// each edge [i, j, k] has i < j < n and type k in 1..t. Nodes n..N-1 are ghosts.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "grvae/graph.hpp"

namespace grvae {

// Active nodes are written in index order, so graphs whose ghosts are
// interleaved come back with ghosts moved to the end (an isomorphic graph).
// Throws std::invalid_argument when a ghost node has an incident edge.
std::string serialize(const GraphOneHot& g);

// line_no is only used for diagnostics. Throws ParseError.
GraphOneHot deserialize(std::string_view line, const GraphSchema& schema, std::size_t line_no = 0);

std::vector<GraphOneHot> read_dataset(std::istream& in, const GraphSchema& schema);
std::vector<GraphOneHot> read_dataset(const std::filesystem::path& path, const GraphSchema& schema);
void write_dataset(std::ostream& out, const std::vector<GraphOneHot>& graphs);
void write_dataset(const std::filesystem::path& path, const std::vector<GraphOneHot>& graphs);

// Graphviz rendering of any graph, ghosts included (drawn dashed).
std::string to_dot(const GraphOneHot& g, std::string_view name = "G");

}  // namespace grvae
