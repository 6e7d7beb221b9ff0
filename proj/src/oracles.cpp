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

#include "grvae/oracles.hpp"

#include <algorithm>
#include <numeric>

namespace grvae {

bool ValenceReport::ok() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

double ValenceReport::total_violation() const {
  return std::accumulate(violation.begin(), violation.end(), 0.0);
}

ValenceReport check_valence(const GraphOneHot& g, const ConstraintSpec& spec) {
  const std::size_t n = g.size();
  ValenceReport r{std::vector<bool>(n, true), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    double used = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) used += spec.edge_capacity.at(static_cast<std::size_t>(g.edge(i, j)));
    const double allowed = spec.node_capacity.at(static_cast<std::size_t>(g.label(i)));
    r.violation[i] = std::max(used - allowed, 0.0);
    r.pass[i] = used <= allowed && !(g.is_ghost(i) && g.degree(i) > 0);
  }
  return r;
}

bool check_ghosts(const GraphOneHot& g) {
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.is_ghost(i) && g.degree(i) > 0) return false;
  return true;
}

bool check_connectivity(const GraphOneHot& g) {
  if (!check_ghosts(g)) return false;
  const std::size_t n = g.size();
  std::size_t start = n, real = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (!g.is_ghost(i)) {
      ++real;
      if (start == n) start = i;
    }
  if (real <= 1) return true;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> queue{start};
  seen[start] = true;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    ++reached;
    for (std::size_t u = 0; u < n; ++u)
      if (!seen[u] && g.edge(v, u) != 0) {
        seen[u] = true;
        queue.push_back(u);
      }
  }
  return reached == real;
}

bool check_compatibility(const GraphOneHot& g, const ConstraintSpec& spec) {
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.edge(i, j) != 0 && spec.compatible(g.label(i), g.label(j)) != 1.0) return false;
  return true;
}

bool is_valid(const GraphOneHot& g, const ConstraintSpec& spec, Task task,
              const ValidityOptions& options) {
  if (!check_ghosts(g)) return false;
  if (task == Task::kCompatibility) return check_compatibility(g, spec);
  if (g.active_count() == 0) return options.empty_molecule_valid;
  return check_valence(g, spec).ok() && check_connectivity(g);
}

}  // namespace grvae
