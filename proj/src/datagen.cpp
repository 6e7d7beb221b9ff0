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

#include "grvae/datagen.hpp"

#include <algorithm>
#include <random>
#include <string>
#include <utility>

#include "grvae/errors.hpp"

namespace grvae {
namespace {

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

}  // namespace

void CompatGenConfig::validate(const GraphSchema& schema) const {
  if (node_min < 1 || node_min > node_max)
    throw ConfigError("generator.node_min/node_max: need 1 <= node_min <= node_max");
  if (node_max > schema.max_nodes)
    throw ConfigError("generator.node_max exceeds schema.max_nodes (" + std::to_string(schema.max_nodes) + ")");
  if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw ConfigError("generator.edge_prob must lie in [0, 1]");
}

std::vector<GraphOneHot> gen_node_compatible(const GraphSchema& schema, const ConstraintSpec& spec,
                                             const CompatGenConfig& config, Rng& rng) {
  schema.validate();
  spec.validate(schema);
  config.validate(schema);
  const int d = static_cast<int>(schema.node_types), t = static_cast<int>(schema.edge_types);
  std::uniform_int_distribution<int> label(1, d), type(1, t);
  std::bernoulli_distribution edge(config.edge_prob);
  std::vector<GraphOneHot> out;
  out.reserve(config.count);
  for (std::size_t c = 0; c < config.count; ++c) {
    GraphOneHot g(schema);
    const std::size_t n = uniform_index(rng, config.node_min, config.node_max);
    for (std::size_t i = 0; i < n; ++i) g.set_label(i, label(rng));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (spec.compatible(g.label(i), g.label(j)) == 1.0 && edge(rng)) g.set_edge(i, j, type(rng));
    out.push_back(std::move(g));
  }
  return out;
}

void MoleculeGenConfig::validate(const GraphSchema& schema) const {
  const std::size_t hi = node_max ? node_max : schema.max_nodes;
  if (node_min < 1 || node_min > hi) throw ConfigError("generator.node_min/node_max: need 1 <= node_min <= node_max");
  if (hi > schema.max_nodes)
    throw ConfigError("generator.node_max exceeds schema.max_nodes (" + std::to_string(schema.max_nodes) + ")");
  if (!(ring_prob >= 0.0 && ring_prob <= 1.0)) throw ConfigError("generator.ring_prob must lie in [0, 1]");
}

std::vector<GraphOneHot> gen_toy_molecules(const GraphSchema& schema, const ConstraintSpec& spec,
                                           const MoleculeGenConfig& config, Rng& rng) {
  schema.validate();
  spec.validate(schema);
  config.validate(schema);
  const std::size_t hi = config.node_max ? config.node_max : schema.max_nodes;

  // Cheapest bond and the node types that can carry it.
  double min_bond = -1.0;
  for (std::size_t k = 1; k < spec.edge_capacity.size(); ++k)
    if (min_bond < 0.0 || spec.edge_capacity[k] < min_bond) min_bond = spec.edge_capacity[k];
  std::vector<int> bondable, all_types;
  for (std::size_t r = 1; r < spec.node_capacity.size(); ++r) {
    all_types.push_back(static_cast<int>(r));
    if (spec.node_capacity[r] >= min_bond && spec.node_capacity[r] > 0.0) bondable.push_back(static_cast<int>(r));
  }
  if (bondable.empty() && hi > 1)
    throw ConfigError("molecule generator: no node type has room for any bond");

  std::bernoulli_distribution ring(config.ring_prob);
  std::vector<GraphOneHot> out;
  out.reserve(config.count);
  std::vector<double> residual(schema.max_nodes);
  for (std::size_t c = 0; c < config.count; ++c) {
    GraphOneHot g(schema);
    const std::size_t target = uniform_index(rng, config.node_min, hi);
    const std::vector<int>& first = target > 1 ? bondable : all_types;
    g.set_label(0, first[uniform_index(rng, 0, first.size() - 1)]);
    residual[0] = spec.node_capacity[static_cast<std::size_t>(g.label(0))];
    std::size_t n = 1;

    auto bonds_fitting = [&](double cap) {
      std::vector<int> ks;
      for (std::size_t k = 1; k < spec.edge_capacity.size(); ++k)
        if (spec.edge_capacity[k] <= cap) ks.push_back(static_cast<int>(k));
      return ks;
    };

    while (n < target) {
      std::vector<std::size_t> open;
      for (std::size_t i = 0; i < n; ++i)
        if (residual[i] >= min_bond) open.push_back(i);
      if (open.empty()) break;

      if (n >= 3 && ring(rng)) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        for (std::size_t a = 0; a < open.size(); ++a)
          for (std::size_t b = a + 1; b < open.size(); ++b)
            if (g.edge(open[a], open[b]) == 0) pairs.emplace_back(open[a], open[b]);
        if (!pairs.empty()) {
          auto [i, j] = pairs[uniform_index(rng, 0, pairs.size() - 1)];
          const std::vector<int> ks = bonds_fitting(std::min(residual[i], residual[j]));
          const int k = ks[uniform_index(rng, 0, ks.size() - 1)];
          g.set_edge(i, j, k);
          residual[i] -= spec.edge_capacity[static_cast<std::size_t>(k)];
          residual[j] -= spec.edge_capacity[static_cast<std::size_t>(k)];
          continue;
        }
      }

      const std::size_t i = open[uniform_index(rng, 0, open.size() - 1)];
      const int r = bondable[uniform_index(rng, 0, bondable.size() - 1)];
      const double cap = spec.node_capacity[static_cast<std::size_t>(r)];
      const std::vector<int> ks = bonds_fitting(std::min(residual[i], cap));
      const int k = ks[uniform_index(rng, 0, ks.size() - 1)];
      g.set_label(n, r);
      g.set_edge(i, n, k);
      residual[i] -= spec.edge_capacity[static_cast<std::size_t>(k)];
      residual[n] = cap - spec.edge_capacity[static_cast<std::size_t>(k)];
      ++n;
    }
    out.push_back(std::move(g));
  }
  return out;
}

void CorruptConfig::validate() const {
  if (min_insertions > max_insertions) throw ConfigError("corrupt: min_insertions > max_insertions");
}

std::vector<GraphOneHot> corrupt_with_incompatible_edges(const std::vector<GraphOneHot>& data,
                                                         const ConstraintSpec& spec,
                                                         const CorruptConfig& config, Rng& rng) {
  config.validate();
  std::vector<GraphOneHot> out;
  out.reserve(data.size());
  for (const GraphOneHot& src : data) {
    spec.validate(src.schema());
    GraphOneHot g = src;
    const std::size_t n = g.size();
    std::vector<std::pair<std::size_t, std::size_t>> pool;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (!g.is_ghost(i) && !g.is_ghost(j) && g.edge(i, j) == 0 &&
            spec.compatible(g.label(i), g.label(j)) == 0.0)
          pool.emplace_back(i, j);
    std::size_t k = uniform_index(rng, config.min_insertions, config.max_insertions);
    k = std::min(k, pool.size());
    std::uniform_int_distribution<int> type(1, static_cast<int>(g.schema().edge_types));
    for (std::size_t m = 0; m < k; ++m) {
      const std::size_t pick = uniform_index(rng, m, pool.size() - 1);
      std::swap(pool[m], pool[pick]);
      g.set_edge(pool[m].first, pool[m].second, type(rng));
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace grvae
