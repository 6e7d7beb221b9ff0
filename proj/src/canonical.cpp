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

#include "grvae/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

#include "grvae/errors.hpp"

namespace grvae {
namespace {

// The non-isolated part of a graph, reindexed 0..n-1.
struct Core {
  std::size_t n = 0;
  std::vector<int> labels;
  std::vector<int> adj;  // n*n edge types
  std::vector<std::vector<std::size_t>> neighbors;

  int edge(std::size_t i, std::size_t j) const { return adj[i * n + j]; }
};

std::size_t distinct(const std::vector<int>& colors) {
  std::vector<int> c = colors;
  std::sort(c.begin(), c.end());
  return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
}

// Colors become ranks of (own color, sorted neighbor (edge type, color)
// multiset) until the number of classes stops growing. Ranks follow the
// signature order, so the result depends only on the isomorphism class of the
// colored graph.
std::vector<int> refine(const Core& g, std::vector<int> colors) {
  std::size_t classes = distinct(colors);
  std::vector<std::vector<int>> sig(g.n);
  std::vector<std::size_t> order(g.n);
  for (;;) {
    for (std::size_t v = 0; v < g.n; ++v) {
      std::vector<std::pair<int, int>> nb;
      nb.reserve(g.neighbors[v].size());
      for (std::size_t u : g.neighbors[v]) nb.emplace_back(g.edge(v, u), colors[u]);
      std::sort(nb.begin(), nb.end());
      auto& s = sig[v];
      s.clear();
      s.push_back(colors[v]);
      for (auto [k, c] : nb) {
        s.push_back(k);
        s.push_back(c);
      }
    }
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sig[a] < sig[b]; });
    std::vector<int> next(g.n);
    int rank = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
      if (i > 0 && sig[order[i]] != sig[order[i - 1]]) ++rank;
      next[order[i]] = rank;
    }
    const std::size_t now = static_cast<std::size_t>(rank) + 1;
    colors = std::move(next);
    if (now == classes) return colors;
    classes = now;
  }
}

std::string certificate(const Core& g, const std::vector<int>& colors) {
  std::vector<std::size_t> at(g.n);
  for (std::size_t v = 0; v < g.n; ++v) at[static_cast<std::size_t>(colors[v])] = v;
  std::string cert;
  cert.reserve(g.n + g.n * g.n / 2);
  for (std::size_t p = 0; p < g.n; ++p) cert.push_back(static_cast<char>(g.labels[at[p]]));
  for (std::size_t a = 0; a < g.n; ++a)
    for (std::size_t b = a + 1; b < g.n; ++b) cert.push_back(static_cast<char>(g.edge(at[a], at[b])));
  return cert;
}

void search(const Core& g, const std::vector<int>& colors, std::optional<std::string>& best) {
  // First non-singleton cell in color order.
  std::vector<std::size_t> count(g.n, 0);
  for (int c : colors) ++count[static_cast<std::size_t>(c)];
  std::size_t target = g.n;
  for (std::size_t c = 0; c < g.n; ++c)
    if (count[c] > 1) {
      target = c;
      break;
    }
  if (target == g.n) {
    std::string cert = certificate(g, colors);
    if (!best || cert < *best) best = std::move(cert);
    return;
  }
  for (std::size_t v = 0; v < g.n; ++v) {
    if (static_cast<std::size_t>(colors[v]) != target) continue;
    std::vector<int> split(g.n);
    for (std::size_t u = 0; u < g.n; ++u)
      split[u] = 2 * colors[u] + (static_cast<std::size_t>(colors[u]) == target && u != v ? 1 : 0);
    search(g, refine(g, std::move(split)), best);
  }
}

}  // namespace

std::string canonical_form(const GraphOneHot& g, const CanonicalOptions& options) {
  const GraphSchema& schema = g.schema();
  std::vector<std::size_t> isolated(schema.node_channels(), 0);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.degree(i) == 0)
      ++isolated[static_cast<std::size_t>(g.label(i))];
    else
      keep.push_back(i);
  }

  std::string out = "N" + std::to_string(g.size()) + ";I";
  for (std::size_t r = 0; r < isolated.size(); ++r) {
    if (r) out += ',';
    out += std::to_string(isolated[r]);
  }
  out += ";C" + std::to_string(keep.size()) + ";";
  if (keep.empty()) return out;

  Core core;
  core.n = keep.size();
  core.labels.resize(core.n);
  core.adj.assign(core.n * core.n, 0);
  core.neighbors.resize(core.n);
  for (std::size_t a = 0; a < core.n; ++a) {
    core.labels[a] = g.label(keep[a]);
    for (std::size_t b = 0; b < core.n; ++b) {
      const int k = g.edge(keep[a], keep[b]);
      core.adj[a * core.n + b] = k;
      if (k) core.neighbors[a].push_back(b);
    }
  }

  std::vector<int> colors = refine(core, core.labels);
  std::vector<std::size_t> cell(core.n, 0);
  for (int c : colors)
    if (++cell[static_cast<std::size_t>(c)] > options.max_cell)
      throw CanonicalizationError("canonicalization too expensive: color cell of size > " +
                                  std::to_string(options.max_cell));
  std::optional<std::string> best;
  search(core, colors, best);
  return out + *best;
}

}  // namespace grvae
