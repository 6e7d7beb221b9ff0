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

// Shared fixtures for the unit and acceptance tests: random graphs, random
// probabilistic graphs, a finite-difference gradient check and a brute-force
// isomorphism test.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "grvae/graph.hpp"
#include "grvae/tape.hpp"

namespace grvae::testing {

// Real nodes with probability 1 - ghost_prob; pairs get a uniform edge type
// with probability edge_prob. Ghost nodes receive edges only when
// ghost_edges is set.
inline GraphOneHot random_graph(const GraphSchema& s, Rng& rng, double ghost_prob, double edge_prob,
                                bool ghost_edges = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> node_type(1, static_cast<int>(s.node_types));
  std::uniform_int_distribution<int> edge_type(1, static_cast<int>(s.edge_types));
  GraphOneHot g(s);
  for (std::size_t i = 0; i < s.max_nodes; ++i)
    if (u(rng) >= ghost_prob) g.set_label(i, node_type(rng));
  for (std::size_t i = 0; i < s.max_nodes; ++i)
    for (std::size_t j = i + 1; j < s.max_nodes; ++j) {
      if (!ghost_edges && (g.is_ghost(i) || g.is_ghost(j))) continue;
      if (u(rng) < edge_prob) g.set_edge(i, j, edge_type(rng));
    }
  return g;
}

// Random spanning tree over the real nodes plus extra edges.
inline GraphOneHot random_connected(const GraphSchema& s, Rng& rng, double ghost_prob, double extra_prob) {
  GraphOneHot g = random_graph(s, rng, ghost_prob, extra_prob);
  std::uniform_int_distribution<int> edge_type(1, static_cast<int>(s.edge_types));
  std::vector<std::size_t> real;
  for (std::size_t i = 0; i < s.max_nodes; ++i)
    if (!g.is_ghost(i)) real.push_back(i);
  std::shuffle(real.begin(), real.end(), rng);
  for (std::size_t k = 1; k < real.size(); ++k) {
    std::uniform_int_distribution<std::size_t> parent(0, k - 1);
    g.set_edge(real[k], real[parent(rng)], edge_type(rng));
  }
  return g;
}

inline std::vector<double> random_simplex(std::size_t n, Rng& rng, double spread) {
  std::normal_distribution<double> normal(0.0, spread);
  std::vector<double> p(n);
  double total = 0.0;
  for (double& v : p) total += v = std::exp(normal(rng));
  for (double& v : p) v /= total;
  return p;
}

// Rows and upper fibers from softmax of N(0, spread^2) logits, mirrored.
inline GraphProb random_prob(const GraphSchema& s, Rng& rng, double spread = 1.5) {
  GraphProb m = GraphProb::uniform(s);
  const std::size_t n = s.max_nodes, c = s.node_channels(), e = s.edge_channels();
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> row = random_simplex(c, rng, spread);
    for (std::size_t r = 0; r < c; ++r) m.nodes.at({i, r}) = row[r];
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::vector<double> fiber = random_simplex(e, rng, spread);
      for (std::size_t k = 0; k < e; ++k) m.edges.at({i, j, k}) = m.edges.at({j, i, k}) = fiber[k];
    }
  return m;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.data()) v = u(rng);
  return t;
}

using ScalarFn = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheck {
  double rel_error = 0.0;  // |analytic - numeric|_2 / |numeric|_2
  double numeric_norm = 0.0;
};

// Central differences of f with respect to every entry of every input.
inline GradCheck check_gradient(const ScalarFn& f, const std::vector<Tensor>& inputs, double step) {
  Tape tape;
  std::vector<Var> vars;
  for (const Tensor& t : inputs) vars.push_back(tape.parameter(t));
  const Gradients grads = tape.backward(f(tape, vars));

  auto value_at = [&](const std::vector<Tensor>& at) {
    Tape t;
    std::vector<Var> v;
    for (const Tensor& x : at) v.push_back(t.constant(x));
    return f(t, v).value().item();
  };
  double diff2 = 0.0, num2 = 0.0;
  std::vector<Tensor> probe = inputs;
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    const Tensor& analytic = grads[vars[a]];
    for (std::size_t k = 0; k < inputs[a].size(); ++k) {
      const double x = inputs[a][k];
      probe[a][k] = x + step;
      const double up = value_at(probe);
      probe[a][k] = x - step;
      const double down = value_at(probe);
      probe[a][k] = x;
      const double numeric = (up - down) / (2.0 * step);
      diff2 += (analytic[k] - numeric) * (analytic[k] - numeric);
      num2 += numeric * numeric;
    }
  }
  return {std::sqrt(diff2) / std::max(std::sqrt(num2), 1e-12), std::sqrt(num2)};
}

// Tries every node permutation.
inline bool brute_isomorphic(const GraphOneHot& a, const GraphOneHot& b) {
  if (a.schema() != b.schema()) return false;
  std::vector<int> la = a.labels(), lb = b.labels();
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb || a.edge_count() != b.edge_count()) return false;
  std::vector<std::size_t> perm(a.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    if (b.permuted(perm) == a) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), std::size_t{0});
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

}  // namespace grvae::testing
