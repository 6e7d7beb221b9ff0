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

#include "grvae/graph.hpp"

#include <algorithm>
#include <cmath>

#include "grvae/errors.hpp"
#include "grvae/tape.hpp"

namespace grvae {

void GraphSchema::validate() const {
  if (max_nodes < 1 || node_types < 1 || edge_types < 1)
    throw ConfigError("schema: N, d and t must all be >= 1 (got N=" + std::to_string(max_nodes) +
                      ", d=" + std::to_string(node_types) + ", t=" + std::to_string(edge_types) +
                      ")");
}

GraphOneHot::GraphOneHot(GraphSchema schema)
    : schema_(schema),
      labels_(schema.max_nodes, 0),
      edges_(schema.max_nodes * schema.max_nodes, 0) {
  schema_.validate();
}

void GraphOneHot::set_label(std::size_t i, int type) {
  if (type < 0 || static_cast<std::size_t>(type) > schema_.node_types)
    throw std::out_of_range("node type " + std::to_string(type) + " outside 0.." +
                            std::to_string(schema_.node_types));
  labels_.at(i) = type;
}

void GraphOneHot::set_edge(std::size_t i, std::size_t j, int type) {
  if (i == j) throw std::invalid_argument("self-loops are not representable");
  if (type < 0 || static_cast<std::size_t>(type) > schema_.edge_types)
    throw std::out_of_range("edge type " + std::to_string(type) + " outside 0.." +
                            std::to_string(schema_.edge_types));
  edges_.at(i * size() + j) = type;
  edges_.at(j * size() + i) = type;
}

std::size_t GraphOneHot::active_count() const {
  return static_cast<std::size_t>(std::count_if(labels_.begin(), labels_.end(),
                                                [](int l) { return l != 0; }));
}

std::size_t GraphOneHot::edge_count() const {
  return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(),
                                                [](int k) { return k != 0; })) /
         2;
}

std::size_t GraphOneHot::degree(std::size_t i) const {
  std::size_t d = 0;
  for (std::size_t j = 0; j < size(); ++j) d += edge(i, j) != 0;
  return d;
}

Tensor GraphOneHot::node_tensor() const {
  const std::size_t n = size(), c = schema_.node_channels();
  Tensor f({n, c}, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i * c + static_cast<std::size_t>(labels_[i])] = 1.0;
  return f;
}

Tensor GraphOneHot::edge_tensor() const {
  const std::size_t n = size(), c = schema_.edge_channels();
  Tensor e({n, n, c}, 0.0);
  for (std::size_t p = 0; p < n * n; ++p) e[p * c + static_cast<std::size_t>(edges_[p])] = 1.0;
  return e;
}

GraphOneHot GraphOneHot::permuted(const std::vector<std::size_t>& perm) const {
  if (perm.size() != size()) throw std::invalid_argument("permutation size mismatch");
  GraphOneHot out(schema_);
  for (std::size_t i = 0; i < size(); ++i) {
    out.labels_[i] = labels_.at(perm[i]);
    for (std::size_t j = 0; j < size(); ++j)
      out.edges_[i * size() + j] = edges_.at(perm[i] * size() + perm[j]);
  }
  return out;
}

namespace {

int one_hot_index(std::span<const double> v, const char* what, std::size_t where) {
  int hot = -1;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0.0) continue;
    if (v[k] != 1.0 || hot >= 0)
      throw DataError(std::string(what) + " " + std::to_string(where) + " is not one-hot");
    hot = static_cast<int>(k);
  }
  if (hot < 0) throw DataError(std::string(what) + " " + std::to_string(where) + " is all zero");
  return hot;
}

}  // namespace

GraphOneHot GraphOneHot::from_tensors(const GraphSchema& schema, const Tensor& nodes,
                                      const Tensor& edges) {
  GraphOneHot g(schema);
  const std::size_t n = schema.max_nodes, dc = schema.node_channels(), tc = schema.edge_channels();
  if (nodes.shape() != Shape{n, dc})
    throw ShapeError("from_tensors: node matrix " + shape_str(nodes.shape()) + ", expected " +
                     shape_str({n, dc}));
  if (edges.shape() != Shape{n, n, tc})
    throw ShapeError("from_tensors: edge tensor " + shape_str(edges.shape()) + ", expected " +
                     shape_str({n, n, tc}));
  for (std::size_t i = 0; i < n; ++i)
    g.labels_[i] = one_hot_index(nodes.data().subspan(i * dc, dc), "node row", i);
  for (std::size_t p = 0; p < n * n; ++p)
    g.edges_[p] = one_hot_index(edges.data().subspan(p * tc, tc), "edge fiber", p);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.edges_[i * n + i] != 0) throw DataError("self-loop at node " + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j)
      if (g.edges_[i * n + j] != g.edges_[j * n + i])
        throw DataError("edge tensor not symmetric at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
  }
  return g;
}

GraphProb GraphProb::relax(const GraphOneHot& g) {
  return GraphProb{g.schema(), g.node_tensor(), g.edge_tensor()};
}

GraphProb GraphProb::uniform(const GraphSchema& schema) {
  schema.validate();
  const std::size_t n = schema.max_nodes, tc = schema.edge_channels();
  GraphProb m{schema, Tensor({n, schema.node_channels()}, 1.0 / schema.node_channels()),
              Tensor({n, n, tc}, 1.0 / tc)};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < tc; ++k) m.edges[(i * n + i) * tc + k] = k == 0 ? 1.0 : 0.0;
  return m;
}

void GraphProb::validate(double tol) const {
  const std::size_t n = schema.max_nodes, dc = schema.node_channels(), tc = schema.edge_channels();
  if (nodes.shape() != Shape{n, dc} || edges.shape() != Shape{n, n, tc})
    throw ShapeError("graph model: shapes " + shape_str(nodes.shape()) + " / " +
                     shape_str(edges.shape()) + " do not match schema");
  auto check = [tol](std::span<const double> v, const std::string& where) {
    double s = 0.0;
    for (double x : v) {
      if (!(x >= -tol)) throw DataError(where + " has a negative entry");
      s += x;
    }
    if (std::abs(s - 1.0) > tol) throw DataError(where + " does not sum to 1");
  };
  for (std::size_t i = 0; i < n; ++i) check(nodes.data().subspan(i * dc, dc), "node row " + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto f = edges.data().subspan((i * n + j) * tc, tc);
      check(f, "edge fiber (" + std::to_string(i) + "," + std::to_string(j) + ")");
      if (i == j && std::abs(f[0] - 1.0) > tol)
        throw DataError("diagonal fiber " + std::to_string(i) + " is not 'absent'");
      const auto g = edges.data().subspan((j * n + i) * tc, tc);
      for (std::size_t k = 0; k < tc; ++k)
        if (std::abs(f[k] - g[k]) > tol) throw DataError("edge tensor not symmetric");
    }
}

namespace {
void check_schema(const GraphSchema& a, const GraphSchema& b) {
  if (!(a == b)) throw ConfigError("graph and model schemas differ");
}
}  // namespace

double log_likelihood(const GraphOneHot& g, const GraphProb& m) {
  check_schema(g.schema(), m.schema);
  const std::size_t n = g.size(), dc = m.schema.node_channels(), tc = m.schema.edge_channels();
  auto lg = [](double p) { return std::log(std::max(p, kLogClamp)); };
  double ll = 0.0;
  for (std::size_t i = 0; i < n; ++i) ll += lg(m.nodes[i * dc + static_cast<std::size_t>(g.label(i))]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      ll += lg(m.edges[(i * n + j) * tc + static_cast<std::size_t>(g.edge(i, j))]);
  return ll;
}

namespace {

int draw(std::span<const double> p, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    acc += p[k];
    if (x < acc) return static_cast<int>(k);
  }
  // Rounding left x above the total; take the last category with mass.
  for (std::size_t k = p.size(); k-- > 0;)
    if (p[k] > 0) return static_cast<int>(k);
  return 0;
}

int argmax(std::span<const double> p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

GraphOneHot sample(const GraphProb& m, Rng& rng) {
  const std::size_t n = m.schema.max_nodes, dc = m.schema.node_channels(), tc = m.schema.edge_channels();
  GraphOneHot g(m.schema);
  for (std::size_t i = 0; i < n; ++i) g.set_label(i, draw(m.nodes.data().subspan(i * dc, dc), rng));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      g.set_edge(i, j, draw(m.edges.data().subspan((i * n + j) * tc, tc), rng));
  return g;
}

GraphOneHot argmax_decode(const GraphProb& m) {
  const std::size_t n = m.schema.max_nodes, dc = m.schema.node_channels(), tc = m.schema.edge_channels();
  GraphOneHot g(m.schema);
  for (std::size_t i = 0; i < n; ++i) g.set_label(i, argmax(m.nodes.data().subspan(i * dc, dc)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      g.set_edge(i, j, argmax(m.edges.data().subspan((i * n + j) * tc, tc)));
  return g;
}

}  // namespace grvae
