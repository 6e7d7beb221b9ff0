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

#include <cmath>

#include "doctest.h"
#include "grvae/datagen.hpp"
#include "grvae/errors.hpp"
#include "grvae/oracles.hpp"

using namespace grvae;

namespace {

const GraphSchema kDesk{8, 5, 1};

ConstraintSpec desk_spec() { return generic_constraints(kDesk, benchmark_compatibility()); }

std::vector<GraphOneHot> desk_graphs(std::size_t count, double p, std::uint64_t seed) {
  Rng rng(seed);
  CompatGenConfig c;
  c.count = count;
  c.node_min = 4;
  c.node_max = 8;
  c.edge_prob = p;
  return gen_node_compatible(kDesk, desk_spec(), c, rng);
}

}  // namespace

TEST_SUITE("datagen") {

TEST_CASE("compatible generator output is valid and sized") {
  const auto data = desk_graphs(500, 0.7, 1);
  CHECK(data.size() == 500);
  for (const GraphOneHot& g : data) {
    CHECK(is_valid(g, desk_spec(), Task::kCompatibility));
    CHECK(g.active_count() >= 4);
    CHECK(g.active_count() <= 8);
  }
}

TEST_CASE("edge probability controls edge frequency") {
  for (const GraphOneHot& g : desk_graphs(200, 0.0, 2)) CHECK(g.edge_count() == 0);
  const ConstraintSpec spec = desk_spec();
  std::size_t edges = 0, candidates = 0;
  for (const GraphOneHot& g : desk_graphs(10000, 0.4, 3)) {
    edges += g.edge_count();
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        if (!g.is_ghost(i) && !g.is_ghost(j) && spec.compatible(g.label(i), g.label(j)) > 0.0) ++candidates;
  }
  CHECK(std::abs(static_cast<double>(edges) / static_cast<double>(candidates) - 0.4) < 0.01);
}

TEST_CASE("generators are deterministic per seed") {
  CHECK(desk_graphs(50, 0.5, 9) == desk_graphs(50, 0.5, 9));
  CHECK_FALSE(desk_graphs(50, 0.5, 9) == desk_graphs(50, 0.5, 10));
}

TEST_CASE("generator options are validated") {
  CompatGenConfig c;
  c.node_max = 9;
  CHECK_THROWS_AS(c.validate(kDesk), ConfigError);
  c = CompatGenConfig{};
  c.node_max = 8;
  c.edge_prob = 1.5;
  CHECK_THROWS_AS(c.validate(kDesk), ConfigError);
  CorruptConfig k{3, 1};
  CHECK_THROWS_AS(k.validate(), ConfigError);
}

TEST_CASE("toy molecules satisfy every molecular rule") {
  const GraphSchema s{9, 4, 3};
  const ConstraintSpec spec = molecular_constraints(s, {4, 3, 2, 1});
  Rng rng(4);
  MoleculeGenConfig c;
  c.count = 1000;
  c.node_min = 2;
  const auto mols = gen_toy_molecules(s, spec, c, rng);
  CHECK(mols.size() == 1000);
  for (const GraphOneHot& g : mols) CHECK(is_valid(g, spec, Task::kMolecule));
}

TEST_CASE("single monovalent type yields atoms or pairs") {
  const GraphSchema s{5, 1, 1};
  const ConstraintSpec spec = molecular_constraints(s, {1});
  Rng rng(5);
  MoleculeGenConfig c;
  c.count = 200;
  for (const GraphOneHot& g : gen_toy_molecules(s, spec, c, rng)) {
    CHECK(g.active_count() <= 2);
    CHECK(g.edge_count() == g.active_count() - 1);
  }
}

TEST_CASE("bondless atom sets are rejected") {
  const GraphSchema s{4, 2, 1};
  Rng rng(6);
  CHECK_THROWS_AS(gen_toy_molecules(s, molecular_constraints(s, {0, 0}), MoleculeGenConfig{}, rng), ConfigError);
}

TEST_CASE("corruption inserts incompatible edges only") {
  const ConstraintSpec spec = desk_spec();
  const auto clean = desk_graphs(300, 0.5, 7);
  Rng rng(8);
  CHECK(corrupt_with_incompatible_edges(clean, spec, CorruptConfig{0, 0}, rng) == clean);
  const auto once = corrupt_with_incompatible_edges(clean, spec, CorruptConfig{1, 1}, rng);
  std::size_t changed = 0;
  for (std::size_t k = 0; k < clean.size(); ++k) {
    const GraphOneHot &a = clean[k], &b = once[k];
    CHECK(a.labels() == b.labels());
    std::size_t added = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        if (a.edge(i, j) == b.edge(i, j)) continue;
        CHECK(a.edge(i, j) == 0);
        CHECK(spec.compatible(a.label(i), a.label(j)) == 0.0);
        CHECK_FALSE(a.is_ghost(i));
        CHECK_FALSE(a.is_ghost(j));
        ++added;
      }
    CHECK(added <= 1);
    changed += added;
    if (added) CHECK_FALSE(check_compatibility(b, spec));
  }
  CHECK(changed > 250);
}

}  // TEST_SUITE
