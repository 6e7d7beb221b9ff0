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

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "grvae/errors.hpp"
#include "grvae/oracles.hpp"
#include "grvae/penalties.hpp"
#include "support.hpp"

using namespace grvae;
using grvae::testing::random_connected;
using grvae::testing::random_graph;
using grvae::testing::random_permutation;
using grvae::testing::random_prob;

namespace {

const GraphSchema kMol{3, 4, 3};

ConstraintSpec mol_spec(const GraphSchema& s = kMol) { return molecular_constraints(s, {4, 3, 2, 1}); }

double ramped_sum(const Tensor& g) {
  double t = 0.0;
  for (double v : g.data()) t += std::max(v, 0.0);
  return t;
}

double ramped_upper_max(const Tensor& g) {
  double worst = 0.0;
  const std::size_t n = g.dim(0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) worst = std::max(worst, g.at({i, j}));
  return worst;
}

Regularizer only(bool valence, bool connectivity, bool compatibility, double w) {
  Regularizer r;
  r.use_valence = valence;
  r.use_connectivity = connectivity;
  r.use_compatibility = compatibility;
  r.valence_weight = valence ? w : 0.0;
  r.connectivity_weight = connectivity ? w : 0.0;
  r.compatibility_weight = compatibility ? w : 0.0;
  return r;
}

double regularizer_value(const GraphProb& m, const ConstraintSpec& spec, const Regularizer& reg) {
  Tape tape;
  return total_regularizer(stack(tape, {m}), spec, reg).value().item();
}

}  // namespace

TEST_SUITE("penalties") {

TEST_CASE("constraint spec validation") {
  const GraphSchema s{4, 2, 1};
  ConstraintSpec spec = generic_constraints(s, {{0, 1}, {1, 0}});
  CHECK_NOTHROW(spec.validate(s));
  CHECK(spec.node_capacity == std::vector<double>{0, 3, 3});
  CHECK(spec.edge_capacity == std::vector<double>{0, 1});
  ConstraintSpec bad = spec;
  bad.alpha = 1.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  bad = spec;
  bad.sharpness = 0.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  bad = spec;
  bad.edge_capacity[0] = 1.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  bad = spec;
  bad.node_capacity[0] = 1.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  bad = spec;
  bad.compatibility[1 * 3 + 2] = 0.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  bad = spec;
  bad.compatibility[0 * 3 + 1] = bad.compatibility[1 * 3 + 0] = 1.0;
  CHECK_THROWS_AS(bad.validate(s), ConfigError);
  CHECK_THROWS_AS(generic_constraints(s, {{1}}), ConfigError);
}

TEST_CASE("benchmark compatibility matrix") {
  const auto& d = benchmark_compatibility();
  const std::vector<std::vector<int>> expected = {
      {0, 1, 1, 1, 0}, {1, 0, 1, 0, 1}, {1, 1, 0, 1, 1}, {1, 0, 1, 0, 0}, {0, 1, 1, 0, 0}};
  CHECK(d == expected);
}

TEST_CASE("valence: carbon with a triple and a double bond exceeds by one") {
  GraphOneHot g(kMol);
  g.set_label(0, 1);
  g.set_label(1, 1);
  g.set_label(2, 1);
  g.set_edge(0, 1, 3);
  g.set_edge(0, 2, 2);
  const Tensor v = valence_penalty(GraphProb::relax(g), mol_spec());
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(v[1] == doctest::Approx(-1.0));
  CHECK(v[2] == doctest::Approx(-2.0));
}

TEST_CASE("valence: isolated ghost scores zero") {
  GraphOneHot g(kMol);
  g.set_label(0, 1);
  CHECK(valence_penalty(GraphProb::relax(g), mol_spec())[1] == 0.0);
}

TEST_CASE("valence: generic rule is tight on a clique") {
  const GraphSchema s{5, 2, 1};
  GraphOneHot g(s);
  for (std::size_t i = 0; i < 5; ++i) g.set_label(i, 1 + i % 2);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i + 1; j < 5; ++j) g.set_edge(i, j, 1);
  const Tensor v = valence_penalty(GraphProb::relax(g), generic_constraints(s, {}));
  for (double x : v.data()) CHECK(x == 0.0);
}

TEST_CASE("connectivity: certain edge between two real nodes") {
  const GraphSchema s{2, 1, 1};
  GraphOneHot g(s);
  g.set_label(0, 1);
  g.set_label(1, 1);
  g.set_edge(0, 1, 1);
  const Tensor c = connectivity_penalty(GraphProb::relax(g), generic_constraints(s, {}));
  CHECK(c.at({0, 1}) < 1e-10);
  CHECK(c.at({0, 1}) >= 0.0);
  CHECK(c.at({0, 0}) == 0.0);
}

TEST_CASE("connectivity: real node next to an isolated ghost") {
  const GraphSchema s{2, 1, 1};
  GraphOneHot g(s);
  g.set_label(0, 1);
  const Tensor c = connectivity_penalty(GraphProb::relax(g), generic_constraints(s, {}));
  CHECK(std::abs(c.at({0, 1})) < 1e-10);
}

TEST_CASE("connectivity: an isolated real node is penalized") {
  const GraphSchema s{3, 1, 1};
  GraphOneHot g(s);
  for (std::size_t i = 0; i < 3; ++i) g.set_label(i, 1);
  g.set_edge(0, 1, 1);
  const Tensor c = connectivity_penalty(GraphProb::relax(g), generic_constraints(s, {}));
  CHECK(c.at({0, 1}) < 1e-10);
  CHECK(c.at({0, 2}) > 1.0 - 1e-10);
  CHECK(c.at({1, 2}) > 1.0 - 1e-10);
  CHECK(c.at({2, 1}) == c.at({1, 2}));
  CHECK_FALSE(check_connectivity(g));
}

TEST_CASE("compatibility: hand values") {
  const GraphSchema s{2, 2, 1};
  ConstraintSpec spec = generic_constraints(s, {{0, 1}, {1, 0}});
  spec.alpha = 0.25;
  GraphOneHot g(s);
  g.set_label(0, 1);
  g.set_label(1, 2);
  GraphProb m = GraphProb::relax(g);
  for (double p : {0.0, 0.3, 1.0}) {
    m.edges.at({0, 1, 0}) = m.edges.at({1, 0, 0}) = 1.0 - p;
    m.edges.at({0, 1, 1}) = m.edges.at({1, 0, 1}) = p;
    CHECK(compatibility_penalty(m, spec).at({0, 1}) == doctest::Approx(-0.25).epsilon(1e-15));
  }
  g.set_label(1, 1);
  m = GraphProb::relax(g);
  m.edges.at({0, 1, 0}) = m.edges.at({1, 0, 0}) = 0.0;
  m.edges.at({0, 1, 1}) = m.edges.at({1, 0, 1}) = 1.0;
  CHECK(compatibility_penalty(m, spec).at({0, 1}) == doctest::Approx(0.75).epsilon(1e-15));
  m = GraphProb::relax(g);
  CHECK(compatibility_penalty(m, spec).at({0, 1}) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(compatibility_penalty(m, spec).at({0, 0}) == doctest::Approx(-0.25).epsilon(1e-15));
}

TEST_CASE("regularizer: ramp, weights and linearity") {
  GraphOneHot g(kMol);
  g.set_label(0, 1);
  g.set_label(1, 1);
  g.set_label(2, 1);
  g.set_edge(0, 1, 3);
  g.set_edge(0, 2, 2);
  const GraphProb violating = GraphProb::relax(g);
  CHECK(regularizer_value(violating, mol_spec(), only(true, false, false, 5.0)) == doctest::Approx(5.0));
  CHECK(regularizer_value(violating, mol_spec(), only(true, false, false, 10.0)) == doctest::Approx(10.0));

  g.set_edge(0, 1, 1);
  const GraphProb fine = GraphProb::relax(g);
  CHECK(regularizer_value(fine, mol_spec(), only(true, true, false, 1.0)) < 1e-9);
  CHECK_THROWS_AS(regularizer_value(fine, mol_spec(), only(false, false, false, 1.0)), ConfigError);

  Rng rng(20);
  const GraphSchema s{5, 5, 1};
  const ConstraintSpec spec = generic_constraints(s, benchmark_compatibility());
  for (int rep = 0; rep < 20; ++rep) {
    const GraphProb m = random_prob(s, rng, 3.0);
    const double one = regularizer_value(m, spec, only(true, true, true, 1.5));
    const double two = regularizer_value(m, spec, only(true, true, true, 3.0));
    CHECK(two == doctest::Approx(2.0 * one).epsilon(1e-12));
  }
}

TEST_CASE("ramped per-graph penalty equals the unweighted regularizer") {
  Rng rng(21);
  const GraphSchema s{4, 5, 1};
  const ConstraintSpec spec = generic_constraints(s, benchmark_compatibility());
  std::vector<GraphProb> batch;
  for (int k = 0; k < 3; ++k) batch.push_back(random_prob(s, rng, 3.0));
  Tape tape;
  const ProbGraphVar m = stack(tape, batch);
  const Regularizer reg = only(true, true, true, 1.0);
  const Tensor per = ramped_penalty(m, spec, reg).value();
  CHECK(per.size() == 3);
  CHECK(per[0] + per[1] + per[2] == doctest::Approx(total_regularizer(m, spec, reg).value().item()));
  const std::vector<GraphProb> back = unstack(m, s);
  CHECK(back[2].nodes == batch[2].nodes);
  CHECK(back[2].edges == batch[2].edges);
}

TEST_CASE("one-hot agreement with the exact oracles") {
  Rng rng(22);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 2 + rep % 7;
    const GraphSchema s{n, 4, 3};
    const ConstraintSpec spec = mol_spec(s);
    const GraphOneHot g = rep % 3 == 0   ? random_connected(s, rng, 0.2, 0.1)
                          : rep % 3 == 1 ? random_graph(s, rng, 0.2, 0.3, true)
                                         : random_graph(s, rng, 0.0, 0.15);
    const GraphProb m = GraphProb::relax(g);

    const ValenceReport exact = check_valence(g, spec);
    const double ramped = ramped_sum(valence_penalty(m, spec));
    CHECK(std::abs(ramped - exact.total_violation()) < 1e-9);
    CHECK((ramped == 0.0) == exact.ok());

    const double worst = ramped_upper_max(connectivity_penalty(m, spec));
    const bool connected = check_connectivity(g);
    CHECK((worst < 1e-6) == connected);
    if (!connected) CHECK(worst > 0.9);
  }
}

TEST_CASE("compatibility agreement on one-hot graphs") {
  Rng rng(23);
  const GraphSchema s{7, 5, 2};
  const ConstraintSpec spec = generic_constraints(s, benchmark_compatibility());
  int compatible = 0;
  for (int rep = 0; rep < 300; ++rep) {
    const GraphOneHot g = random_graph(s, rng, 0.2, 0.08 * (rep % 5));
    const Tensor c = compatibility_penalty(GraphProb::relax(g), spec);
    double ramped = 0.0;
    for (std::size_t i = 0; i < 7; ++i)
      for (std::size_t j = i + 1; j < 7; ++j) ramped += std::max(c.at({i, j}), 0.0);
    const bool ok = check_compatibility(g, spec);
    compatible += ok;
    CHECK((ramped == 0.0) == ok);
  }
  CHECK(compatible > 30);
  CHECK(compatible < 270);
}

TEST_CASE("penalties are permutation equivariant") {
  Rng rng(24);
  const GraphSchema s{6, 5, 1};
  const ConstraintSpec spec = generic_constraints(s, benchmark_compatibility());
  for (int rep = 0; rep < 10; ++rep) {
    const GraphProb m = random_prob(s, rng, 2.0);
    const std::vector<std::size_t> p = random_permutation(6, rng);
    GraphProb pm = m;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t r = 0; r < 6; ++r) pm.nodes.at({i, r}) = m.nodes.at({p[i], r});
      for (std::size_t j = 0; j < 6; ++j)
        for (std::size_t k = 0; k < 2; ++k) pm.edges.at({i, j, k}) = m.edges.at({p[i], p[j], k});
    }
    const Tensor v = valence_penalty(m, spec), pv = valence_penalty(pm, spec);
    const Tensor c = connectivity_penalty(m, spec), pc = connectivity_penalty(pm, spec);
    const Tensor k = compatibility_penalty(m, spec), pk = compatibility_penalty(pm, spec);
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(pv[i] == doctest::Approx(v[p[i]]).epsilon(1e-12));
      for (std::size_t j = 0; j < 6; ++j) {
        CHECK(pc.at({i, j}) == doctest::Approx(c.at({p[i], p[j]})).epsilon(1e-9));
        CHECK(pk.at({i, j}) == doctest::Approx(k.at({p[i], p[j]})).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("penalty gradients match central differences") {
  Rng rng(25);
  const GraphSchema s{6, 5, 2};
  const ConstraintSpec spec = generic_constraints(s, benchmark_compatibility());
  for (int family = 0; family < 3; ++family) {
    CAPTURE(family);
    for (int rep = 0; rep < 5; ++rep) {
      const GraphProb m = random_prob(s, rng, 1.0);
      const Tensor w = grvae::testing::random_tensor(family == 0 ? Shape{1, 6} : Shape{1, 6, 6}, rng);
      auto f = [&](Tape& tape, const std::vector<Var>& v) {
        const ProbGraphVar pg{v[0], v[1]};
        Var g = family == 0 ? valence_penalty(pg, spec)
                : family == 1 ? connectivity_penalty(pg, spec)
                              : compatibility_penalty(pg, spec);
        return sum(g * tape.constant(w));
      };
      const std::vector<Tensor> inputs = {m.nodes.reshaped({1, 6, 6}), m.edges.reshaped({1, 6, 6, 3})};
      CHECK(grvae::testing::check_gradient(f, inputs, 1e-6).rel_error < 1e-3);
    }
  }
}

}  // TEST_SUITE

TEST_SUITE("oracles") {

TEST_CASE("valence counts bond orders") {
  const GraphSchema s{5, 4, 3};
  const ConstraintSpec spec = mol_spec(s);
  GraphOneHot methane(s);
  methane.set_label(0, 1);
  for (std::size_t i = 1; i < 5; ++i) {
    methane.set_label(i, 4);
    methane.set_edge(0, i, 1);
  }
  CHECK(check_valence(methane, spec).ok());
  CHECK(is_valid(methane, spec, Task::kMolecule));

  GraphOneHot triple(s);
  triple.set_label(0, 1);
  triple.set_label(1, 1);
  triple.set_label(2, 1);
  triple.set_edge(0, 1, 3);
  triple.set_edge(0, 2, 3);
  const ValenceReport r = check_valence(triple, spec);
  CHECK_FALSE(r.pass[0]);
  CHECK(r.violation[0] == 2.0);
  CHECK(r.total_violation() == 2.0);
  CHECK(r.pass[1]);
}

TEST_CASE("ghosts with edges fail") {
  const GraphSchema s{3, 4, 3};
  GraphOneHot g(s);
  g.set_label(0, 1);
  g.set_edge(0, 1, 1);
  CHECK_FALSE(check_valence(g, mol_spec(s)).pass[1]);
  CHECK_FALSE(check_ghosts(g));
  CHECK_FALSE(check_connectivity(g));
  CHECK_FALSE(is_valid(g, mol_spec(s), Task::kCompatibility));
}

TEST_CASE("connectivity cases") {
  const GraphSchema s{4, 1, 1};
  GraphOneHot tri(s);
  for (std::size_t i = 0; i < 3; ++i) tri.set_label(i, 1);
  tri.set_edge(0, 1, 1);
  tri.set_edge(1, 2, 1);
  tri.set_edge(0, 2, 1);
  CHECK(check_connectivity(tri));

  GraphOneHot two(s);
  for (std::size_t i = 0; i < 4; ++i) two.set_label(i, 1);
  two.set_edge(0, 1, 1);
  two.set_edge(2, 3, 1);
  CHECK_FALSE(check_connectivity(two));

  GraphOneHot single(s);
  single.set_label(2, 1);
  CHECK(check_connectivity(single));
  CHECK(check_connectivity(GraphOneHot(s)));
}

TEST_CASE("compatibility cases") {
  const GraphSchema s{2, 2, 1};
  const ConstraintSpec spec = generic_constraints(s, {{0, 1}, {1, 0}});
  GraphOneHot g(s);
  g.set_label(0, 1);
  g.set_label(1, 2);
  CHECK(check_compatibility(g, spec));
  g.set_edge(0, 1, 1);
  CHECK(check_compatibility(g, spec));
  CHECK(is_valid(g, spec, Task::kCompatibility));
  g.set_label(1, 1);
  CHECK_FALSE(check_compatibility(g, spec));
  CHECK_FALSE(is_valid(g, spec, Task::kCompatibility));
}

TEST_CASE("molecule validity needs one connected fragment and an atom") {
  const GraphSchema s{4, 4, 3};
  const ConstraintSpec spec = mol_spec(s);
  GraphOneHot frag(s);
  for (std::size_t i = 0; i < 4; ++i) frag.set_label(i, 4);
  frag.set_edge(0, 1, 1);
  frag.set_edge(2, 3, 1);
  CHECK(check_valence(frag, spec).ok());
  CHECK_FALSE(is_valid(frag, spec, Task::kMolecule));
  CHECK(is_valid(frag, spec, Task::kCompatibility));

  const GraphOneHot empty(s);
  CHECK_FALSE(is_valid(empty, spec, Task::kMolecule));
  CHECK(is_valid(empty, spec, Task::kMolecule, ValidityOptions{true}));
  CHECK(is_valid(empty, spec, Task::kCompatibility));
}

TEST_CASE("oracles are permutation invariant") {
  Rng rng(26);
  const GraphSchema s{6, 4, 3};
  const ConstraintSpec spec = mol_spec(s);
  for (int rep = 0; rep < 200; ++rep) {
    const GraphOneHot g = rep % 2 ? random_connected(s, rng, 0.3, 0.05) : random_graph(s, rng, 0.3, 0.3, true);
    const GraphOneHot p = g.permuted(random_permutation(6, rng));
    CHECK(check_valence(g, spec).total_violation() == check_valence(p, spec).total_violation());
    CHECK(check_connectivity(g) == check_connectivity(p));
    CHECK(is_valid(g, spec, Task::kMolecule) == is_valid(p, spec, Task::kMolecule));
  }
}

}  // TEST_SUITE
