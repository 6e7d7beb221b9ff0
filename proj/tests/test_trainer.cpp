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
#include "grvae/trainer.hpp"

using namespace grvae;

namespace {

TrainSetup small_setup(const GraphSchema& s) {
  TrainSetup setup;
  setup.model.schema = s;
  setup.model.latent_dim = 4;
  setup.model.hidden = {16};
  setup.train.optimizer = Optimizer::kAdam;
  setup.train.learning_rate = 1e-2;
  setup.train.batch_size = 50;
  setup.train.epochs = 5;
  setup.train.seed = 3;
  setup.train.probe_samples = 50;
  setup.spec = generic_constraints(s, s.node_types == 5 ? benchmark_compatibility() : std::vector<std::vector<int>>{});
  setup.regularizer = Regularizer::for_task(Task::kCompatibility, 0.0);
  return setup;
}

std::vector<GraphOneHot> compat_data(const GraphSchema& s, std::size_t count, double p, std::uint64_t seed) {
  Rng rng(seed);
  CompatGenConfig g;
  g.count = count;
  g.node_min = 2;
  g.node_max = s.max_nodes;
  g.edge_prob = p;
  return gen_node_compatible(s, generic_constraints(s, benchmark_compatibility()), g, rng);
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("initialization draws weights at the requested scale") {
  ModelConfig c;
  c.schema = {6, 5, 1};
  c.latent_dim = 16;
  c.hidden = {128};
  Rng rng(1);
  const Vae v = init_params(c, 0.02, rng);
  double sq = 0.0;
  std::size_t count = 0;
  for (const auto& [name, t] : v.params) {
    if (name.find(".w") != std::string::npos) {
      for (double w : t.data()) sq += w * w;
      count += t.size();
    } else {
      for (double b : t.data()) CHECK(b == 0.0);
    }
  }
  CHECK(std::abs(std::sqrt(sq / static_cast<double>(count)) - 0.02) < 0.002);
  Rng a(1);
  CHECK(init_params(c, 0.02, a).params == v.params);
}

TEST_CASE("derived streams are independent and reproducible") {
  Rng a = derive_rng(7, 1), b = derive_rng(7, 1), c = derive_rng(7, 2), d = derive_rng(8, 1);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("KL weight rises linearly during warm-up") {
  TrainConfig c;
  CHECK(c.kl_weight(0) == 1.0);
  c.kl_warmup_epochs = 4;
  CHECK(c.kl_weight(1) == 0.25);
  CHECK(c.kl_weight(3) == 0.75);
  CHECK(c.kl_weight(4) == 1.0);
  CHECK(c.kl_weight(40) == 1.0);
}

TEST_CASE("configuration errors name the field") {
  TrainConfig c;
  c.batch_size = 0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("batch_size"), ConfigError);
  c = TrainConfig{};
  c.momentum = 1.0;
  CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("momentum"), ConfigError);
  CHECK_THROWS_AS(parse_optimizer("rmsprop"), ConfigError);
  CHECK(parse_optimizer("adam") == Optimizer::kAdam);
}

TEST_CASE("training on single-edge pairs lowers the loss") {
  const GraphSchema s{2, 1, 1};
  GraphOneHot g(s);
  g.set_label(0, 1);
  g.set_label(1, 1);
  g.set_edge(0, 1, 1);
  const std::vector<GraphOneHot> data(500, g);
  TrainSetup setup = small_setup(s);
  setup.train.epochs = 50;
  const TrainResult r = train(data, setup);
  CHECK(r.log.size() == 51);
  CHECK(r.log.front().epoch == 0);
  CHECK(r.log.back().neg_elbo < 0.1 * r.log.front().neg_elbo);
  CHECK(r.log.back().neg_elbo < 0.5);
}

TEST_CASE("runs are reproducible bit for bit") {
  const GraphSchema s{5, 5, 1};
  const auto data = compat_data(s, 200, 0.5, 11);
  TrainSetup setup = small_setup(s);
  setup.regularizer = Regularizer::for_task(Task::kCompatibility, 5.0);
  const TrainResult a = train(data, setup), b = train(data, setup);
  CHECK(a.vae.params == b.vae.params);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].loss == b.log[e].loss);
    CHECK(a.log[e].probe_valid == b.log[e].probe_valid);
  }
  TrainSetup other = setup;
  other.train.seed = 4;
  CHECK_FALSE(train(data, other).vae.params == a.vae.params);
}

TEST_CASE("standard and regularized runs share their starting point") {
  const GraphSchema s{5, 5, 1};
  const auto data = compat_data(s, 100, 0.5, 12);
  TrainSetup std_setup = small_setup(s), reg_setup = small_setup(s);
  reg_setup.regularizer = Regularizer::for_task(Task::kCompatibility, 5.0);
  std_setup.train.epochs = reg_setup.train.epochs = 1;
  const TrainResult a = train(data, std_setup), b = train(data, reg_setup);
  CHECK(a.log[0].neg_elbo == b.log[0].neg_elbo);
  CHECK(a.log[0].probe_valid == b.log[0].probe_valid);
  CHECK(a.log[1].regularizer == 0.0);
}

TEST_CASE("callback sees every epoch") {
  const GraphSchema s{4, 5, 1};
  const auto data = compat_data(s, 60, 0.5, 13);
  TrainSetup setup = small_setup(s);
  setup.train.epochs = 3;
  std::vector<std::size_t> seen;
  train(data, setup, [&](const EpochRecord& r, const Vae& v) {
    seen.push_back(r.epoch);
    CHECK_NOTHROW(v.check());
  });
  CHECK(seen == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("divergence raises a training error") {
  const GraphSchema s{4, 5, 1};
  const auto data = compat_data(s, 60, 0.5, 14);
  TrainSetup setup = small_setup(s);
  setup.train.optimizer = Optimizer::kSgd;
  setup.train.learning_rate = 1e300;
  setup.train.clip_norm = 0.0;
  setup.train.init_scale = 1.0;
  CHECK_THROWS_AS(train(data, setup), TrainingError);
}

TEST_CASE("invalid inputs are rejected") {
  const GraphSchema s{4, 5, 1};
  TrainSetup setup = small_setup(s);
  CHECK_THROWS_AS(train({}, setup), DataError);
  CHECK_THROWS_AS(train({GraphOneHot(GraphSchema{3, 5, 1})}, setup), DataError);
}

TEST_CASE("regularization lowers the penalty at prior samples") {
  const GraphSchema s{6, 5, 1};
  const auto data = compat_data(s, 300, 0.7, 15);
  TrainSetup setup = small_setup(s);
  setup.regularizer = Regularizer::for_task(Task::kCompatibility, 5.0);
  setup.train.epochs = 15;
  const TrainResult r = train(data, setup);
  CHECK(r.log.front().probe_penalty > 0.0);
  CHECK(r.log.back().probe_penalty < 0.9 * r.log.front().probe_penalty);
}

}  // TEST_SUITE
