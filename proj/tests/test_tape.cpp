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
#include <memory>
#include <string>

#include "doctest.h"
#include "grvae/tape.hpp"
#include "support.hpp"

using namespace grvae;
using grvae::testing::check_gradient;
using grvae::testing::random_tensor;

TEST_SUITE("tape") {

TEST_CASE("tensor construction checks sizes") {
  CHECK_THROWS_AS(Tensor({2, 3}, std::vector<double>(5)), ShapeError);
  Tensor t({2, 3}, 1.5);
  CHECK(t.size() == 6);
  CHECK(t.at({1, 2}) == 1.5);
  CHECK_THROWS_AS(t.at({2, 0}), std::out_of_range);
  CHECK_THROWS_AS(t.item(), ShapeError);
  CHECK(t.reshaped({3, 2}).dim(0) == 3);
  CHECK_THROWS_AS(t.reshaped({4}), ShapeError);
  t[0] = std::nan("");
  CHECK_FALSE(t.all_finite());
}

TEST_CASE("softmax of equal logits is uniform") {
  Tape tape;
  Var s = softmax(tape.constant(Tensor({3}, 0.0)));
  for (double v : s.value().data()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("softmax rows are distributions even for large logits") {
  Tape tape;
  Tensor x({4, 5});
  Rng rng(3);
  x = random_tensor({4, 5}, rng, -800.0, 800.0);
  Var s = softmax(tape.constant(x));
  for (std::size_t r = 0; r < 4; ++r) {
    double total = 0.0;
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(s.value().at({r, c}) >= 0.0);
      total += s.value().at({r, c});
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("ramp clips negatives") {
  Tape tape;
  Var r = ramp(tape.constant(Tensor({2}, std::vector<double>{-2.5, 2.5})));
  CHECK(r.value()[0] == 0.0);
  CHECK(r.value()[1] == 2.5);
}

TEST_CASE("identity matmul returns its operand") {
  Tape tape;
  Tensor eye({3, 3}, 0.0);
  for (std::size_t i = 0; i < 3; ++i) eye.at({i, i}) = 1.0;
  Rng rng(5);
  const Tensor x = random_tensor({3, 4}, rng);
  CHECK(matmul(tape.constant(eye), tape.constant(x)).value() == x);
}

TEST_CASE("shape mismatches name the primitive and both shapes") {
  Tape tape;
  Var a = tape.constant(Tensor({2, 3}));
  Var b = tape.constant(Tensor({4, 2}));
  try {
    (void)matmul(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("(2x3)") != std::string::npos);
    CHECK(msg.find("(4x2)") != std::string::npos);
  }
  CHECK_THROWS_AS((void)add(a, tape.constant(Tensor({3, 2}))), ShapeError);
  CHECK_THROWS_AS((void)mul(a, tape.constant(Tensor({4}))), ShapeError);
}

TEST_CASE("broadcasting follows trailing-axis rules") {
  Tape tape;
  Tensor a({2, 3}, std::vector<double>{1, 2, 3, 4, 5, 6});
  Tensor row({3}, std::vector<double>{10, 20, 30});
  Tensor col({2, 1}, std::vector<double>{100, 200});
  CHECK(add(tape.constant(a), tape.constant(row)).value().values() ==
        std::vector<double>{11, 22, 33, 14, 25, 36});
  CHECK(add(tape.constant(a), tape.constant(col)).value().values() ==
        std::vector<double>{101, 102, 103, 204, 205, 206});
}

TEST_CASE("backward of a square at 3 is 6") {
  Tape tape;
  Var x = tape.parameter(Tensor::scalar(3.0));
  Gradients g = tape.backward(square(x));
  CHECK(g[x].item() == 6.0);
}

TEST_CASE("softmax sums have zero gradient") {
  Tape tape;
  Rng rng(9);
  Var x = tape.parameter(random_tensor({6}, rng));
  Gradients g = tape.backward(sum(softmax(x)));
  for (double v : g[x].data()) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("non-scalar roots are rejected") {
  Tape tape;
  Var x = tape.parameter(Tensor({2}, 1.0));
  CHECK_THROWS_AS(tape.backward(x * 2.0), ShapeError);
}

TEST_CASE("shared subexpressions accumulate over paths") {
  Rng rng(11);
  const Tensor x0 = random_tensor({5}, rng);
  Tape shared;
  Var x = shared.parameter(x0);
  Var e = exp(x);
  Gradients gs = shared.backward(sum(e * e + e));
  Tape expanded;
  Var y = expanded.parameter(x0);
  Gradients ge = expanded.backward(sum(exp(y) * exp(y) + exp(y)));
  for (std::size_t i = 0; i < 5; ++i) CHECK(gs[x][i] == doctest::Approx(ge[y][i]).epsilon(1e-14));
}

TEST_CASE("unreachable parameters get zero gradients") {
  Tape tape;
  Var x = tape.parameter(Tensor({2}, 1.0));
  Var unused = tape.parameter(Tensor({3}, 1.0));
  Gradients g = tape.backward(sum(x));
  CHECK(g[unused].values() == std::vector<double>(3, 0.0));
}

// Every primitive at 20 random interior points.
TEST_CASE("primitive gradients match central differences") {
  Rng rng(2024);
  struct Case {
    const char* name;
    grvae::testing::ScalarFn f;
    std::vector<Shape> shapes;
    double lo, hi;
  };
  auto w = std::make_shared<Tensor>(random_tensor({3, 4}, rng));
  auto weighted = [w](Var v) {
    Tape& t = v.tape();
    if (v.shape() == w->shape()) return sum(v * t.constant(*w));
    return sum(v);
  };
  auto index = std::make_shared<std::vector<std::ptrdiff_t>>(std::vector<std::ptrdiff_t>{0, 5, 5, -1, 11, 2});
  const std::vector<Case> cases = {
      {"add", [&](Tape&, const std::vector<Var>& v) { return weighted(v[0] + v[1]); }, {{3, 4}, {4}}, -1, 1},
      {"sub", [&](Tape&, const std::vector<Var>& v) { return weighted(v[0] - v[1]); }, {{3, 4}, {3, 1}}, -1, 1},
      {"mul", [&](Tape&, const std::vector<Var>& v) { return weighted(v[0] * v[1]); }, {{3, 4}, {3, 4}}, -1, 1},
      {"mul-broadcast", [&](Tape&, const std::vector<Var>& v) { return weighted(v[0] * v[1]); }, {{3, 4}, {1, 4}}, -1, 1},
      {"scalar ops", [&](Tape&, const std::vector<Var>& v) { return weighted(3.0 - 2.0 * v[0] + 0.5); }, {{3, 4}}, -1, 1},
      {"matmul", [&](Tape&, const std::vector<Var>& v) { return weighted(matmul(v[0], v[1])); }, {{3, 5}, {5, 4}}, -1, 1},
      {"batched matmul", [&](Tape&, const std::vector<Var>& v) { return sum(square(matmul(v[0], v[1]))); }, {{2, 3, 5}, {2, 5, 4}}, -1, 1},
      {"transpose", [&](Tape&, const std::vector<Var>& v) { return weighted(transpose(v[0])); }, {{4, 3}}, -1, 1},
      {"reshape", [&](Tape&, const std::vector<Var>& v) { return weighted(reshape(v[0], {3, 4})); }, {{2, 6}}, -1, 1},
      {"mean", [&](Tape&, const std::vector<Var>& v) { return square(mean(v[0])); }, {{3, 4}}, -1, 1},
      {"sum_last", [&](Tape&, const std::vector<Var>& v) { return sum(square(sum_last(v[0]))); }, {{3, 4}}, -1, 1},
      {"exp", [&](Tape&, const std::vector<Var>& v) { return weighted(exp(v[0])); }, {{3, 4}}, -2, 2},
      {"log", [&](Tape&, const std::vector<Var>& v) { return weighted(log(v[0])); }, {{3, 4}}, 0.1, 2},
      {"sigmoid", [&](Tape&, const std::vector<Var>& v) { return weighted(sigmoid(v[0], 3.0, 0.5)); }, {{3, 4}}, -1, 2},
      {"relu", [&](Tape&, const std::vector<Var>& v) { return weighted(relu(v[0])); }, {{3, 4}}, -1, 1},
      {"square", [&](Tape&, const std::vector<Var>& v) { return weighted(square(v[0])); }, {{3, 4}}, -1, 1},
      {"sqrt", [&](Tape&, const std::vector<Var>& v) { return weighted(sqrt(v[0])); }, {{3, 4}}, 0.2, 2},
      {"softmax", [&](Tape&, const std::vector<Var>& v) { return weighted(softmax(v[0])); }, {{3, 4}}, -2, 2},
      {"gather", [&](Tape&, const std::vector<Var>& v) { return sum(square(gather(v[0], index, {2, 3}))); }, {{3, 4}}, -1, 1},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<Tensor> inputs;
      for (const Shape& s : c.shapes) {
        Tensor t = random_tensor(s, rng, c.lo, c.hi);
        // Keep relu away from its kink.
        if (std::string(c.name) == "relu")
          for (double& x : t.data())
            if (std::abs(x) < 1e-3) x = 0.5;
        inputs.push_back(std::move(t));
      }
      CHECK(check_gradient(c.f, inputs, 1e-6).rel_error < 1e-4);
    }
  }
}

TEST_CASE("two-layer perceptron gradient matches central differences") {
  Rng rng(77);
  for (int rep = 0; rep < 5; ++rep) {
    const std::vector<Tensor> inputs = {random_tensor({4, 6}, rng), random_tensor({6, 8}, rng),
                                        random_tensor({8}, rng), random_tensor({8, 3}, rng),
                                        random_tensor({3}, rng)};
    auto f = [](Tape&, const std::vector<Var>& v) {
      Var h = relu(matmul(v[0], v[1]) + v[2]);
      return sum(square(matmul(h, v[3]) + v[4]));
    };
    CHECK(check_gradient(f, inputs, 1e-5).rel_error < 1e-4);
  }
}

}  // TEST_SUITE
