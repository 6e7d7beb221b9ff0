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
#include <random>
#include <vector>

#include "doctest.h"
#include "grvae/kernels.hpp"
#include "grvae/tape.hpp"
#include "support.hpp"

using namespace grvae;
namespace k = grvae::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
  return worst;
}

// Restores the dispatch target chosen at startup.
struct IsaGuard {
  k::Isa saved = k::active_isa();
  ~IsaGuard() { k::force_isa(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available") {
  CHECK(k::isa_supported(k::Isa::kScalar));
  CHECK(k::isa_name(k::Isa::kScalar) == "scalar");
  CHECK(k::scalar_table().gemm_nn != nullptr);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (!k::isa_supported(k::Isa::kAvx2)) {
    MESSAGE("AVX2 not available on this machine; equivalence not exercised");
    return;
  }
  const k::KernelTable& s = k::scalar_table();
  const k::KernelTable& v = *k::avx2_table();
  std::mt19937_64 rng(42);
  // Sizes straddle the 4-wide vector and its remainders.
  for (std::size_t m : {1, 3, 4, 7, 16, 33})
    for (std::size_t n : {1, 2, 5, 8, 13})
      for (std::size_t kk : {1, 4, 6, 17}) {
        CAPTURE(m);
        CAPTURE(n);
        CAPTURE(kk);
        const auto a = random_vec(m * kk, rng), b = random_vec(kk * n, rng), bt = random_vec(n * kk, rng),
                   at = random_vec(kk * m, rng), c0 = random_vec(m * n, rng);
        auto c1 = c0, c2 = c0;
        s.gemm_nn(m, n, kk, a.data(), b.data(), c1.data());
        v.gemm_nn(m, n, kk, a.data(), b.data(), c2.data());
        CHECK(max_rel_diff(c1, c2) < 1e-12);
        c1 = c0, c2 = c0;
        s.gemm_nt(m, n, kk, a.data(), bt.data(), c1.data());
        v.gemm_nt(m, n, kk, a.data(), bt.data(), c2.data());
        CHECK(max_rel_diff(c1, c2) < 1e-12);
        c1 = c0, c2 = c0;
        s.gemm_tn(m, n, kk, at.data(), b.data(), c1.data());
        v.gemm_tn(m, n, kk, at.data(), b.data(), c2.data());
        CHECK(max_rel_diff(c1, c2) < 1e-12);
      }
  for (std::size_t n : {0, 1, 3, 4, 5, 8, 31, 100}) {
    CAPTURE(n);
    const auto x = random_vec(n, rng), y0 = random_vec(n, rng);
    auto y1 = y0, y2 = y0;
    s.axpy(n, 0.7, x.data(), y1.data());
    v.axpy(n, 0.7, x.data(), y2.data());
    CHECK(max_rel_diff(y1, y2) < 1e-15);
    CHECK(std::abs(s.dot(n, x.data(), y0.data()) - v.dot(n, x.data(), y0.data())) < 1e-12);
    std::vector<double> o1(n), o2(n);
    s.add(n, x.data(), y0.data(), o1.data());
    v.add(n, x.data(), y0.data(), o2.data());
    CHECK(o1 == o2);
    s.mul(n, x.data(), y0.data(), o1.data());
    v.mul(n, x.data(), y0.data(), o2.data());
    CHECK(o1 == o2);
    auto alias = x;
    v.mul(n, alias.data(), y0.data(), alias.data());
    CHECK(alias == o1);
  }
}

TEST_CASE("tape results do not depend on the dispatch target") {
  if (!k::isa_supported(k::Isa::kAvx2)) return;
  IsaGuard guard;
  Rng rng(8);
  const Tensor a = grvae::testing::random_tensor({9, 13}, rng);
  const Tensor b = grvae::testing::random_tensor({13, 6}, rng);
  auto run = [&](k::Isa isa) {
    k::force_isa(isa);
    Tape tape;
    Var x = tape.parameter(a), y = tape.parameter(b);
    Var loss = sum(square(matmul(x, y)));
    Gradients g = tape.backward(loss);
    std::vector<double> out = g[x].values();
    out.insert(out.end(), g[y].values().begin(), g[y].values().end());
    out.push_back(loss.value().item());
    return out;
  };
  CHECK(max_rel_diff(run(k::Isa::kScalar), run(k::Isa::kAvx2)) < 1e-12);
}

TEST_CASE("forcing an unsupported target throws") {
  if (k::isa_supported(k::Isa::kAvx2)) return;
  CHECK_THROWS(k::force_isa(k::Isa::kAvx2));
}

}  // TEST_SUITE
