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

#include "grvae/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "grvae/kernels.hpp"

namespace grvae {

// ---------------------------------------------------------------------------
// Tape plumbing

const Tensor& Var::value() const { return tape_->value(id_); }

const Tensor& Gradients::operator[](const Var& v) const {
  auto it = grads_.find(v.id());
  if (it == grads_.end()) throw std::out_of_range("gradients: var is not a parameter");
  return it->second;
}

const Tensor& BackwardContext::out() const { return tape_.value(self_); }
const Tensor& BackwardContext::value(std::size_t id) const { return tape_.value(id); }
bool BackwardContext::wants(std::size_t id) const { return tape_.requires_grad(id); }

Tensor& BackwardContext::adjoint(std::size_t id) {
  Tensor& a = adj_[id];
  if (a.shape() != tape_.value(id).shape() || a.size() != tape_.value(id).size())
    a = Tensor(tape_.value(id).shape(), 0.0);
  return a;
}

Var Tape::constant(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, false, false});
  return Var(this, nodes_.size() - 1);
}

Var Tape::parameter(Tensor value) {
  nodes_.push_back(Node{std::move(value), {}, nullptr, true, true});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::vector<std::size_t> parents, BackwardFn backward) {
  bool needs = false;
  for (std::size_t p : parents) needs = needs || nodes_[p].requires_grad;
  if (!needs) backward = nullptr;
  nodes_.push_back(Node{std::move(value), std::move(parents), std::move(backward), needs, false});
  return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(const Var& root) {
  if (&root.tape() != this) throw std::invalid_argument("backward: var belongs to another tape");
  const Tensor& rv = nodes_[root.id()].value;
  if (rv.size() != 1)
    throw ShapeError("backward: root must be scalar, got " + shape_str(rv.shape()));

  // Default-constructed adjoints are rank-0 placeholders; BackwardContext
  // replaces them with zeros of the right shape on first touch.
  std::vector<Tensor> adj(root.id() + 1);
  std::vector<bool> touched(root.id() + 1, false);
  adj[root.id()] = Tensor(rv.shape(), 1.0);
  touched[root.id()] = true;

  BackwardContext ctx(*this, adj);
  for (std::size_t id = root.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!touched[id] || !node.backward) continue;
    ctx.grad_ = &adj[id];
    ctx.self_ = id;
    for (std::size_t p : node.parents)
      if (nodes_[p].requires_grad && !touched[p]) {
        adj[p] = Tensor(nodes_[p].value.shape(), 0.0);
        touched[p] = true;
      }
    node.backward(ctx);
  }

  Gradients out;
  for (std::size_t id = 0; id <= root.id(); ++id) {
    if (!nodes_[id].trainable) continue;
    out.grads_.emplace(id, touched[id] ? std::move(adj[id])
                                       : Tensor(nodes_[id].value.shape(), 0.0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Broadcasting

namespace {

struct BroadcastPlan {
  enum class Kind { kSame, kScalarA, kScalarB, kGeneral };
  Kind kind = Kind::kSame;
  Shape out;
  // Per output element, the source offsets (general case only).
  std::shared_ptr<std::vector<std::size_t>> ia, ib;

  std::size_t a_at(std::size_t p) const {
    switch (kind) {
      case Kind::kSame:
      case Kind::kScalarB:
        return p;
      case Kind::kScalarA:
        return 0;
      default:
        return (*ia)[p];
    }
  }
  std::size_t b_at(std::size_t p) const {
    switch (kind) {
      case Kind::kSame:
      case Kind::kScalarA:
        return p;
      case Kind::kScalarB:
        return 0;
      default:
        return (*ib)[p];
    }
  }
};

[[noreturn]] void mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) + " and " +
                   shape_str(b));
}

BroadcastPlan plan_broadcast(const char* op, const Shape& a, const Shape& b) {
  BroadcastPlan plan;
  if (a == b) {
    plan.out = a;
    return plan;
  }
  const std::size_t na = shape_size(a), nb = shape_size(b);
  const std::size_t rank = std::max(a.size(), b.size());
  Shape out(rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t da = i < rank - a.size() ? 1 : a[i - (rank - a.size())];
    const std::size_t db = i < rank - b.size() ? 1 : b[i - (rank - b.size())];
    if (da != db && da != 1 && db != 1) mismatch(op, a, b);
    out[i] = std::max(da, db);
  }
  plan.out = out;
  if (nb == 1 && shape_size(out) == na) {
    plan.kind = BroadcastPlan::Kind::kScalarB;
    return plan;
  }
  if (na == 1 && shape_size(out) == nb) {
    plan.kind = BroadcastPlan::Kind::kScalarA;
    return plan;
  }
  plan.kind = BroadcastPlan::Kind::kGeneral;
  auto strides = [&](const Shape& s) {
    std::vector<std::size_t> st(rank, 0);
    std::size_t acc = 1;
    for (std::size_t i = s.size(); i-- > 0;) {
      const std::size_t axis = i + (rank - s.size());
      st[axis] = s[i] == 1 ? 0 : acc;
      acc *= s[i];
    }
    return st;
  };
  const auto sa = strides(a), sb = strides(b);
  const std::size_t n = shape_size(out);
  plan.ia = std::make_shared<std::vector<std::size_t>>(n);
  plan.ib = std::make_shared<std::vector<std::size_t>>(n);
  std::vector<std::size_t> idx(rank, 0);
  std::size_t oa = 0, ob = 0;
  for (std::size_t p = 0; p < n; ++p) {
    (*plan.ia)[p] = oa;
    (*plan.ib)[p] = ob;
    for (std::size_t ax = rank; ax-- > 0;) {
      ++idx[ax];
      oa += sa[ax];
      ob += sb[ax];
      if (idx[ax] < out[ax]) break;
      oa -= sa[ax] * idx[ax];
      ob -= sb[ax] * idx[ax];
      idx[ax] = 0;
    }
  }
  return plan;
}

// Adds g (output-shaped) into an input adjoint, summing over broadcast axes.
void reduce_into(const BroadcastPlan& plan, bool is_a, const Tensor& g, Tensor& adj) {
  const auto gd = g.data();
  auto ad = adj.data();
  if (plan.kind == BroadcastPlan::Kind::kSame ||
      (is_a && plan.kind == BroadcastPlan::Kind::kScalarB) ||
      (!is_a && plan.kind == BroadcastPlan::Kind::kScalarA)) {
    kernels::active().axpy(gd.size(), 1.0, gd.data(), ad.data());
    return;
  }
  for (std::size_t p = 0; p < gd.size(); ++p) ad[is_a ? plan.a_at(p) : plan.b_at(p)] += gd[p];
}

template <class Fwd, class Bwd>
Var unary(const Var& a, Fwd fwd, Bwd bwd) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  const auto xd = x.data();
  auto yd = y.data();
  for (std::size_t i = 0; i < xd.size(); ++i) yd[i] = fwd(xd[i]);
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, bwd](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    const auto xv = ctx.value(ia).data();
    const auto yv = ctx.out().data();
    auto ad = ctx.adjoint(ia).data();
    for (std::size_t i = 0; i < gd.size(); ++i) ad[i] += bwd(xv[i], yv[i], gd[i]);
  });
}

void same_tape(const char* op, const Var& a, const Var& b) {
  if (&a.tape() != &b.tape()) throw std::invalid_argument(std::string(op) + ": vars on different tapes");
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementwise

Var add(const Var& a, const Var& b) {
  same_tape("add", a, b);
  auto plan = plan_broadcast("add", a.shape(), b.shape());
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(plan.out);
  auto yd = y.data();
  if (plan.kind == BroadcastPlan::Kind::kSame) {
    kernels::active().add(yd.size(), x.data().data(), z.data().data(), yd.data());
  } else {
    for (std::size_t p = 0; p < yd.size(); ++p) yd[p] = x[plan.a_at(p)] + z[plan.b_at(p)];
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {ia, ib}, [plan, ia, ib](BackwardContext& ctx) {
    if (ctx.wants(ia)) reduce_into(plan, true, ctx.grad(), ctx.adjoint(ia));
    if (ctx.wants(ib)) reduce_into(plan, false, ctx.grad(), ctx.adjoint(ib));
  });
}

Var sub(const Var& a, const Var& b) {
  same_tape("sub", a, b);
  auto plan = plan_broadcast("sub", a.shape(), b.shape());
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(plan.out);
  auto yd = y.data();
  for (std::size_t p = 0; p < yd.size(); ++p) yd[p] = x[plan.a_at(p)] - z[plan.b_at(p)];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {ia, ib}, [plan, ia, ib](BackwardContext& ctx) {
    if (ctx.wants(ia)) reduce_into(plan, true, ctx.grad(), ctx.adjoint(ia));
    if (ctx.wants(ib)) {
      Tensor neg_g = ctx.grad();
      for (double& v : neg_g.data()) v = -v;
      reduce_into(plan, false, neg_g, ctx.adjoint(ib));
    }
  });
}

Var mul(const Var& a, const Var& b) {
  same_tape("mul", a, b);
  auto plan = plan_broadcast("mul", a.shape(), b.shape());
  const Tensor& x = a.value();
  const Tensor& z = b.value();
  Tensor y(plan.out);
  auto yd = y.data();
  if (plan.kind == BroadcastPlan::Kind::kSame) {
    kernels::active().mul(yd.size(), x.data().data(), z.data().data(), yd.data());
  } else {
    for (std::size_t p = 0; p < yd.size(); ++p) yd[p] = x[plan.a_at(p)] * z[plan.b_at(p)];
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(std::move(y), {ia, ib}, [plan, ia, ib](BackwardContext& ctx) {
    const Tensor& g = ctx.grad();
    const auto gd = g.data();
    const Tensor& xv = ctx.value(ia);
    const Tensor& zv = ctx.value(ib);
    if (plan.kind == BroadcastPlan::Kind::kSame) {
      const auto& k = kernels::active();
      Tensor tmp(g.shape());
      if (ctx.wants(ia)) {
        k.mul(gd.size(), gd.data(), zv.data().data(), tmp.data().data());
        k.axpy(gd.size(), 1.0, tmp.data().data(), ctx.adjoint(ia).data().data());
      }
      if (ctx.wants(ib)) {
        k.mul(gd.size(), gd.data(), xv.data().data(), tmp.data().data());
        k.axpy(gd.size(), 1.0, tmp.data().data(), ctx.adjoint(ib).data().data());
      }
      return;
    }
    if (ctx.wants(ia)) {
      auto ad = ctx.adjoint(ia).data();
      for (std::size_t p = 0; p < gd.size(); ++p) ad[plan.a_at(p)] += gd[p] * zv[plan.b_at(p)];
    }
    if (ctx.wants(ib)) {
      auto bd = ctx.adjoint(ib).data();
      for (std::size_t p = 0; p < gd.size(); ++p) bd[plan.b_at(p)] += gd[p] * xv[plan.a_at(p)];
    }
  });
}

Var add_scalar(const Var& a, double c) {
  return unary(a, [c](double x) { return x + c; },
               [](double, double, double g) { return g; });
}

Var mul_scalar(const Var& a, double c) {
  return unary(a, [c](double x) { return x * c; },
               [c](double, double, double g) { return g * c; });
}

Var neg(const Var& a) { return mul_scalar(a, -1.0); }

Var exp(const Var& a) {
  return unary(a, [](double x) { return std::exp(x); },
               [](double, double y, double g) { return g * y; });
}

Var log(const Var& a) {
  return unary(a, [](double x) { return std::log(std::max(x, kLogClamp)); },
               [](double x, double, double g) { return x > kLogClamp ? g / x : 0.0; });
}

Var sigmoid(const Var& a, double scale, double shift) {
  return unary(
      a,
      [scale, shift](double x) {
        const double t = scale * (x - shift);
        if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
        const double e = std::exp(t);
        return e / (1.0 + e);
      },
      [scale](double, double y, double g) { return g * scale * y * (1.0 - y); });
}

Var relu(const Var& a) {
  return unary(a, [](double x) { return x > 0 ? x : 0.0; },
               [](double x, double, double g) { return x > 0 ? g : 0.0; });
}

Var ramp(const Var& a) { return relu(a); }

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; },
               [](double x, double, double g) { return 2.0 * x * g; });
}

Var sqrt(const Var& a) {
  return unary(a, [](double x) { return std::sqrt(x); },
               [](double, double y, double g) { return g / (2.0 * y); });
}

// ---------------------------------------------------------------------------
// Structural

Var matmul(const Var& a, const Var& b) {
  same_tape("matmul", a, b);
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa.size() < 2 || sb.size() < 2) mismatch("matmul", sa, sb);
  const std::size_t k = sa.back();
  const std::size_t n = sb.back();
  std::size_t batch = 1, m = 0;
  bool batched = false;
  if (sb.size() == 2) {
    if (sb[0] != k) mismatch("matmul", sa, sb);
    m = shape_size(sa) / k;
  } else {
    if (sa.size() != sb.size() || sb[sb.size() - 2] != k ||
        !std::equal(sa.begin(), sa.end() - 2, sb.begin()))
      mismatch("matmul", sa, sb);
    batched = true;
    m = sa[sa.size() - 2];
    batch = shape_size(sa) / (m * k);
  }
  Shape out_shape(sa.begin(), sa.end() - 1);
  out_shape.push_back(n);
  Tensor y(out_shape, 0.0);
  const auto& kt = kernels::active();
  const double* ap = a.value().data().data();
  const double* bp = b.value().data().data();
  double* yp = y.data().data();
  for (std::size_t s = 0; s < batch; ++s)
    kt.gemm_nn(m, n, k, ap + s * m * k, bp + (batched ? s * k * n : 0), yp + s * m * n);

  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(y), {ia, ib}, [ia, ib, batch, m, n, k, batched](BackwardContext& ctx) {
        const auto& kt = kernels::active();
        const double* gp = ctx.grad().data().data();
        const double* av = ctx.value(ia).data().data();
        const double* bv = ctx.value(ib).data().data();
        const std::size_t bstride = batched ? k * n : 0;
        if (ctx.wants(ia)) {
          double* da = ctx.adjoint(ia).data().data();
          for (std::size_t s = 0; s < batch; ++s)
            kt.gemm_nt(m, k, n, gp + s * m * n, bv + s * bstride, da + s * m * k);
        }
        if (ctx.wants(ib)) {
          double* db = ctx.adjoint(ib).data().data();
          for (std::size_t s = 0; s < batch; ++s)
            kt.gemm_tn(k, n, m, av + s * m * k, gp + s * m * n, db + s * bstride);
        }
      });
}

Var transpose(const Var& a) {
  const Shape& sa = a.shape();
  if (sa.size() < 2) throw ShapeError("transpose: needs rank >= 2, got " + shape_str(sa));
  const std::size_t r = sa[sa.size() - 2], c = sa.back();
  const std::size_t batch = shape_size(sa) / (r * c);
  Shape out_shape = sa;
  std::swap(out_shape[sa.size() - 2], out_shape[sa.size() - 1]);
  const auto xd = a.value().data();
  Tensor y(out_shape);
  auto yd = y.data();
  for (std::size_t s = 0; s < batch; ++s)
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) yd[s * r * c + j * r + i] = xd[s * r * c + i * c + j];
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, batch, r, c](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    auto ad = ctx.adjoint(ia).data();
    for (std::size_t s = 0; s < batch; ++s)
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) ad[s * r * c + i * c + j] += gd[s * r * c + j * r + i];
  });
}

Var reshape(const Var& a, Shape shape) {
  if (shape_size(shape) != a.value().size())
    throw ShapeError("reshape: cannot view " + shape_str(a.shape()) + " as " + shape_str(shape));
  const std::size_t ia = a.id();
  return a.tape().record(a.value().reshaped(std::move(shape)), {ia}, [ia](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    kernels::active().axpy(gd.size(), 1.0, gd.data(), ctx.adjoint(ia).data().data());
  });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(Tensor::scalar(s), {ia}, [ia](BackwardContext& ctx) {
    const double g = ctx.grad()[0];
    for (double& v : ctx.adjoint(ia).data()) v += g;
  });
}

Var mean(const Var& a) { return mul_scalar(sum(a), 1.0 / static_cast<double>(a.value().size())); }

Var sum_last(const Var& a) {
  const Shape& sa = a.shape();
  if (sa.empty()) throw ShapeError("sum_last: needs rank >= 1, got " + shape_str(sa));
  const std::size_t n = sa.back();
  const std::size_t rows = shape_size(sa) / n;
  Tensor y(Shape(sa.begin(), sa.end() - 1));
  const auto xd = a.value().data();
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += xd[r * n + j];
    y[r] = s;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, rows, n](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    auto ad = ctx.adjoint(ia).data();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t j = 0; j < n; ++j) ad[r * n + j] += gd[r];
  });
}

Var softmax(const Var& a) {
  const Shape& sa = a.shape();
  if (sa.empty()) throw ShapeError("softmax: needs rank >= 1, got " + shape_str(sa));
  const std::size_t n = sa.back();
  const std::size_t rows = shape_size(sa) / n;
  const auto xd = a.value().data();
  Tensor y(sa);
  auto yd = y.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = xd.data() + r * n;
    double* o = yd.data() + r * n;
    const double mx = *std::max_element(x, x + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) z += (o[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < n; ++j) o[j] /= z;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, rows, n](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    const auto yv = ctx.out().data();
    auto ad = ctx.adjoint(ia).data();
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t o = r * n;
      double dotp = 0.0;
      for (std::size_t j = 0; j < n; ++j) dotp += gd[o + j] * yv[o + j];
      for (std::size_t j = 0; j < n; ++j) ad[o + j] += yv[o + j] * (gd[o + j] - dotp);
    }
  });
}

Var gather(const Var& a, std::shared_ptr<const std::vector<std::ptrdiff_t>> index,
           Shape shape) {
  if (!index || index->size() != shape_size(shape))
    throw ShapeError("gather: index count does not match output shape " + shape_str(shape));
  const auto xd = a.value().data();
  const auto limit = static_cast<std::ptrdiff_t>(xd.size());
  Tensor y(std::move(shape));
  auto yd = y.data();
  for (std::size_t p = 0; p < yd.size(); ++p) {
    const std::ptrdiff_t src = (*index)[p];
    if (src >= limit)
      throw ShapeError("gather: source index " + std::to_string(src) + " outside " +
                       shape_str(a.shape()));
    yd[p] = src >= 0 ? xd[static_cast<std::size_t>(src)] : 0.0;
  }
  const std::size_t ia = a.id();
  return a.tape().record(std::move(y), {ia}, [ia, index](BackwardContext& ctx) {
    const auto gd = ctx.grad().data();
    auto ad = ctx.adjoint(ia).data();
    for (std::size_t p = 0; p < gd.size(); ++p) {
      const std::ptrdiff_t src = (*index)[p];
      if (src >= 0) ad[static_cast<std::size_t>(src)] += gd[p];
    }
  });
}

}  // namespace grvae
