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

#include "grvae/vae.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "grvae/errors.hpp"

namespace grvae {
namespace {

const double kLogvarFloor = 2.0 * std::log(kMinStd);

Var floored(const Var& logvar) { return ramp(logvar - kLogvarFloor) + kLogvarFloor; }

Var dense(const BoundVae& m, const Var& x, const std::string& w, const std::string& b) {
  return matmul(x, m[w]) + m[b];
}

Var hidden_layer(const BoundVae& m, const Var& x, const std::string& side, std::size_t i) {
  const std::string k = std::to_string(i);
  return relu(dense(m, x, side + ".w" + k, side + ".b" + k));
}

}  // namespace

std::size_t ModelConfig::input_dim() const {
  const std::size_t n = schema.max_nodes;
  return n * (schema.node_channels() + n * schema.edge_channels());
}

std::size_t ModelConfig::output_dim() const {
  return schema.max_nodes * schema.node_channels() + schema.pair_count() * schema.edge_channels();
}

void ModelConfig::validate() const {
  schema.validate();
  if (latent_dim == 0) throw ConfigError("model.latent_dim must be >= 1");
  for (std::size_t h : hidden)
    if (h == 0) throw ConfigError("model.hidden: layer widths must be >= 1");
}

std::map<std::string, Shape> Vae::layout(const ModelConfig& c) {
  std::map<std::string, Shape> out;
  const std::size_t l = c.latent_dim;
  auto stack = [&](const std::string& side, std::size_t in) {
    for (std::size_t i = 0; i < c.hidden.size(); ++i) {
      out[side + ".w" + std::to_string(i)] = {in, c.hidden[i]};
      out[side + ".b" + std::to_string(i)] = {c.hidden[i]};
      in = c.hidden[i];
    }
    return in;
  };
  const std::size_t enc = stack("enc", c.input_dim());
  out["enc.mu.w"] = {enc, l};
  out["enc.mu.b"] = {l};
  out["enc.logvar.w"] = {enc, l};
  out["enc.logvar.b"] = {l};
  const std::size_t dec = stack("dec", l);
  out["dec.out.w"] = {dec, c.output_dim()};
  out["dec.out.b"] = {c.output_dim()};
  out["prior.mean"] = {l};
  out["prior.logvar"] = {l};
  return out;
}

void Vae::check() const {
  config.validate();
  const auto shapes = layout(config);
  if (shapes.size() != params.size())
    throw ConfigError("model parameters: expected " + std::to_string(shapes.size()) + " tensors, got " +
                      std::to_string(params.size()));
  for (const auto& [name, shape] : shapes) {
    auto it = params.find(name);
    if (it == params.end()) throw ConfigError("model parameters: missing '" + name + "'");
    if (it->second.shape() != shape)
      throw ConfigError("model parameters: '" + name + "' has shape " + shape_str(it->second.shape()) +
                        ", expected " + shape_str(shape));
  }
}

BoundVae bind(Tape& tape, const Vae& vae, bool trainable) {
  BoundVae m{&vae, {}};
  for (const auto& [name, value] : vae.params) {
    const bool prior = name.starts_with("prior.");
    const bool learn = trainable && (!prior || vae.config.trainable_prior);
    m.vars.emplace(name, learn ? tape.parameter(value) : tape.constant(value));
  }
  return m;
}

Tensor encoder_input(const std::vector<GraphOneHot>& graphs, const ModelConfig& config) {
  const GraphSchema& s = config.schema;
  const std::size_t n = s.max_nodes, dc = s.node_channels(), tc = s.edge_channels();
  const std::size_t row = dc + n * tc, width = config.input_dim();
  Tensor x({graphs.size(), width}, 0.0);
  for (std::size_t b = 0; b < graphs.size(); ++b) {
    const GraphOneHot& g = graphs[b];
    if (!(g.schema() == s)) throw ConfigError("encoder input: graph schema does not match the model");
    double* base = x.data().data() + b * width;
    for (std::size_t i = 0; i < n; ++i) {
      base[i * row + static_cast<std::size_t>(g.label(i))] = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        base[i * row + dc + j * tc + static_cast<std::size_t>(g.edge(i, j))] = 1.0;
    }
  }
  return x;
}

Posterior encode(const BoundVae& m, const Var& input) {
  Var h = input;
  for (std::size_t i = 0; i < m.vae->config.hidden.size(); ++i)
    h = hidden_layer(m, h, "enc", i);
  return {dense(m, h, "enc.mu.w", "enc.mu.b"), floored(dense(m, h, "enc.logvar.w", "enc.logvar.b"))};
}

Decoded decode(const BoundVae& m, const Var& z) {
  const ModelConfig& c = m.vae->config;
  const std::size_t b = z.shape()[0];
  const std::size_t n = c.schema.max_nodes, dc = c.schema.node_channels(), tc = c.schema.edge_channels();
  const std::size_t p = c.schema.pair_count(), out = c.output_dim();

  Var h = z;
  for (std::size_t i = 0; i < c.hidden.size(); ++i) h = hidden_layer(m, h, "dec", i);
  Var logits = dense(m, h, "dec.out.w", "dec.out.b");

  auto node_idx = std::make_shared<std::vector<std::ptrdiff_t>>(b * n * dc);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t q = 0; q < n * dc; ++q)
      (*node_idx)[r * n * dc + q] = static_cast<std::ptrdiff_t>(r * out + q);
  Var nodes = softmax(gather(logits, node_idx, {b, n, dc}));

  Tape& tape = z.tape();
  Tensor diag({n, n, tc}, 0.0);
  for (std::size_t i = 0; i < n; ++i) diag[(i * n + i) * tc] = 1.0;

  Decoded d;
  if (p == 0) {
    Tensor edges({b, n, n, tc});
    for (std::size_t r = 0; r < b; ++r) std::copy(diag.data().begin(), diag.data().end(), edges.data().begin() + r * n * n * tc);
    d.graph = {nodes, tape.constant(std::move(edges))};
    return d;
  }
  auto upper_idx = std::make_shared<std::vector<std::ptrdiff_t>>(b * p * tc);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t q = 0; q < p * tc; ++q)
      (*upper_idx)[r * p * tc + q] = static_cast<std::ptrdiff_t>(r * out + n * dc + q);
  d.upper = softmax(gather(logits, upper_idx, {b, p, tc}));

  std::vector<std::size_t> pair(n * n, 0);
  for (std::size_t i = 0, k = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++k) pair[i * n + j] = pair[j * n + i] = k;
  auto full_idx = std::make_shared<std::vector<std::ptrdiff_t>>(b * n * n * tc, -1);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        for (std::size_t k = 0; k < tc; ++k)
          (*full_idx)[((r * n + i) * n + j) * tc + k] =
              static_cast<std::ptrdiff_t>((r * p + pair[i * n + j]) * tc + k);
      }
  Var edges = gather(d.upper, full_idx, {b, n, n, tc}) + tape.constant(std::move(diag));
  d.graph = {nodes, edges};
  return d;
}

Var prior_logvar(const BoundVae& m) { return floored(m["prior.logvar"]); }

Var reparameterize(const Var& mean, const Var& logvar, const Tensor& eps) {
  if (eps.shape() != mean.shape())
    throw ShapeError("reparameterize: noise shape " + shape_str(eps.shape()) + " vs mean shape " +
                     shape_str(mean.shape()));
  return mean + exp(logvar * 0.5) * mean.tape().constant(eps);
}

Var kl_divergence(const Var& mean, const Var& logvar, const Var& prior_mean, const Var& prior_lv) {
  // 1/2 sum [log s2 - log sigma2 + (sigma2 + (mu - m)^2) / s2 - 1]
  Var inv = exp(-prior_lv);
  Var term = prior_lv - logvar + exp(logvar - prior_lv) + square(mean - prior_mean) * inv - 1.0;
  return sum_last(term) * 0.5;
}

Var reconstruction(const Decoded& d, const std::vector<GraphOneHot>& graphs) {
  Tape& tape = d.graph.nodes.tape();
  const std::size_t b = graphs.size();
  const std::size_t n = d.graph.max_nodes(), dc = d.graph.nodes.shape()[2];
  if (d.graph.batch() != b) throw ShapeError("reconstruction: batch size mismatch");
  Tensor f({b, n, dc}, 0.0);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t i = 0; i < n; ++i) f[(r * n + i) * dc + static_cast<std::size_t>(graphs[r].label(i))] = 1.0;
  Var ll = sum_last(reshape(log(d.graph.nodes) * tape.constant(std::move(f)), {b, n * dc}));
  if (!d.upper.valid()) return ll;
  const std::size_t p = d.upper.shape()[1], tc = d.upper.shape()[2];
  Tensor e({b, p, tc}, 0.0);
  for (std::size_t r = 0; r < b; ++r)
    for (std::size_t i = 0, k = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j, ++k)
        e[(r * p + k) * tc + static_cast<std::size_t>(graphs[r].edge(i, j))] = 1.0;
  return ll + sum_last(reshape(log(d.upper) * tape.constant(std::move(e)), {b, p * tc}));
}

Tensor standard_normal(Rng& rng, std::size_t rows, std::size_t cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Tensor t({rows, cols});
  for (double& v : t.data()) v = normal(rng);
  return t;
}

LossNoise LossNoise::draw(Rng& rng, std::size_t batch, std::size_t synthetic, std::size_t latent) {
  LossNoise noise;
  noise.posterior = standard_normal(rng, batch, latent);
  noise.prior = standard_normal(rng, synthetic, latent);
  return noise;
}

LossTerms regularized_loss(const BoundVae& m, const std::vector<GraphOneHot>& graphs,
                           const ConstraintSpec& spec, const Regularizer& reg, const LossNoise& noise,
                           double kl_weight) {
  if (graphs.empty()) throw std::invalid_argument("regularized_loss: empty batch");
  Tape& tape = m["prior.mean"].tape();
  Var x = tape.constant(encoder_input(graphs, m.vae->config));
  Posterior post = encode(m, x);
  Var plv = prior_logvar(m);
  Var z = reparameterize(post.mean, post.logvar, noise.posterior);
  Decoded d = decode(m, z);
  Var kl = kl_divergence(post.mean, post.logvar, m["prior.mean"], plv);
  Var recon = reconstruction(d, graphs);
  Var neg_elbo = mean(kl - recon);
  Var objective = kl_weight == 1.0 ? neg_elbo : mean(kl * kl_weight - recon);

  LossTerms terms{objective, neg_elbo, tape.constant(Tensor::scalar(0.0))};
  if (!reg.active()) return terms;
  const std::size_t s = noise.prior.dim(0);
  Var syn = m["prior.mean"] + exp(plv * 0.5) * tape.constant(noise.prior);
  Decoded ds = decode(m, syn);
  terms.regularizer = total_regularizer(ds.graph, spec, reg) * (1.0 / static_cast<double>(s));
  terms.total = objective + terms.regularizer;
  return terms;
}

std::pair<Tensor, Tensor> encode(const Vae& vae, const GraphOneHot& g) {
  Tape tape;
  BoundVae m = bind(tape, vae, false);
  Posterior p = encode(m, tape.constant(encoder_input({g}, vae.config)));
  const std::size_t l = vae.config.latent_dim;
  Tensor var = exp(p.logvar).value().reshaped({l});
  return {p.mean.value().reshaped({l}), std::move(var)};
}

std::vector<GraphProb> decode_batch(const Vae& vae, const Tensor& z) {
  const ModelConfig& c = vae.config;
  if (z.rank() != 2 || z.dim(1) != c.latent_dim)
    throw ShapeError("decode: expected latents (S, " + std::to_string(c.latent_dim) + "), got " +
                     shape_str(z.shape()));
  Tape tape;
  BoundVae m = bind(tape, vae, false);
  return unstack(decode(m, tape.constant(z)).graph, c.schema);
}

GraphProb decode(const Vae& vae, const Tensor& z) {
  if (z.rank() != 1) throw ShapeError("decode: expected a latent vector, got " + shape_str(z.shape()));
  return decode_batch(vae, z.reshaped({1, z.size()})).front();
}

Tensor sample_prior(const Vae& vae, Rng& rng, std::size_t count) {
  Tape tape;
  BoundVae m = bind(tape, vae, false);
  Tensor eps = standard_normal(rng, count, vae.config.latent_dim);
  return (m["prior.mean"] + exp(prior_logvar(m) * 0.5) * tape.constant(std::move(eps))).value();
}

double elbo(const Vae& vae, const GraphOneHot& g, Rng& rng) {
  Tape tape;
  BoundVae m = bind(tape, vae, false);
  Posterior post = encode(m, tape.constant(encoder_input({g}, vae.config)));
  Var z = reparameterize(post.mean, post.logvar, standard_normal(rng, 1, vae.config.latent_dim));
  Decoded d = decode(m, z);
  Var kl = kl_divergence(post.mean, post.logvar, m["prior.mean"], prior_logvar(m));
  return (reconstruction(d, {g}) - kl).value().item();
}

}  // namespace grvae
