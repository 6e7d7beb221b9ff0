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

// Graph VAE with MLP encoder and decoder and a trainable Gaussian prior.
//
// The encoder reads row i of [F | E(i,:,:) unfolded] for every node, flattened
// to one vector of N((1+d)+N(1+t)) values. The decoder emits one logit vector
// per node row and per upper-triangle edge fiber; softmax turns them into a
// GraphProb whose lower triangle mirrors the upper one.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "grvae/constraints.hpp"
#include "grvae/graph.hpp"
#include "grvae/penalties.hpp"
#include "grvae/tape.hpp"

namespace grvae {

// Standard deviations (posterior and prior) never drop below this.
inline constexpr double kMinStd = 1e-4;

struct ModelConfig {
  GraphSchema schema;
  std::size_t latent_dim = 32;
  std::vector<std::size_t> hidden = {256, 256};
  bool trainable_prior = true;

  std::size_t input_dim() const;
  std::size_t output_dim() const;
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Named parameter tensors:
//   enc.w<i>, enc.b<i>   hidden layers, i = 0 .. hidden.size()-1
//   enc.mu.w, enc.mu.b, enc.logvar.w, enc.logvar.b
//   dec.w<i>, dec.b<i>, dec.out.w, dec.out.b
//   prior.mean, prior.logvar
// Weights are (in, out) and act on row vectors.
using ParamMap = std::map<std::string, Tensor>;

struct Vae {
  ModelConfig config;
  ParamMap params;

  // Shapes of every parameter for the configuration, in name order.
  static std::map<std::string, Shape> layout(const ModelConfig& config);

  // Throws ConfigError when a parameter is missing, extra or misshaped.
  void check() const;
};

// Parameters placed on a tape.
struct BoundVae {
  const Vae* vae = nullptr;
  std::map<std::string, Var> vars;

  const Var& operator[](const std::string& name) const { return vars.at(name); }
};

// trainable=false puts every parameter on the tape as a constant. With
// trainable=true the prior still becomes a constant unless trainable_prior.
BoundVae bind(Tape& tape, const Vae& vae, bool trainable);

// Encoder input rows: (B, input_dim).
Tensor encoder_input(const std::vector<GraphOneHot>& graphs, const ModelConfig& config);

struct Posterior {
  Var mean;    // (B, L)
  Var logvar;  // (B, L), floored
};
Posterior encode(const BoundVae& m, const Var& input);

struct Decoded {
  ProbGraphVar graph;  // nodes (B,N,1+d), edges (B,N,N,1+t)
  Var upper;           // upper-triangle fibers (B, P, 1+t), i<j row-major
};
Decoded decode(const BoundVae& m, const Var& z);

// Floored prior log-variance (L).
Var prior_logvar(const BoundVae& m);

// mean + exp(logvar / 2) * eps; eps is (B, L) standard normal noise.
Var reparameterize(const Var& mean, const Var& logvar, const Tensor& eps);

// Closed-form KL(N(mean, exp(logvar)) || N(prior mean, prior var)) per row: (B).
Var kl_divergence(const Var& mean, const Var& logvar, const Var& prior_mean,
                  const Var& prior_logvar);

// Log-likelihood of each graph under its decoded model, upper triangle only: (B).
Var reconstruction(const Decoded& d, const std::vector<GraphOneHot>& graphs);

// Standard normal draws, posterior noise first.
struct LossNoise {
  Tensor posterior;  // (B, L)
  Tensor prior;      // (S, L)

  static LossNoise draw(Rng& rng, std::size_t batch, std::size_t synthetic, std::size_t latent);
};

Tensor standard_normal(Rng& rng, std::size_t rows, std::size_t cols);

struct LossTerms {
  Var total;      // KL-weighted neg_elbo + regularizer
  Var neg_elbo;   // batch mean of -ELBO
  Var regularizer;  // weighted penalty sum divided by the synthetic count
};

// Mean -ELBO over the batch plus the weighted ramped penalties of decoded
// synthetic latents drawn from the prior, averaged over those latents. The
// synthetic decode is skipped when the regularizer is inactive. kl_weight
// scales the KL term of the optimized total only.
LossTerms regularized_loss(const BoundVae& m, const std::vector<GraphOneHot>& graphs,
                           const ConstraintSpec& spec, const Regularizer& reg,
                           const LossNoise& noise, double kl_weight = 1.0);

// Value-level helpers over frozen parameters.
std::pair<Tensor, Tensor> encode(const Vae& vae, const GraphOneHot& g);  // mean, variance
GraphProb decode(const Vae& vae, const Tensor& z);                       // z: (L)
std::vector<GraphProb> decode_batch(const Vae& vae, const Tensor& z);    // z: (S, L)
// Prior draws (count, L).
Tensor sample_prior(const Vae& vae, Rng& rng, std::size_t count);
// One-sample ELBO estimate.
double elbo(const Vae& vae, const GraphOneHot& g, Rng& rng);

}  // namespace grvae
