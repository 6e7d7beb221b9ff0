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

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "grvae/constraints.hpp"
#include "grvae/oracles.hpp"
#include "grvae/vae.hpp"

namespace grvae {

enum class Optimizer { kSgd, kMomentum, kAdam };
std::string_view optimizer_name(Optimizer o);
Optimizer parse_optimizer(std::string_view name);

// How many synthetic prior latents enter the penalty per update.
enum class SyntheticPolicy { kPerExample, kPerBatch };
std::string_view synthetic_name(SyntheticPolicy p);
SyntheticPolicy parse_synthetic(std::string_view name);

struct TrainConfig {
  std::size_t batch_size = 200;
  double learning_rate = 1e-3;
  Optimizer optimizer = Optimizer::kSgd;
  double momentum = 0.9;       // kMomentum; also beta1 of kAdam
  std::size_t epochs = 10;
  double init_scale = 0.02;
  std::uint64_t seed = 0;
  SyntheticPolicy synthetic = SyntheticPolicy::kPerExample;
  std::size_t checkpoint_every = 0;  // epochs; 0 writes only the last state
  double clip_norm = 10.0;           // global gradient norm, 0 disables
  std::size_t probe_samples = 200;
  // KL weight rises linearly to 1 over this many epochs; 0 keeps it at 1.
  std::size_t kl_warmup_epochs = 0;

  double kl_weight(std::size_t epoch) const;

  // Throws ConfigError naming the field.
  void validate() const;
};

// Weights ~ N(0, init_scale^2), biases 0, prior mean 0 and log-variance 0.
Vae init_params(const ModelConfig& config, double init_scale, Rng& rng);

// Independent generator streams derived from one seed.
Rng derive_rng(std::uint64_t seed, std::uint64_t stream);

struct EpochRecord {
  std::size_t epoch = 0;       // 0 is the untrained state
  double neg_elbo = 0.0;       // mean over the epoch's examples
  double regularizer = 0.0;    // mean weighted penalty per update
  double loss = 0.0;
  double probe_valid = 0.0;    // % valid of argmax decodes at fixed prior noise
  double probe_penalty = 0.0;  // mean unweighted ramped penalty at the same latents
};

struct TrainSetup {
  ModelConfig model;
  TrainConfig train;
  ConstraintSpec spec;
  Regularizer regularizer;
  Task task = Task::kCompatibility;
  ValidityOptions validity;
};

// Called after every epoch (and once for epoch 0) with the current state.
using EpochCallback = std::function<void(const EpochRecord&, const Vae&)>;

struct TrainResult {
  Vae vae;
  std::vector<EpochRecord> log;
};

// Shuffled mini-batch descent on the regularized loss. Throws TrainingError
// on a non-finite loss or gradient; the callback has then already seen the
// last finite state.
TrainResult train(const std::vector<GraphOneHot>& data, const TrainSetup& setup,
                  const EpochCallback& on_epoch = {});

// Dataset mean of -ELBO at fixed noise drawn from rng.
double mean_neg_elbo(const Vae& vae, const std::vector<GraphOneHot>& data, Rng& rng,
                     std::size_t batch_size = 200);

// Probe metrics at prior latents mean + std * eps.
struct ProbeResult {
  double percent_valid = 0.0;
  double mean_penalty = 0.0;
};
ProbeResult probe(const Vae& vae, const Tensor& eps, const ConstraintSpec& spec, const Regularizer& reg,
                  Task task, const ValidityOptions& validity = {});

}  // namespace grvae
