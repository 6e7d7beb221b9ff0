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

#include "grvae/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "grvae/errors.hpp"

namespace grvae {

std::string_view optimizer_name(Optimizer o) {
  switch (o) {
    case Optimizer::kSgd: return "sgd";
    case Optimizer::kMomentum: return "momentum";
    case Optimizer::kAdam: return "adam";
  }
  return "?";
}

Optimizer parse_optimizer(std::string_view name) {
  if (name == "sgd") return Optimizer::kSgd;
  if (name == "momentum") return Optimizer::kMomentum;
  if (name == "adam") return Optimizer::kAdam;
  throw ConfigError("train.optimizer: unknown '" + std::string(name) + "' (expected sgd|momentum|adam)");
}

std::string_view synthetic_name(SyntheticPolicy p) {
  return p == SyntheticPolicy::kPerExample ? "per-example" : "per-batch";
}

SyntheticPolicy parse_synthetic(std::string_view name) {
  if (name == "per-example") return SyntheticPolicy::kPerExample;
  if (name == "per-batch") return SyntheticPolicy::kPerBatch;
  throw ConfigError("train.synthetic: unknown '" + std::string(name) + "' (expected per-example|per-batch)");
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (!(init_scale > 0.0)) throw ConfigError("train.init_scale must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("train.momentum must lie in [0, 1)");
  if (!(clip_norm >= 0.0)) throw ConfigError("train.clip_norm must be >= 0");
}

double TrainConfig::kl_weight(std::size_t epoch) const {
  if (kl_warmup_epochs == 0 || epoch >= kl_warmup_epochs) return 1.0;
  return static_cast<double>(epoch) / static_cast<double>(kl_warmup_epochs);
}

Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

Vae init_params(const ModelConfig& config, double init_scale, Rng& rng) {
  config.validate();
  std::normal_distribution<double> normal(0.0, init_scale);
  Vae vae{config, {}};
  for (const auto& [name, shape] : Vae::layout(config)) {
    Tensor t(shape, 0.0);
    if (name.find(".w") != std::string::npos)
      for (double& v : t.data()) v = normal(rng);
    vae.params.emplace(name, std::move(t));
  }
  return vae;
}

double mean_neg_elbo(const Vae& vae, const std::vector<GraphOneHot>& data, Rng& rng,
                     std::size_t batch_size) {
  if (data.empty()) throw DataError("mean_neg_elbo: empty dataset");
  const std::size_t l = vae.config.latent_dim;
  double total = 0.0;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    std::vector<GraphOneHot> batch(data.begin() + static_cast<std::ptrdiff_t>(start),
                                   data.begin() + static_cast<std::ptrdiff_t>(end));
    Tape tape;
    BoundVae m = bind(tape, vae, false);
    Posterior post = encode(m, tape.constant(encoder_input(batch, vae.config)));
    Var z = reparameterize(post.mean, post.logvar, standard_normal(rng, batch.size(), l));
    Var kl = kl_divergence(post.mean, post.logvar, m["prior.mean"], prior_logvar(m));
    total += sum(kl - reconstruction(decode(m, z), batch)).value().item();
  }
  return total / static_cast<double>(data.size());
}

ProbeResult probe(const Vae& vae, const Tensor& eps, const ConstraintSpec& spec, const Regularizer& reg,
                  Task task, const ValidityOptions& validity) {
  ProbeResult r;
  if (eps.size() == 0 || eps.rank() != 2 || eps.dim(0) == 0) return r;
  Tape tape;
  BoundVae m = bind(tape, vae, false);
  Var z = m["prior.mean"] + exp(prior_logvar(m) * 0.5) * tape.constant(eps);
  Decoded d = decode(m, z);
  if (reg.any_enabled()) {
    const Tensor& pen = ramped_penalty(d.graph, spec, reg).value();
    r.mean_penalty = std::accumulate(pen.data().begin(), pen.data().end(), 0.0) / static_cast<double>(pen.size());
  }
  std::size_t valid = 0;
  for (const GraphProb& g : unstack(d.graph, vae.config.schema))
    if (is_valid(argmax_decode(g), spec, task, validity)) ++valid;
  r.percent_valid = 100.0 * static_cast<double>(valid) / static_cast<double>(eps.dim(0));
  return r;
}

namespace {

class Updater {
 public:
  explicit Updater(const TrainConfig& c) : c_(c) {}

  void step(ParamMap& params, const std::map<std::string, Tensor>& grads) {
    ++t_;
    for (const auto& [name, g] : grads) {
      std::span<double> p = params.at(name).data();
      std::span<const double> gd = g.data();
      switch (c_.optimizer) {
        case Optimizer::kSgd:
          for (std::size_t i = 0; i < p.size(); ++i) p[i] -= c_.learning_rate * gd[i];
          break;
        case Optimizer::kMomentum: {
          std::span<double> v = slot(first_, name, g.shape());
          for (std::size_t i = 0; i < p.size(); ++i) {
            v[i] = c_.momentum * v[i] + gd[i];
            p[i] -= c_.learning_rate * v[i];
          }
          break;
        }
        case Optimizer::kAdam: {
          constexpr double kBeta2 = 0.999, kEps = 1e-8;
          const double b1 = c_.momentum;
          std::span<double> m = slot(first_, name, g.shape());
          std::span<double> v = slot(second_, name, g.shape());
          const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
          const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
          for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * gd[i];
            v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * gd[i] * gd[i];
            p[i] -= c_.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
          }
          break;
        }
      }
    }
  }

 private:
  static std::span<double> slot(std::map<std::string, Tensor>& state, const std::string& name,
                                const Shape& shape) {
    auto it = state.find(name);
    if (it == state.end()) it = state.emplace(name, Tensor(shape, 0.0)).first;
    return it->second.data();
  }

  const TrainConfig& c_;
  std::size_t t_ = 0;
  std::map<std::string, Tensor> first_, second_;
};

}  // namespace

TrainResult train(const std::vector<GraphOneHot>& data, const TrainSetup& s, const EpochCallback& on_epoch) {
  s.model.validate();
  s.train.validate();
  s.spec.validate(s.model.schema);
  if (data.empty()) throw DataError("train: empty dataset");
  for (std::size_t i = 0; i < data.size(); ++i)
    if (!(data[i].schema() == s.model.schema))
      throw DataError("train: graph " + std::to_string(i) + " does not match the model schema");

  const TrainConfig& c = s.train;
  const std::size_t l = s.model.latent_dim;
  Rng init_rng = derive_rng(c.seed, 1);
  Rng order_rng = derive_rng(c.seed, 2);
  Rng noise_rng = derive_rng(c.seed, 3);
  Rng probe_rng = derive_rng(c.seed, 4);
  Rng eval_rng = derive_rng(c.seed, 5);

  TrainResult result{init_params(s.model, c.init_scale, init_rng), {}};
  Vae& vae = result.vae;
  const Tensor probe_eps = c.probe_samples ? standard_normal(probe_rng, c.probe_samples, l) : Tensor();

  auto finish = [&](EpochRecord r) {
    const ProbeResult p = probe(vae, probe_eps, s.spec, s.regularizer, s.task, s.validity);
    r.probe_valid = p.percent_valid;
    r.probe_penalty = p.mean_penalty;
    result.log.push_back(r);
    if (on_epoch) on_epoch(r, vae);
  };

  {
    EpochRecord r;
    r.neg_elbo = mean_neg_elbo(vae, data, eval_rng, c.batch_size);
    r.loss = r.neg_elbo;
    finish(r);
  }

  Updater updater(c);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= c.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), order_rng);
    double elbo_sum = 0.0, reg_sum = 0.0;
    std::size_t updates = 0;
    for (std::size_t start = 0; start < order.size(); start += c.batch_size) {
      const std::size_t end = std::min(order.size(), start + c.batch_size);
      std::vector<GraphOneHot> batch;
      batch.reserve(end - start);
      for (std::size_t k = start; k < end; ++k) batch.push_back(data[order[k]]);
      const std::size_t synthetic = c.synthetic == SyntheticPolicy::kPerExample ? batch.size() : 1;
      const LossNoise noise = LossNoise::draw(noise_rng, batch.size(), synthetic, l);

      Tape tape;
      BoundVae m = bind(tape, vae, true);
      LossTerms terms = regularized_loss(m, batch, s.spec, s.regularizer, noise, c.kl_weight(epoch));
      const double loss = terms.total.value().item();
      const std::string where = "epoch " + std::to_string(epoch) + ", batch " + std::to_string(updates);
      if (!std::isfinite(loss)) throw TrainingError("non-finite loss at " + where);

      Gradients grads = tape.backward(terms.total);
      std::map<std::string, Tensor> g;
      double norm2 = 0.0;
      for (const auto& [name, var] : m.vars) {
        if (!grads.contains(var)) continue;
        const Tensor& t = grads[var];
        for (double v : t.data()) norm2 += v * v;
        g.emplace(name, t);
      }
      if (!std::isfinite(norm2)) throw TrainingError("non-finite gradient at " + where);
      const double norm = std::sqrt(norm2);
      if (c.clip_norm > 0.0 && norm > c.clip_norm) {
        const double scale = c.clip_norm / norm;
        for (auto& [name, t] : g)
          for (double& v : t.data()) v *= scale;
      }
      updater.step(vae.params, g);

      elbo_sum += terms.neg_elbo.value().item() * static_cast<double>(batch.size());
      reg_sum += terms.regularizer.value().item();
      ++updates;
    }
    for (const auto& [name, t] : vae.params)
      if (!t.all_finite()) throw TrainingError("parameter '" + name + "' became non-finite in epoch " +
                                               std::to_string(epoch));
    EpochRecord r;
    r.epoch = epoch;
    r.neg_elbo = elbo_sum / static_cast<double>(data.size());
    r.regularizer = reg_sum / static_cast<double>(updates);
    r.loss = r.neg_elbo + r.regularizer;
    finish(r);
  }
  return result;
}

}  // namespace grvae
