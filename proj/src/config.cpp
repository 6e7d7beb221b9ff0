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

#include "grvae/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

#include "grvae/errors.hpp"
#include "json_codec.hpp"

namespace grvae {
namespace {

// Reads typed keys out of one JSON object and rejects leftovers.
class Section {
 public:
  Section(const Json& doc, std::string name) : name_(std::move(name)) {
    if (doc.is_null()) return;
    if (!doc.is_object()) throw ConfigError(name_ + ": expected an object");
    obj_ = &doc;
  }

  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

  const Json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_->at(key);
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    const Json& v = raw(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("expected a boolean");
      } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
        if (!v.is_number_unsigned()) throw ConfigError("expected a nonnegative integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("expected a string");
      }
      out = v.get<T>();
    } catch (const ConfigError& e) {
      throw ConfigError(path(key) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path(key) + ": " + e.what());
    }
  }

  // Sub-object for key (null when absent), marked as consumed.
  const Json& child(const std::string& key) {
    static const Json kNull;
    if (!has(key)) return kNull;
    return raw(key);
  }

  std::string path(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

  void finish() const {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items())
      if (!seen_.contains(key)) throw ConfigError(path(key) + ": unknown key");
  }

 private:
  std::string name_;
  const Json* obj_ = nullptr;
  std::set<std::string> seen_;
};

std::vector<double> number_list(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number()) throw ConfigError(where + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::vector<int>> int_matrix(const Json& v, const std::string& where) {
  if (!v.is_array()) throw ConfigError(where + ": expected a matrix");
  std::vector<std::vector<int>> out;
  for (const Json& row : v) {
    if (!row.is_array()) throw ConfigError(where + ": expected a matrix");
    std::vector<int> r;
    for (const Json& x : row) {
      if (!x.is_number_integer()) throw ConfigError(where + ": entries must be integers 0 or 1");
      r.push_back(x.get<int>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> default_valences(const GraphSchema& schema) {
  const auto& atoms = default_atoms();
  if (schema.node_types > atoms.size())
    throw ConfigError("constraints.valences: required when node_types > " + std::to_string(atoms.size()));
  std::vector<double> v;
  for (std::size_t r = 0; r < schema.node_types; ++r) v.push_back(atoms[r].valence);
  return v;
}

ConstraintSpec default_spec(Task task, const GraphSchema& schema) {
  if (task == Task::kMolecule) return molecular_constraints(schema, default_valences(schema));
  if (schema.node_types == benchmark_compatibility().size())
    return generic_constraints(schema, benchmark_compatibility());
  return generic_constraints(schema, {});
}

Json weight_json(bool enabled, double w) { return enabled ? Json(w) : Json(nullptr); }

}  // namespace

ExperimentConfig default_config(Task task) {
  ExperimentConfig c;
  c.task = task;
  if (task == Task::kMolecule) {
    c.schema = {9, 4, 3};
    c.molecule_gen.count = 2000;
    c.molecule_gen.node_min = 2;
  } else {
    c.schema = {15, 5, 1};
    c.compat_gen.count = 2000;
  }
  c.spec = default_spec(task, c.schema);
  c.regularizer = Regularizer::for_task(task, default_weight(task));
  c.model.schema = c.schema;
  return c;
}

void ExperimentConfig::validate() const {
  schema.validate();
  spec.validate(schema);
  if (!(model.schema == schema)) throw ConfigError("model.schema differs from schema");
  model.validate();
  train.validate();
  if (!regularizer.any_enabled()) throw ConfigError("regularizer: no constraint family enabled");
  for (double w : {regularizer.valence_weight, regularizer.connectivity_weight, regularizer.compatibility_weight})
    if (!(w >= 0.0)) throw ConfigError("regularizer: weights must be >= 0");
  if (task == Task::kMolecule) molecule_gen.validate(schema);
  else compat_gen.validate(schema);
  corrupt.validate();
  if (eval.prior_samples == 0) throw ConfigError("eval.prior_samples must be >= 1");
  if (eval.recon_encodes == 0) throw ConfigError("eval.recon_encodes must be >= 1");
  if (eval.canonical.max_cell == 0) throw ConfigError("eval.max_cell must be >= 1");
}

TrainSetup ExperimentConfig::train_setup() const {
  TrainSetup s{model, train, spec, regularizer, task, eval.validity};
  s.train.seed = seed;
  return s;
}

void set_regularizer_weights(ExperimentConfig& c, double w) {
  Regularizer& r = c.regularizer;
  if (r.use_valence) r.valence_weight = w;
  if (r.use_connectivity) r.connectivity_weight = w;
  if (r.use_compatibility) r.compatibility_weight = w;
}

ExperimentConfig config_from_json(const Json& doc, Task fallback_task) {
  Section top(doc, "");
  Task task = fallback_task;
  if (top.has("task")) {
    std::string name;
    top.get("task", name);
    task = parse_task(name);
  }
  ExperimentConfig c = default_config(task);
  top.get("seed", c.seed);

  const GraphSchema before = c.schema;
  Section schema(top.child("schema"), "schema");
  schema.get("max_nodes", c.schema.max_nodes);
  schema.get("node_types", c.schema.node_types);
  schema.get("edge_types", c.schema.edge_types);
  schema.finish();
  c.schema.validate();

  if (!(c.schema == before)) {
    const Json& cj = doc.contains("constraints") ? doc.at("constraints") : Json();
    const bool has_valences = cj.is_object() && cj.contains("valences");
    const bool has_full = cj.is_object() && cj.contains("node_capacity");
    if (!(task == Task::kMolecule && (has_valences || has_full))) c.spec = default_spec(task, c.schema);
    if (c.compat_gen.node_max > c.schema.max_nodes) c.compat_gen.node_max = c.schema.max_nodes;
    if (c.compat_gen.node_min > c.compat_gen.node_max) c.compat_gen.node_min = c.compat_gen.node_max;
  }

  Section cons(top.child("constraints"), "constraints");
  if (cons.has("valences")) {
    if (task != Task::kMolecule) throw ConfigError("constraints.valences: only used by the molecule task");
    c.spec = molecular_constraints(c.schema, number_list(cons.raw("valences"), "constraints.valences"));
  }
  if (cons.has("compatibility")) {
    const Json& v = cons.raw("compatibility");
    std::vector<std::vector<int>> m;
    if (v.is_string()) {
      if (v.get<std::string>() != "benchmark")
        throw ConfigError("constraints.compatibility: expected a matrix or \"benchmark\"");
      m = benchmark_compatibility();
    } else {
      m = int_matrix(v, "constraints.compatibility");
    }
    if (m.size() == c.schema.node_channels()) {
      c.spec.compatibility.clear();
      for (const auto& row : m) {
        if (row.size() != m.size()) throw ConfigError("constraints.compatibility: not square");
        c.spec.compatibility.insert(c.spec.compatibility.end(), row.begin(), row.end());
      }
    } else if (m.size() == c.schema.node_types) {
      c.spec.compatibility = pad_compatibility(m);
    } else {
      throw ConfigError("constraints.compatibility: expected " + std::to_string(c.schema.node_types) + " or " +
                        std::to_string(c.schema.node_channels()) + " rows");
    }
  }
  if (cons.has("edge_capacity")) c.spec.edge_capacity = number_list(cons.raw("edge_capacity"), "constraints.edge_capacity");
  if (cons.has("node_capacity")) c.spec.node_capacity = number_list(cons.raw("node_capacity"), "constraints.node_capacity");
  cons.get("alpha", c.spec.alpha);
  cons.get("sharpness", c.spec.sharpness);
  cons.finish();

  if (top.has("regularizer")) {
    Section reg(top.child("regularizer"), "regularizer");
    Regularizer r;
    r.use_valence = false;
    auto family = [&](const char* key, bool& use, double& w) {
      if (!reg.has(key)) return;
      const Json& v = reg.raw(key);
      if (v.is_null()) return;
      if (!v.is_number()) throw ConfigError(reg.path(key) + ": expected a number or null");
      use = true;
      w = v.get<double>();
    };
    family("valence", r.use_valence, r.valence_weight);
    family("connectivity", r.use_connectivity, r.connectivity_weight);
    family("compatibility", r.use_compatibility, r.compatibility_weight);
    reg.finish();
    c.regularizer = r;
  }

  Section model(top.child("model"), "model");
  model.get("latent_dim", c.model.latent_dim);
  model.get("hidden", c.model.hidden);
  model.get("trainable_prior", c.model.trainable_prior);
  model.finish();
  c.model.schema = c.schema;

  Section train(top.child("train"), "train");
  train.get("batch_size", c.train.batch_size);
  train.get("learning_rate", c.train.learning_rate);
  if (train.has("optimizer")) {
    std::string name;
    train.get("optimizer", name);
    c.train.optimizer = parse_optimizer(name);
  }
  train.get("momentum", c.train.momentum);
  train.get("epochs", c.train.epochs);
  train.get("init_scale", c.train.init_scale);
  if (train.has("synthetic")) {
    std::string name;
    train.get("synthetic", name);
    c.train.synthetic = parse_synthetic(name);
  }
  train.get("checkpoint_every", c.train.checkpoint_every);
  train.get("clip_norm", c.train.clip_norm);
  train.get("probe_samples", c.train.probe_samples);
  train.get("kl_warmup_epochs", c.train.kl_warmup_epochs);
  train.finish();

  Section gen(top.child("generator"), "generator");
  if (task == Task::kMolecule) {
    gen.get("count", c.molecule_gen.count);
    gen.get("node_min", c.molecule_gen.node_min);
    gen.get("node_max", c.molecule_gen.node_max);
    gen.get("ring_prob", c.molecule_gen.ring_prob);
  } else {
    gen.get("count", c.compat_gen.count);
    gen.get("node_min", c.compat_gen.node_min);
    gen.get("node_max", c.compat_gen.node_max);
    gen.get("edge_prob", c.compat_gen.edge_prob);
  }
  gen.finish();

  Section corrupt(top.child("corrupt"), "corrupt");
  corrupt.get("min_insertions", c.corrupt.min_insertions);
  corrupt.get("max_insertions", c.corrupt.max_insertions);
  corrupt.finish();

  Section eval(top.child("eval"), "eval");
  eval.get("prior_samples", c.eval.prior_samples);
  eval.get("recon_encodes", c.eval.recon_encodes);
  if (eval.has("match")) {
    std::string name;
    eval.get("match", name);
    c.eval.match = parse_match(name);
  }
  eval.get("empty_molecule_valid", c.eval.validity.empty_molecule_valid);
  eval.get("max_cell", c.eval.canonical.max_cell);
  eval.finish();

  top.finish();
  c.train.seed = c.seed;
  c.validate();
  return c;
}

Json config_json(const ExperimentConfig& c) {
  Json j;
  j["task"] = std::string(task_name(c.task));
  j["seed"] = c.seed;
  j["schema"] = {{"max_nodes", c.schema.max_nodes}, {"node_types", c.schema.node_types},
                 {"edge_types", c.schema.edge_types}};
  const std::size_t dc = c.schema.node_channels();
  Json matrix = Json::array();
  for (std::size_t r = 0; r < dc; ++r) {
    Json row = Json::array();
    for (std::size_t s = 0; s < dc; ++s) row.push_back(static_cast<int>(c.spec.compatibility.at(r * dc + s)));
    matrix.push_back(row);
  }
  j["constraints"] = {{"edge_capacity", c.spec.edge_capacity}, {"node_capacity", c.spec.node_capacity},
                      {"compatibility", matrix}, {"alpha", c.spec.alpha}, {"sharpness", c.spec.sharpness}};
  const Regularizer& r = c.regularizer;
  j["regularizer"] = {{"valence", weight_json(r.use_valence, r.valence_weight)},
                      {"connectivity", weight_json(r.use_connectivity, r.connectivity_weight)},
                      {"compatibility", weight_json(r.use_compatibility, r.compatibility_weight)}};
  j["model"] = {{"latent_dim", c.model.latent_dim}, {"hidden", c.model.hidden},
                {"trainable_prior", c.model.trainable_prior}};
  const TrainConfig& t = c.train;
  j["train"] = {{"batch_size", t.batch_size},
                {"learning_rate", t.learning_rate},
                {"optimizer", std::string(optimizer_name(t.optimizer))},
                {"momentum", t.momentum},
                {"epochs", t.epochs},
                {"init_scale", t.init_scale},
                {"synthetic", std::string(synthetic_name(t.synthetic))},
                {"checkpoint_every", t.checkpoint_every},
                {"clip_norm", t.clip_norm},
                {"probe_samples", t.probe_samples},
                {"kl_warmup_epochs", t.kl_warmup_epochs}};
  if (c.task == Task::kMolecule)
    j["generator"] = {{"count", c.molecule_gen.count}, {"node_min", c.molecule_gen.node_min},
                      {"node_max", c.molecule_gen.node_max ? c.molecule_gen.node_max : c.schema.max_nodes},
                      {"ring_prob", c.molecule_gen.ring_prob}};
  else
    j["generator"] = {{"count", c.compat_gen.count}, {"node_min", c.compat_gen.node_min},
                      {"node_max", c.compat_gen.node_max}, {"edge_prob", c.compat_gen.edge_prob}};
  j["corrupt"] = {{"min_insertions", c.corrupt.min_insertions}, {"max_insertions", c.corrupt.max_insertions}};
  j["eval"] = {{"prior_samples", c.eval.prior_samples},
               {"recon_encodes", c.eval.recon_encodes},
               {"match", std::string(match_name(c.eval.match))},
               {"empty_molecule_valid", c.eval.validity.empty_molecule_valid},
               {"max_cell", c.eval.canonical.max_cell}};
  return j;
}

ExperimentConfig parse_config(const std::string& text, Task fallback_task) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  return config_from_json(doc, fallback_task);
}

ExperimentConfig load_config(const std::filesystem::path& path, Task fallback_task) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), fallback_task);
}

std::string config_to_json(const ExperimentConfig& config, int indent) { return config_json(config).dump(indent); }

}  // namespace grvae
