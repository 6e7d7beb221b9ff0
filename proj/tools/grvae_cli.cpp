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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "grvae/checkpoint.hpp"
#include "grvae/config.hpp"
#include "grvae/datagen.hpp"
#include "grvae/errors.hpp"
#include "grvae/evalsuite.hpp"
#include "grvae/graph_io.hpp"
#include "grvae/kernels.hpp"
#include "grvae/oracles.hpp"
#include "grvae/trainer.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace grvae;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kRuntime = 4 };

fs::path default_out_dir() {
  const char* env = std::getenv("GRVAE_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

// Relative output paths land under GRVAE_OUT_DIR when it is set.
fs::path out_path(const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : default_out_dir() / path;
}

fs::path manifest_path(const fs::path& data) {
  fs::path m = data;
  m += ".manifest.json";
  return m;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DataError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(what + ": " + e.what());
  }
}

// Config precedence: --config file, else the dataset's manifest, else task
// defaults. An explicit --task must agree with the file.
ExperimentConfig resolve_config(const std::string& config_file, const std::string& data_file,
                                const std::string& task_flag) {
  std::optional<Task> task;
  if (!task_flag.empty()) task = parse_task(task_flag);
  ExperimentConfig c;
  if (!config_file.empty()) {
    c = load_config(config_file, task.value_or(Task::kCompatibility));
  } else if (!data_file.empty() && fs::exists(manifest_path(data_file))) {
    const Json m = parse_json(read_text(manifest_path(data_file)), "dataset manifest");
    if (!m.contains("config")) throw DataError("dataset manifest has no config");
    c = parse_config(m.at("config").dump(), task.value_or(Task::kCompatibility));
  } else {
    c = default_config(task.value_or(Task::kCompatibility));
  }
  if (task && *task != c.task)
    throw ConfigError("--task " + task_flag + " conflicts with the configured task '" +
                      std::string(task_name(c.task)) + "'");
  return c;
}

void apply_seed(ExperimentConfig& c, const std::optional<std::uint64_t>& seed) {
  if (seed) c.seed = *seed;
  c.train.seed = c.seed;
}

Json base_manifest(const std::string& command, const ExperimentConfig& c) {
  Json m;
  m["command"] = command;
  m["library_version"] = GRVAE_VERSION;
  m["seed"] = c.seed;
  m["config"] = nlohmann::ordered_json::parse(config_to_json(c, -1));
  return m;
}

void emit(const Json& report, const std::string& out) {
  const std::string text = report.dump(2) + "\n";
  if (!out.empty()) write_text(out_path(out), text);
  std::cout << text;
}

Json deviations_json(const std::vector<ProtocolDeviation>& devs) {
  Json a = Json::array();
  for (const auto& d : devs) a.push_back({{"parameter", d.parameter}, {"reference", d.reference}, {"used", d.used}});
  return a;
}

Json protocol_json(const ExperimentConfig& c) {
  const Regularizer& r = c.regularizer;
  Json w;
  w["valence"] = r.use_valence ? Json(r.valence_weight) : Json(nullptr);
  w["connectivity"] = r.use_connectivity ? Json(r.connectivity_weight) : Json(nullptr);
  w["compatibility"] = r.use_compatibility ? Json(r.compatibility_weight) : Json(nullptr);
  return {{"task", std::string(task_name(c.task))},
          {"alpha", c.spec.alpha},
          {"sharpness", c.spec.sharpness},
          {"weights", w},
          {"synthetic_latents", std::string(synthetic_name(c.train.synthetic))},
          {"train_seed", c.seed}};
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::string task, config, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
};

int cmd_gen(const GenArgs& a) {
  ExperimentConfig c = resolve_config(a.config, "", a.task);
  apply_seed(c, a.seed);
  if (a.count) {
    c.compat_gen.count = *a.count;
    c.molecule_gen.count = *a.count;
  }
  c.validate();
  Rng rng = derive_rng(c.seed, 101);
  std::vector<GraphOneHot> data = c.task == Task::kMolecule
                                      ? gen_toy_molecules(c.schema, c.spec, c.molecule_gen, rng)
                                      : gen_node_compatible(c.schema, c.spec, c.compat_gen, rng);
  const fs::path out = out_path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_dataset(out, data);
  Json m = base_manifest("gen-data", c);
  m["graphs"] = data.size();
  write_text(manifest_path(out), m.dump(2) + "\n");
  std::cout << "wrote " << data.size() << " graphs to " << out.string() << "\n";
  return kOk;
}

struct CorruptArgs {
  std::string in, out, config, insertions;
  std::optional<std::uint64_t> seed;
};

int cmd_corrupt(const CorruptArgs& a) {
  ExperimentConfig c = resolve_config(a.config, a.in, "");
  apply_seed(c, a.seed);
  if (!a.insertions.empty()) {
    const auto dash = a.insertions.find('-');
    try {
      if (dash == std::string::npos) {
        c.corrupt.min_insertions = c.corrupt.max_insertions = std::stoul(a.insertions);
      } else {
        c.corrupt.min_insertions = std::stoul(a.insertions.substr(0, dash));
        c.corrupt.max_insertions = std::stoul(a.insertions.substr(dash + 1));
      }
    } catch (const std::logic_error&) {
      throw ConfigError("--insertions: expected K or MIN-MAX, got '" + a.insertions + "'");
    }
  }
  c.validate();
  const std::vector<GraphOneHot> data = read_dataset(fs::path(a.in), c.schema);
  Rng rng = derive_rng(c.seed, 102);
  const std::vector<GraphOneHot> noisy = corrupt_with_incompatible_edges(data, c.spec, c.corrupt, rng);
  const fs::path out = out_path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_dataset(out, noisy);
  Json m = base_manifest("corrupt", c);
  m["source"] = a.in;
  m["graphs"] = noisy.size();
  m["insertions"] = {{"min", c.corrupt.min_insertions}, {"max", c.corrupt.max_insertions}};
  write_text(manifest_path(out), m.dump(2) + "\n");
  std::cout << "wrote " << noisy.size() << " corrupted graphs to " << out.string() << "\n";
  return kOk;
}

struct TrainArgs {
  std::string data, config, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> reg_weights, lr;
  std::optional<std::size_t> epochs;
};

Json record_json(const EpochRecord& r) {
  return {{"epoch", r.epoch},       {"neg_elbo", r.neg_elbo},       {"regularizer", r.regularizer},
          {"loss", r.loss},         {"probe_valid", r.probe_valid}, {"probe_penalty", r.probe_penalty}};
}

int cmd_train(const TrainArgs& a) {
  ExperimentConfig c = resolve_config(a.config, a.data, "");
  apply_seed(c, a.seed);
  if (a.reg_weights) set_regularizer_weights(c, *a.reg_weights);
  if (a.lr) c.train.learning_rate = *a.lr;
  if (a.epochs) c.train.epochs = *a.epochs;
  c.validate();
  const std::vector<GraphOneHot> data = read_dataset(fs::path(a.data), c.schema);

  const fs::path dir = out_path(a.out_dir.empty() ? "run" : a.out_dir);
  fs::create_directories(dir);
  Json m = base_manifest("train", c);
  m["data"] = a.data;
  m["graphs"] = data.size();
  m["kernels"] = std::string(kernels::isa_name(kernels::active_isa()));
  write_text(dir / "manifest.json", m.dump(2) + "\n");

  std::ofstream log(dir / "train_log.jsonl", std::ios::binary);
  std::ofstream timing(dir / "timing.jsonl", std::ios::binary);
  const auto start = std::chrono::steady_clock::now();
  Checkpoint last{c, {}, 0};
  auto on_epoch = [&](const EpochRecord& r, const Vae& vae) {
    log << record_json(r).dump() << "\n" << std::flush;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    timing << Json{{"epoch", r.epoch}, {"wall_seconds", secs}}.dump() << "\n" << std::flush;
    last.vae = vae;
    last.epoch = r.epoch;
    if (c.train.checkpoint_every && r.epoch && r.epoch % c.train.checkpoint_every == 0)
      save_checkpoint(dir / ("checkpoint_epoch_" + std::to_string(r.epoch) + ".json"), last);
    std::cerr << "epoch " << r.epoch << "  -elbo " << r.neg_elbo << "  reg " << r.regularizer << "  probe valid "
              << r.probe_valid << "%\n";
  };
  try {
    TrainResult result = train(data, c.train_setup(), on_epoch);
    save_checkpoint(dir / "model.json", {c, result.vae, c.train.epochs});
  } catch (const TrainingError&) {
    if (!last.vae.params.empty()) save_checkpoint(dir / "checkpoint_last_finite.json", last);
    throw;
  }
  std::cout << "wrote " << (dir / "model.json").string() << "\n";
  return kOk;
}

struct EvalArgs {
  std::string ckpt, data, holdout, metrics, match, out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples, encodes;
};

int cmd_eval(const EvalArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  ExperimentConfig& c = ck.config;
  EvalOptions opt = c.eval;
  if (a.samples) opt.prior_samples = *a.samples;
  if (a.encodes) opt.recon_encodes = *a.encodes;
  if (!a.match.empty()) opt.match = parse_match(a.match);
  const std::uint64_t seed = a.seed.value_or(c.seed);

  bool want_valid = false, want_novel = false, want_recon = false;
  std::stringstream ss(a.metrics);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "valid") want_valid = true;
    else if (item == "novel") want_novel = true;
    else if (item == "recon") want_recon = true;
    else throw ConfigError("--metrics: unknown metric '" + item + "' (expected valid,novel,recon)");
  }
  if ((want_novel || want_recon) && a.data.empty() && a.holdout.empty())
    throw ConfigError("--data is required for novel and recon");

  Json report;
  report["command"] = "eval";
  report["library_version"] = GRVAE_VERSION;
  report["checkpoint"] = a.ckpt;
  report["eval_seed"] = seed;
  report["protocol"] = protocol_json(c);
  report["protocol"]["prior_samples"] = opt.prior_samples;
  report["protocol"]["recon_encodes"] = opt.recon_encodes;
  report["protocol"]["graph_match"] = std::string(match_name(opt.match));
  report["protocol"]["decode"] = "argmax, once per latent";
  Json metrics;

  std::vector<GraphOneHot> train_set;
  if (!a.data.empty()) train_set = read_dataset(fs::path(a.data), c.schema);
  std::size_t holdout_size = 0;

  if (want_valid || want_novel) {
    Rng rng = derive_rng(seed, 201);
    const ValidResult v = percent_valid(ck.vae, c.spec, c.task, opt.prior_samples, rng, opt.validity);
    metrics["valid"] = v.percent;
    std::size_t ghost = 0, valence = 0, conn = 0, compat = 0, empty = 0;
    for (const GraphOneHot& s : v.samples) {
      ghost += !check_ghosts(s);
      valence += !check_valence(s, c.spec).ok();
      conn += !check_connectivity(s);
      compat += !check_compatibility(s, c.spec);
      empty += s.active_count() == 0;
    }
    metrics["valid_detail"] = {{"samples", v.samples.size()}, {"ghost_failures", ghost},
                               {"valence_failures", valence}, {"connectivity_failures", conn},
                               {"compatibility_failures", compat}, {"empty_graphs", empty}};
    if (want_novel) {
      Json by_match;
      for (MatchMode mode : {MatchMode::kCanonical, MatchMode::kExact}) {
        GraphIndex index(mode, opt.canonical);
        for (const GraphOneHot& g : train_set) index.insert(g);
        const NoveltyResult n = percent_novel(v, index);
        by_match[std::string(match_name(mode))] = n.percent;
        if (mode != opt.match) continue;
        metrics["novel"] = n.percent;
        metrics["novel_detail"] = {{"valid_samples", n.valid}, {"novel_samples", n.novel},
                                   {"canonical_fallbacks", index.fallbacks()}};
      }
      metrics["novel_by_match"] = by_match;
    }
  }
  if (want_recon) {
    const bool separate = !a.holdout.empty();
    const std::vector<GraphOneHot> holdout = separate ? read_dataset(fs::path(a.holdout), c.schema) : train_set;
    holdout_size = holdout.size();
    Json by_match;
    for (MatchMode mode : {MatchMode::kCanonical, MatchMode::kExact}) {
      Rng rng = derive_rng(seed, 202);
      const ReconResult r = percent_recon(ck.vae, holdout, opt.recon_encodes, rng, mode, opt.canonical);
      by_match[std::string(match_name(mode))] = r.percent;
      if (mode != opt.match) continue;
      metrics["recon"] = r.percent;
      metrics["recon_detail"] = {{"graphs", r.total},
                                 {"reconstructed", r.reconstructed},
                                 {"canonical_fallbacks", r.fallbacks},
                                 {"holdout_source", separate ? "holdout file" : "training data"}};
    }
    metrics["recon_by_match"] = by_match;
  }
  report["metrics"] = metrics;
  std::vector<ProtocolDeviation> devs = protocol_deviations(opt, holdout_size, want_recon);
  if (want_recon && a.holdout.empty()) devs.push_back({"holdout_source", "disjoint from training", "training data"});
  report["deviations"] = deviations_json(devs);
  emit(report, a.out);
  return kOk;
}

struct DenoiseArgs {
  std::string ckpt, data, out, decoded_out;
};

int cmd_denoise(const DenoiseArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  const ExperimentConfig& c = ck.config;
  const std::vector<GraphOneHot> inputs = read_dataset(fs::path(a.data), c.schema);
  std::size_t valid_in = 0;
  for (const GraphOneHot& g : inputs) valid_in += is_valid(g, c.spec, c.task, c.eval.validity);
  const DenoiseResult r = denoise_eval(ck.vae, inputs, c.spec, c.task, c.eval.validity);
  Json report;
  report["command"] = "denoise";
  report["library_version"] = GRVAE_VERSION;
  report["checkpoint"] = a.ckpt;
  report["data"] = a.data;
  report["protocol"] = protocol_json(c);
  report["protocol"]["latent"] = "posterior mean";
  report["protocol"]["decode"] = "argmax";
  report["graphs"] = inputs.size();
  report["input_valid"] = inputs.empty() ? 0.0 : 100.0 * static_cast<double>(valid_in) / static_cast<double>(inputs.size());
  report["decoded_valid"] = r.percent;
  if (!a.decoded_out.empty()) write_dataset(out_path(a.decoded_out), r.decoded);
  emit(report, a.out);
  return kOk;
}

struct WalkArgs {
  std::string ckpt, mode = "interp", data, out_dir;
  std::size_t steps = 8;
  double step_size = 0.5;
  std::vector<std::size_t> anchors{0, 1};
  std::optional<std::uint64_t> seed;
};

int cmd_walk(const WalkArgs& a) {
  Checkpoint ck = load_checkpoint(a.ckpt);
  const ExperimentConfig& c = ck.config;
  const std::vector<GraphOneHot> data = read_dataset(fs::path(a.data), c.schema);
  std::vector<GraphOneHot> anchors;
  for (std::size_t i : a.anchors) {
    if (i >= data.size()) throw DataError("--anchors: index " + std::to_string(i) + " beyond the dataset");
    anchors.push_back(data[i]);
  }
  WalkOptions opt{parse_walk(a.mode), a.steps, a.step_size};
  Rng rng = derive_rng(a.seed.value_or(c.seed), 301);
  const std::vector<WalkCell> cells = latent_walk(ck.vae, anchors, opt, c.spec, c.task, rng, c.eval.validity);
  const fs::path dir = out_path(a.out_dir.empty() ? "walk" : a.out_dir);
  export_walk(cells, dir);
  std::size_t valid = 0;
  for (const WalkCell& cell : cells) valid += cell.valid;
  std::cout << "wrote " << cells.size() << " graphs to " << dir.string() << " (" << valid << " valid)\n";
  return kOk;
}

struct CheckArgs {
  std::string data, task, config, out;
};

int cmd_check(const CheckArgs& a) {
  const ExperimentConfig c = resolve_config(a.config, a.data, a.task);
  const std::vector<GraphOneHot> data = read_dataset(fs::path(a.data), c.schema);
  std::size_t valid = 0, ghost_fail = 0, valence_fail = 0, conn_fail = 0, compat_fail = 0, empty = 0;
  for (const GraphOneHot& g : data) {
    valid += is_valid(g, c.spec, c.task, c.eval.validity);
    ghost_fail += !check_ghosts(g);
    valence_fail += !check_valence(g, c.spec).ok();
    conn_fail += !check_connectivity(g);
    compat_fail += !check_compatibility(g, c.spec);
    empty += g.active_count() == 0;
  }
  const double n = static_cast<double>(data.size());
  Json report;
  report["command"] = "check";
  report["data"] = a.data;
  report["task"] = std::string(task_name(c.task));
  report["graphs"] = data.size();
  report["valid"] = valid;
  report["percent_valid"] = data.empty() ? 0.0 : 100.0 * static_cast<double>(valid) / n;
  report["failures"] = {{"ghost", ghost_fail},
                        {"valence", valence_fail},
                        {"connectivity", conn_fail},
                        {"compatibility", compat_fail},
                        {"empty", empty}};
  emit(report, a.out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regularized graph VAEs: data generation, training and evaluation."};
  app.set_version_flag("--version", std::string(GRVAE_VERSION));
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen-data", "Generate a synthetic dataset and its manifest.");
  g->add_option("--task", gen.task, "compat | molecule");
  g->add_option("--config", gen.config, "Experiment config (JSON).");
  g->add_option("--out", gen.out, "Dataset file to write.")->required();
  g->add_option("--seed", gen.seed, "Random seed.");
  g->add_option("--count", gen.count, "Number of graphs.");

  CorruptArgs cor;
  auto* c = app.add_subcommand("corrupt", "Insert incompatible edges into a dataset.");
  c->add_option("--in", cor.in, "Input dataset.")->required();
  c->add_option("--out", cor.out, "Output dataset.")->required();
  c->add_option("--insertions", cor.insertions, "Edges per graph: K or MIN-MAX (default 1-3).");
  c->add_option("--config", cor.config, "Experiment config (default: the input's manifest).");
  c->add_option("--seed", cor.seed, "Random seed.");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train a (regularized) VAE.");
  t->add_option("--data", tr.data, "Training dataset.")->required();
  t->add_option("--config", tr.config, "Experiment config (default: the dataset's manifest).");
  t->add_option("--out-dir", tr.out_dir, "Run directory (default run/ under GRVAE_OUT_DIR).");
  t->add_option("--seed", tr.seed, "Random seed.");
  t->add_option("--reg-weights", tr.reg_weights, "Weight for every enabled penalty family; 0 = standard VAE.");
  t->add_option("--lr", tr.lr, "Learning rate.");
  t->add_option("--epochs", tr.epochs, "Epochs.");

  EvalArgs ev;
  ev.metrics = "valid,novel,recon";
  auto* e = app.add_subcommand("eval", "% Valid, % Novel and % Recon of a checkpoint.");
  e->add_option("--ckpt", ev.ckpt, "Checkpoint.")->required();
  e->add_option("--data", ev.data, "Training dataset (novelty index; recon when no --holdout).");
  e->add_option("--holdout", ev.holdout, "Holdout dataset for recon.");
  e->add_option("--metrics", ev.metrics, "Comma list of valid, novel, recon.");
  e->add_option("--samples", ev.samples, "Prior samples (default 1000).");
  e->add_option("--encodes", ev.encodes, "Encodes per holdout graph (default 10).");
  e->add_option("--match", ev.match, "canonical | exact");
  e->add_option("--seed", ev.seed, "Evaluation seed (default: the checkpoint's).");
  e->add_option("--out", ev.out, "Also write the report here.");

  DenoiseArgs dn;
  auto* d = app.add_subcommand("denoise", "Validity of decoded posterior means of (noisy) graphs.");
  d->add_option("--ckpt", dn.ckpt, "Checkpoint.")->required();
  d->add_option("--data", dn.data, "Input dataset.")->required();
  d->add_option("--out", dn.out, "Also write the report here.");
  d->add_option("--decoded-out", dn.decoded_out, "Write the decoded graphs here.");

  WalkArgs wk;
  auto* w = app.add_subcommand("walk", "Decode a latent grid or interpolation to DOT files.");
  w->add_option("--ckpt", wk.ckpt, "Checkpoint.")->required();
  w->add_option("--mode", wk.mode, "grid | interp")->check(CLI::IsMember({"grid", "interp"}));
  w->add_option("--data", wk.data, "Dataset holding the anchor graphs.")->required();
  w->add_option("--anchors", wk.anchors, "Anchor indices into --data (default 0 1).");
  w->add_option("--steps", wk.steps, "Steps per line; steps+1 graphs each.");
  w->add_option("--step-size", wk.step_size, "Grid spacing in latent units.");
  w->add_option("--out-dir", wk.out_dir, "Export directory.");
  w->add_option("--seed", wk.seed, "Seed for the grid directions.");

  CheckArgs ck;
  auto* k = app.add_subcommand("check", "Oracle validity summary of a dataset.");
  k->add_option("--data", ck.data, "Dataset.")->required();
  k->add_option("--task", ck.task, "compat | molecule");
  k->add_option("--config", ck.config, "Experiment config (default: the dataset's manifest).");
  k->add_option("--out", ck.out, "Also write the report here.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& s) {
    return app.exit(s);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*c) return cmd_corrupt(cor);
    if (*t) return cmd_train(tr);
    if (*e) return cmd_eval(ev);
    if (*d) return cmd_denoise(dn);
    if (*w) return cmd_walk(wk);
    if (*k) return cmd_check(ck);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kUsage;
  } catch (const DataError& err) {
    std::cerr << "data error: " << err.what() << "\n";
    return kData;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
