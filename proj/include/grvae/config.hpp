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

// One JSON document describes an experiment end to end:
//
//   {"task": "compat", "seed": 7,
//    "schema": {"max_nodes": 8, "node_types": 5, "edge_types": 1},
//    "constraints": {"compatibility": "benchmark", "alpha": 0.25},
//    "regularizer": {"valence": 5.0, "compatibility": 5.0},
//    "model": {...}, "train": {...}, "generator": {...}, "corrupt": {...}, "eval": {...}}
//
// Every section and key is optional; missing values take task defaults.
// Unknown keys are rejected. constraints may give the full capacity vectors
// and (1+d)x(1+d) matrix, or shorthands: "compatibility" as a d x d matrix or
// "benchmark" (d = 5), and "valences" (d entries) for the molecule task.
// A regularizer family is enabled when its key is present; null disables it.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "grvae/constraints.hpp"
#include "grvae/datagen.hpp"
#include "grvae/evalsuite.hpp"
#include "grvae/trainer.hpp"
#include "grvae/vae.hpp"

namespace grvae {

struct ExperimentConfig {
  Task task = Task::kCompatibility;
  std::uint64_t seed = 0;
  GraphSchema schema;
  ConstraintSpec spec;
  Regularizer regularizer;
  ModelConfig model;
  TrainConfig train;
  CompatGenConfig compat_gen;
  MoleculeGenConfig molecule_gen;
  CorruptConfig corrupt;
  EvalOptions eval;

  // Throws ConfigError on any inconsistency between sections.
  void validate() const;
  TrainSetup train_setup() const;
};

ExperimentConfig default_config(Task task);

// Task comes from the document, else from fallback_task.
ExperimentConfig parse_config(const std::string& json_text, Task fallback_task = Task::kCompatibility);
ExperimentConfig load_config(const std::filesystem::path& path, Task fallback_task = Task::kCompatibility);

// Materialized form: every value explicit, loads back to an equal config.
std::string config_to_json(const ExperimentConfig& config, int indent = 2);

// Sets every enabled family's weight.
void set_regularizer_weights(ExperimentConfig& config, double weight);

}  // namespace grvae
