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

#include <string>
#include <string_view>
#include <vector>

#include "grvae/graph.hpp"

namespace grvae {

enum class Task { kMolecule, kCompatibility };

std::string_view task_name(Task task);
// Accepts "molecule" and "compat"/"compatibility". Throws ConfigError.
Task parse_task(std::string_view name);

// Validity rules shared by the differentiable penalties and the exact oracles.
struct ConstraintSpec {
  // Capacity per edge type, index 0 (no edge) must be 0. Length 1+t.
  std::vector<double> edge_capacity;
  // Capacity bound per node type, index 0 (ghost) must be 0. Length 1+d.
  std::vector<double> node_capacity;
  // (1+d) x (1+d) row-major 0/1 compatibility, symmetric, zero row/column 0.
  std::vector<double> compatibility;
  // Slack of the compatibility constraint, in (0, 1).
  double alpha = 0.25;
  // Sharpness of the connectivity sigmoids, > 0.
  double sharpness = 100.0;

  double compatible(int r, int s) const;

  // Throws ConfigError with the offending field.
  void validate(const GraphSchema& schema) const;
};

// The 5x5 node-type compatibility matrix of the synthetic benchmark, without
// the ghost row/column.
const std::vector<std::vector<int>>& benchmark_compatibility();

// Embeds a d x d 0/1 matrix into the (1+d) x (1+d) layout.
std::vector<double> pad_compatibility(const std::vector<std::vector<int>>& inner);

// Ghost-node rule for graphs without valence: h = 1 for any edge,
// u = N-1 for any real node. D is given without the ghost row/column and may be
// empty, in which case every pair of real types is compatible.
ConstraintSpec generic_constraints(const GraphSchema& schema,
                                   const std::vector<std::vector<int>>& compatibility);

// Molecular valence rule: h(k) = bond order k, u(r) = valences[r-1]. All real
// type pairs compatible.
ConstraintSpec molecular_constraints(const GraphSchema& schema, const std::vector<double>& valences);

// Default atom set for the toy molecule generator: C, N, O, H.
struct AtomType {
  std::string symbol;
  double valence;
};
const std::vector<AtomType>& default_atoms();

// Which penalty families enter the loss, with one weight per family.
struct Regularizer {
  bool use_valence = true;
  bool use_connectivity = false;
  bool use_compatibility = false;
  double valence_weight = 0.0;
  double connectivity_weight = 0.0;
  double compatibility_weight = 0.0;

  bool any_enabled() const { return use_valence || use_connectivity || use_compatibility; }
  // True when some enabled family has a nonzero weight.
  bool active() const;

  // Families per task with the tuned weights of the reference experiments:
  // molecule = valence + connectivity, compat = valence + compatibility.
  static Regularizer for_task(Task task, double weight);
};

// Default per-family weight by task (molecule 1.0, compat 5.0).
double default_weight(Task task);

}  // namespace grvae
