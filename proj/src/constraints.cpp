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

#include "grvae/constraints.hpp"

#include "grvae/errors.hpp"

namespace grvae {

std::string_view task_name(Task task) {
  return task == Task::kMolecule ? "molecule" : "compat";
}

Task parse_task(std::string_view name) {
  if (name == "molecule") return Task::kMolecule;
  if (name == "compat" || name == "compatibility") return Task::kCompatibility;
  throw ConfigError("unknown task '" + std::string(name) + "' (expected molecule|compat)");
}

double ConstraintSpec::compatible(int r, int s) const {
  const std::size_t dc = node_capacity.size();
  return compatibility.at(static_cast<std::size_t>(r) * dc + static_cast<std::size_t>(s));
}

void ConstraintSpec::validate(const GraphSchema& schema) const {
  const std::size_t dc = schema.node_channels(), tc = schema.edge_channels();
  if (edge_capacity.size() != tc)
    throw ConfigError("constraints.edge_capacity: expected " + std::to_string(tc) + " entries");
  if (node_capacity.size() != dc)
    throw ConfigError("constraints.node_capacity: expected " + std::to_string(dc) + " entries");
  if (compatibility.size() != dc * dc)
    throw ConfigError("constraints.compatibility: expected " + std::to_string(dc) + "x" +
                      std::to_string(dc) + " entries");
  if (edge_capacity[0] != 0.0) throw ConfigError("constraints.edge_capacity[0] must be 0");
  if (node_capacity[0] != 0.0) throw ConfigError("constraints.node_capacity[0] must be 0");
  for (double h : edge_capacity)
    if (!(h >= 0.0)) throw ConfigError("constraints.edge_capacity: negative entry");
  for (double u : node_capacity)
    if (!(u >= 0.0)) throw ConfigError("constraints.node_capacity: negative entry");
  for (std::size_t r = 0; r < dc; ++r)
    for (std::size_t s = 0; s < dc; ++s) {
      const double v = compatibility[r * dc + s];
      if (v != 0.0 && v != 1.0) throw ConfigError("constraints.compatibility: entries must be 0 or 1");
      if (v != compatibility[s * dc + r]) throw ConfigError("constraints.compatibility: not symmetric");
      if ((r == 0 || s == 0) && v != 0.0)
        throw ConfigError("constraints.compatibility: ghost row/column must be 0");
    }
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("constraints.alpha must lie in (0, 1)");
  if (!(sharpness > 0.0)) throw ConfigError("constraints.sharpness must be > 0");
}

const std::vector<std::vector<int>>& benchmark_compatibility() {
  static const std::vector<std::vector<int>> kD = {
      {0, 1, 1, 1, 0},
      {1, 0, 1, 0, 1},
      {1, 1, 0, 1, 1},
      {1, 0, 1, 0, 0},
      {0, 1, 1, 0, 0},
  };
  return kD;
}

std::vector<double> pad_compatibility(const std::vector<std::vector<int>>& inner) {
  const std::size_t d = inner.size(), dc = d + 1;
  std::vector<double> out(dc * dc, 0.0);
  for (std::size_t r = 0; r < d; ++r) {
    if (inner[r].size() != d) throw ConfigError("compatibility matrix is not square");
    for (std::size_t s = 0; s < d; ++s) out[(r + 1) * dc + (s + 1)] = inner[r][s];
  }
  return out;
}

ConstraintSpec generic_constraints(const GraphSchema& schema,
                                   const std::vector<std::vector<int>>& compatibility) {
  ConstraintSpec spec;
  spec.edge_capacity.assign(schema.edge_channels(), 1.0);
  spec.edge_capacity[0] = 0.0;
  spec.node_capacity.assign(schema.node_channels(), static_cast<double>(schema.max_nodes - 1));
  spec.node_capacity[0] = 0.0;
  if (compatibility.empty()) {
    std::vector<std::vector<int>> all(schema.node_types, std::vector<int>(schema.node_types, 1));
    spec.compatibility = pad_compatibility(all);
  } else {
    if (compatibility.size() != schema.node_types)
      throw ConfigError("compatibility matrix must be d x d with d=" + std::to_string(schema.node_types));
    spec.compatibility = pad_compatibility(compatibility);
  }
  spec.validate(schema);
  return spec;
}

ConstraintSpec molecular_constraints(const GraphSchema& schema, const std::vector<double>& valences) {
  if (valences.size() != schema.node_types)
    throw ConfigError("need one valence per node type (d=" + std::to_string(schema.node_types) + ")");
  ConstraintSpec spec;
  spec.edge_capacity.resize(schema.edge_channels());
  for (std::size_t k = 0; k < spec.edge_capacity.size(); ++k) spec.edge_capacity[k] = static_cast<double>(k);
  spec.node_capacity.assign(1, 0.0);
  spec.node_capacity.insert(spec.node_capacity.end(), valences.begin(), valences.end());
  std::vector<std::vector<int>> all(schema.node_types, std::vector<int>(schema.node_types, 1));
  spec.compatibility = pad_compatibility(all);
  spec.validate(schema);
  return spec;
}

const std::vector<AtomType>& default_atoms() {
  static const std::vector<AtomType> kAtoms = {{"C", 4}, {"N", 3}, {"O", 2}, {"H", 1}};
  return kAtoms;
}

bool Regularizer::active() const {
  return (use_valence && valence_weight != 0.0) || (use_connectivity && connectivity_weight != 0.0) ||
         (use_compatibility && compatibility_weight != 0.0);
}

double default_weight(Task task) { return task == Task::kMolecule ? 1.0 : 5.0; }

Regularizer Regularizer::for_task(Task task, double weight) {
  Regularizer r;
  r.use_valence = true;
  r.valence_weight = weight;
  if (task == Task::kMolecule) {
    r.use_connectivity = true;
    r.connectivity_weight = weight;
  } else {
    r.use_compatibility = true;
    r.compatibility_weight = weight;
  }
  return r;
}

}  // namespace grvae
