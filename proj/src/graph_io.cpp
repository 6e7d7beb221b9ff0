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

#include "grvae/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "grvae/errors.hpp"

namespace grvae {

using json = nlohmann::ordered_json;

std::string serialize(const GraphOneHot& g) {
  std::vector<std::size_t> slot(g.size(), 0);
  std::vector<int> labels;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_ghost(i)) {
      if (g.degree(i) != 0)
        throw std::invalid_argument("serialize: ghost node " + std::to_string(i) +
                                    " has incident edges");
      continue;
    }
    slot[i] = labels.size();
    labels.push_back(g.label(i));
  }
  json edges = json::array();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.edge(i, j) != 0) edges.push_back({slot[i], slot[j], g.edge(i, j)});
  json rec;
  rec["n"] = labels.size();
  rec["labels"] = labels;
  rec["edges"] = std::move(edges);
  return rec.dump();
}

GraphOneHot deserialize(std::string_view line, const GraphSchema& schema, std::size_t line_no) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(line_no, "", std::string("malformed JSON (") + e.what() + ")");
  }
  if (!rec.is_object()) throw ParseError(line_no, "", "record is not an object");

  auto require = [&](const char* field) -> const json& {
    auto it = rec.find(field);
    if (it == rec.end()) throw ParseError(line_no, field, "missing");
    return *it;
  };
  const json& jn = require("n");
  if (!jn.is_number_unsigned()) throw ParseError(line_no, "n", "not a non-negative integer");
  const std::size_t n = jn.get<std::size_t>();
  if (n > schema.max_nodes)
    throw ParseError(line_no, "n", std::to_string(n) + " exceeds N=" + std::to_string(schema.max_nodes));

  GraphOneHot g(schema);
  const json& jl = require("labels");
  if (!jl.is_array() || jl.size() != n)
    throw ParseError(line_no, "labels", "expected an array of " + std::to_string(n) + " types");
  for (std::size_t i = 0; i < n; ++i) {
    const json& v = jl[i];
    if (!v.is_number_integer() || v.get<long long>() < 1 ||
        v.get<long long>() > static_cast<long long>(schema.node_types))
      throw ParseError(line_no, "labels[" + std::to_string(i) + "]",
                       "node type must be in 1.." + std::to_string(schema.node_types));
    g.set_label(i, v.get<int>());
  }

  const json& je = require("edges");
  if (!je.is_array()) throw ParseError(line_no, "edges", "not an array");
  for (std::size_t e = 0; e < je.size(); ++e) {
    const std::string field = "edges[" + std::to_string(e) + "]";
    const json& t = je[e];
    if (!t.is_array() || t.size() != 3 || !t[0].is_number_unsigned() || !t[1].is_number_unsigned() ||
        !t[2].is_number_integer())
      throw ParseError(line_no, field, "expected [i, j, k]");
    const auto i = t[0].get<std::size_t>(), j = t[1].get<std::size_t>();
    const auto k = t[2].get<long long>();
    if (!(i < j && j < n)) throw ParseError(line_no, field, "need i < j < n");
    if (k < 1 || k > static_cast<long long>(schema.edge_types))
      throw ParseError(line_no, field, "edge type must be in 1.." + std::to_string(schema.edge_types));
    if (g.edge(i, j) != 0) throw ParseError(line_no, field, "duplicate edge");
    g.set_edge(i, j, static_cast<int>(k));
  }
  return g;
}

std::vector<GraphOneHot> read_dataset(std::istream& in, const GraphSchema& schema) {
  std::vector<GraphOneHot> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(deserialize(line, schema, line_no));
  }
  return out;
}

std::vector<GraphOneHot> read_dataset(const std::filesystem::path& path, const GraphSchema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset " + path.string());
  return read_dataset(in, schema);
}

void write_dataset(std::ostream& out, const std::vector<GraphOneHot>& graphs) {
  for (const auto& g : graphs) out << serialize(g) << '\n';
}

void write_dataset(const std::filesystem::path& path, const std::vector<GraphOneHot>& graphs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset " + path.string());
  write_dataset(out, graphs);
}

std::string to_dot(const GraphOneHot& g, std::string_view name) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << "  n" << i << " [label=\"" << g.label(i) << "\"";
    if (g.is_ghost(i)) os << ", style=dashed";
    os << "];\n";
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j)
      if (g.edge(i, j)) os << "  n" << i << " -- n" << j << " [label=\"" << g.edge(i, j) << "\"];\n";
  os << "}\n";
  return os.str();
}

}  // namespace grvae
