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

#include "grvae/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "grvae/errors.hpp"
#include "json_codec.hpp"

namespace grvae {

std::string checkpoint_to_string(const Checkpoint& ckpt) {
  Json j;
  j["format"] = "grvae-checkpoint";
  j["version"] = kCheckpointVersion;
  j["library_version"] = GRVAE_VERSION;
  j["epoch"] = ckpt.epoch;
  j["config"] = config_json(ckpt.config);
  Json params = Json::array();
  for (const auto& [name, t] : ckpt.vae.params)
    params.push_back({{"name", name}, {"shape", t.shape()}, {"data", t.values()}});
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (j.value("format", "") != "grvae-checkpoint") throw DataError("checkpoint: not a grvae checkpoint");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion)
      throw DataError("checkpoint: unsupported version " + std::to_string(version));
    Checkpoint c;
    c.epoch = j.at("epoch").get<std::size_t>();
    c.config = config_from_json(j.at("config"), Task::kCompatibility);
    c.vae.config = c.config.model;
    for (const Json& p : j.at("params")) {
      Shape shape = p.at("shape").get<Shape>();
      std::vector<double> data = p.at("data").get<std::vector<double>>();
      const std::string name = p.at("name").get<std::string>();
      try {
        c.vae.params.emplace(name, Tensor(std::move(shape), std::move(data)));
      } catch (const ShapeError& e) {
        throw DataError("checkpoint: parameter '" + name + "': " + e.what());
      }
    }
    c.vae.check();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << checkpoint_to_string(ckpt);
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read checkpoint " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace grvae
