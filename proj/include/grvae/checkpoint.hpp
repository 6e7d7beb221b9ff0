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

// Checkpoint files are JSON:
//
//   {"format": "grvae-checkpoint", "version": 1, "library_version": "...",
//    "epoch": 12, "config": {<materialized experiment config>},
//    "params": [{"name": "dec.out.b", "shape": [104], "data": [...]}, ...]}
//
// Reals are written in shortest round-trip form, so loading reproduces the
// parameters bit for bit.

#include <filesystem>
#include <string>

#include "grvae/config.hpp"
#include "grvae/vae.hpp"

namespace grvae {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  ExperimentConfig config;
  Vae vae;
  std::size_t epoch = 0;
};

std::string checkpoint_to_string(const Checkpoint& ckpt);
// Throws DataError on malformed content, ConfigError on inconsistent config.
Checkpoint checkpoint_from_string(const std::string& text);

// Writes through a temporary file and a rename.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace grvae
