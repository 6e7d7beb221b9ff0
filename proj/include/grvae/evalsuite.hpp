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

#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "grvae/canonical.hpp"
#include "grvae/constraints.hpp"
#include "grvae/oracles.hpp"
#include "grvae/vae.hpp"

namespace grvae {

// Reference protocol values.
inline constexpr std::size_t kProtocolPriorSamples = 1000;
inline constexpr std::size_t kProtocolReconEncodes = 10;
inline constexpr std::size_t kProtocolHoldout = 5000;

enum class MatchMode { kCanonical, kExact };
std::string_view match_name(MatchMode m);
MatchMode parse_match(std::string_view name);

struct EvalOptions {
  std::size_t prior_samples = kProtocolPriorSamples;
  std::size_t recon_encodes = kProtocolReconEncodes;
  MatchMode match = MatchMode::kCanonical;
  ValidityOptions validity;
  CanonicalOptions canonical;
};

// Set of graphs keyed by canonical form, or by exact tensors. Graphs whose
// canonicalization exceeds the cell bound fall back to exact keys; the number
// of fallbacks is counted.
class GraphIndex {
 public:
  explicit GraphIndex(MatchMode mode = MatchMode::kCanonical, CanonicalOptions options = {})
      : mode_(mode), options_(options) {}

  void insert(const GraphOneHot& g);
  bool contains(const GraphOneHot& g) const;
  std::size_t size() const { return keys_.size(); }
  std::size_t fallbacks() const { return fallbacks_; }

  // Key used for g: "c:" + canonical form or "x:" + exact encoding.
  std::string key(const GraphOneHot& g) const;

 private:
  MatchMode mode_;
  CanonicalOptions options_;
  std::unordered_set<std::string> keys_;
  mutable std::size_t fallbacks_ = 0;
};

// Both graphs equal under the match mode.
bool same_graph(const GraphOneHot& a, const GraphOneHot& b, MatchMode mode,
                const CanonicalOptions& options = {});

struct ValidResult {
  double percent = 0.0;
  std::vector<GraphOneHot> samples;  // one argmax decode per prior draw
  std::vector<bool> valid;
};

// Draws n latents from the prior and decodes each once by argmax.
ValidResult percent_valid(const Vae& vae, const ConstraintSpec& spec, Task task, std::size_t n, Rng& rng,
                          const ValidityOptions& validity = {});

struct NoveltyResult {
  double percent = 0.0;     // novel among valid samples; 0 when none is valid
  std::size_t valid = 0;
  std::size_t novel = 0;
};

// Among valid samples, share absent from the training index.
NoveltyResult percent_novel(const ValidResult& samples, const GraphIndex& training);

struct ReconResult {
  double percent = 0.0;
  std::size_t reconstructed = 0;
  std::size_t total = 0;
  std::size_t fallbacks = 0;
};

// Success when any of `encodes` posterior draws decodes to the input.
ReconResult percent_recon(const Vae& vae, const std::vector<GraphOneHot>& holdout, std::size_t encodes,
                          Rng& rng, MatchMode match = MatchMode::kCanonical,
                          const CanonicalOptions& options = {});

struct DenoiseResult {
  double percent = 0.0;
  std::vector<GraphOneHot> decoded;
};

// Posterior mean of each input, argmax-decoded, checked for validity.
DenoiseResult denoise_eval(const Vae& vae, const std::vector<GraphOneHot>& inputs, const ConstraintSpec& spec,
                           Task task, const ValidityOptions& validity = {});

enum class WalkMode { kGrid, kInterp };
std::string_view walk_name(WalkMode m);
WalkMode parse_walk(std::string_view name);

struct WalkCell {
  std::size_t row = 0;
  std::size_t col = 0;
  Tensor z;
  GraphOneHot graph;
  bool valid = false;
};

struct WalkOptions {
  WalkMode mode = WalkMode::kInterp;
  std::size_t steps = 8;    // steps+1 cells per row
  double step_size = 0.5;   // grid spacing in latent units
};

// grid: (steps+1)^2 cells centred on the first anchor's posterior mean, moving
// along two random orthonormal directions. interp: one row from the first
// anchor's posterior mean to the second's.
std::vector<WalkCell> latent_walk(const Vae& vae, const std::vector<GraphOneHot>& anchors,
                                  const WalkOptions& options, const ConstraintSpec& spec, Task task, Rng& rng,
                                  const ValidityOptions& validity = {});

// Writes cell_<row>_<col>.dot per cell and index.csv (row,col,valid,file,z0..).
void export_walk(const std::vector<WalkCell>& cells, const std::filesystem::path& dir);

struct ProtocolDeviation {
  std::string parameter;
  std::string reference;
  std::string used;
};

// Differences between the options in use and the reference protocol,
// including choices the reference leaves open.
std::vector<ProtocolDeviation> protocol_deviations(const EvalOptions& options, std::size_t holdout_size,
                                                   bool recon_run);

}  // namespace grvae
