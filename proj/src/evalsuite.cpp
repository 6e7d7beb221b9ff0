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

#include "grvae/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "grvae/errors.hpp"
#include "grvae/graph_io.hpp"

namespace grvae {
namespace {

constexpr std::size_t kDecodeChunk = 500;

std::string exact_key(const GraphOneHot& g) {
  std::string key = "x:";
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) key.push_back(static_cast<char>(g.label(i)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) key.push_back(static_cast<char>(g.edge(i, j)));
  return key;
}

// Canonical key, or the exact key when canonicalization is refused.
std::string match_key(const GraphOneHot& g, MatchMode mode, const CanonicalOptions& options, bool& fell_back) {
  fell_back = false;
  if (mode == MatchMode::kExact) return exact_key(g);
  try {
    return "c:" + canonical_form(g, options);
  } catch (const CanonicalizationError&) {
    fell_back = true;
    return exact_key(g);
  }
}

// Decodes latent rows in chunks and argmax-decodes each.
std::vector<GraphOneHot> decode_argmax(const Vae& vae, const Tensor& z) {
  const std::size_t s = z.dim(0), l = z.dim(1);
  std::vector<GraphOneHot> out;
  out.reserve(s);
  for (std::size_t start = 0; start < s; start += kDecodeChunk) {
    const std::size_t rows = std::min(kDecodeChunk, s - start);
    Tensor chunk({rows, l});
    std::copy_n(z.data().begin() + start * l, rows * l, chunk.data().begin());
    for (const GraphProb& m : decode_batch(vae, chunk)) out.push_back(argmax_decode(m));
  }
  return out;
}

}  // namespace

std::string_view match_name(MatchMode m) { return m == MatchMode::kCanonical ? "canonical" : "exact"; }

MatchMode parse_match(std::string_view name) {
  if (name == "canonical") return MatchMode::kCanonical;
  if (name == "exact") return MatchMode::kExact;
  throw ConfigError("eval.match: unknown '" + std::string(name) + "' (expected canonical|exact)");
}

std::string GraphIndex::key(const GraphOneHot& g) const {
  bool fell_back = false;
  std::string k = match_key(g, mode_, options_, fell_back);
  if (fell_back) ++fallbacks_;
  return k;
}

void GraphIndex::insert(const GraphOneHot& g) { keys_.insert(key(g)); }

bool GraphIndex::contains(const GraphOneHot& g) const { return keys_.contains(key(g)); }

bool same_graph(const GraphOneHot& a, const GraphOneHot& b, MatchMode mode, const CanonicalOptions& options) {
  bool fa = false, fb = false;
  const std::string ka = match_key(a, mode, options, fa);
  const std::string kb = match_key(b, mode, options, fb);
  if (fa || fb) return exact_key(a) == exact_key(b);
  return ka == kb;
}

ValidResult percent_valid(const Vae& vae, const ConstraintSpec& spec, Task task, std::size_t n, Rng& rng,
                          const ValidityOptions& validity) {
  if (n == 0) throw ConfigError("eval.prior_samples must be >= 1");
  ValidResult r;
  r.samples = decode_argmax(vae, sample_prior(vae, rng, n));
  std::size_t count = 0;
  for (const GraphOneHot& g : r.samples) {
    const bool ok = is_valid(g, spec, task, validity);
    r.valid.push_back(ok);
    count += ok;
  }
  r.percent = 100.0 * static_cast<double>(count) / static_cast<double>(n);
  return r;
}

NoveltyResult percent_novel(const ValidResult& samples, const GraphIndex& training) {
  NoveltyResult r;
  for (std::size_t i = 0; i < samples.samples.size(); ++i) {
    if (!samples.valid[i]) continue;
    ++r.valid;
    if (!training.contains(samples.samples[i])) ++r.novel;
  }
  if (r.valid) r.percent = 100.0 * static_cast<double>(r.novel) / static_cast<double>(r.valid);
  return r;
}

ReconResult percent_recon(const Vae& vae, const std::vector<GraphOneHot>& holdout, std::size_t encodes,
                          Rng& rng, MatchMode match, const CanonicalOptions& options) {
  if (encodes == 0) throw ConfigError("eval.recon_encodes must be >= 1");
  const std::size_t l = vae.config.latent_dim;
  ReconResult r;
  r.total = holdout.size();
  for (const GraphOneHot& g : holdout) {
    auto [mean, var] = encode(vae, g);
    Tensor eps = standard_normal(rng, encodes, l);
    Tensor z({encodes, l});
    for (std::size_t k = 0; k < encodes; ++k)
      for (std::size_t j = 0; j < l; ++j) z[k * l + j] = mean[j] + std::sqrt(var[j]) * eps[k * l + j];
    bool fell_back = false;
    match_key(g, match, options, fell_back);
    r.fallbacks += fell_back;
    for (const GraphOneHot& d : decode_argmax(vae, z)) {
      const bool hit = fell_back ? exact_key(d) == exact_key(g) : same_graph(d, g, match, options);
      if (hit) {
        ++r.reconstructed;
        break;
      }
    }
  }
  if (r.total) r.percent = 100.0 * static_cast<double>(r.reconstructed) / static_cast<double>(r.total);
  return r;
}

DenoiseResult denoise_eval(const Vae& vae, const std::vector<GraphOneHot>& inputs, const ConstraintSpec& spec,
                           Task task, const ValidityOptions& validity) {
  DenoiseResult r;
  if (inputs.empty()) return r;
  const std::size_t l = vae.config.latent_dim;
  Tensor z({inputs.size(), l});
  for (std::size_t start = 0; start < inputs.size(); start += kDecodeChunk) {
    const std::size_t end = std::min(inputs.size(), start + kDecodeChunk);
    std::vector<GraphOneHot> chunk(inputs.begin() + static_cast<std::ptrdiff_t>(start),
                                   inputs.begin() + static_cast<std::ptrdiff_t>(end));
    Tape tape;
    BoundVae m = bind(tape, vae, false);
    const Tensor& mean = encode(m, tape.constant(encoder_input(chunk, vae.config))).mean.value();
    std::copy(mean.data().begin(), mean.data().end(), z.data().begin() + start * l);
  }
  r.decoded = decode_argmax(vae, z);
  std::size_t ok = 0;
  for (const GraphOneHot& g : r.decoded) ok += is_valid(g, spec, task, validity);
  r.percent = 100.0 * static_cast<double>(ok) / static_cast<double>(inputs.size());
  return r;
}

std::string_view walk_name(WalkMode m) { return m == WalkMode::kGrid ? "grid" : "interp"; }

WalkMode parse_walk(std::string_view name) {
  if (name == "grid") return WalkMode::kGrid;
  if (name == "interp") return WalkMode::kInterp;
  throw ConfigError("walk mode: unknown '" + std::string(name) + "' (expected grid|interp)");
}

std::vector<WalkCell> latent_walk(const Vae& vae, const std::vector<GraphOneHot>& anchors,
                                  const WalkOptions& options, const ConstraintSpec& spec, Task task, Rng& rng,
                                  const ValidityOptions& validity) {
  const std::size_t l = vae.config.latent_dim, k = options.steps;
  if (k == 0) throw ConfigError("walk: steps must be >= 1");
  std::vector<std::vector<double>> zs;
  std::vector<std::pair<std::size_t, std::size_t>> pos;

  if (options.mode == WalkMode::kInterp) {
    if (anchors.size() < 2) throw DataError("walk interp: need two anchor graphs");
    const Tensor a = encode(vae, anchors[0]).first, b = encode(vae, anchors[1]).first;
    for (std::size_t c = 0; c <= k; ++c) {
      const double t = static_cast<double>(c) / static_cast<double>(k);
      std::vector<double> z(l);
      for (std::size_t j = 0; j < l; ++j) z[j] = (1.0 - t) * a[j] + t * b[j];
      zs.push_back(std::move(z));
      pos.emplace_back(0, c);
    }
  } else {
    if (anchors.empty()) throw DataError("walk grid: need an anchor graph");
    if (l < 2) throw ConfigError("walk grid: latent dimension must be >= 2");
    const Tensor center = encode(vae, anchors[0]).first;
    const Tensor raw = standard_normal(rng, 2, l);
    std::vector<double> u(raw.data().begin(), raw.data().begin() + static_cast<std::ptrdiff_t>(l));
    std::vector<double> v(raw.data().begin() + static_cast<std::ptrdiff_t>(l), raw.data().end());
    auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
      double s = 0.0;
      for (std::size_t j = 0; j < l; ++j) s += x[j] * y[j];
      return s;
    };
    const double nu = std::sqrt(dot(u, u));
    for (double& x : u) x /= nu;
    const double proj = dot(u, v);
    for (std::size_t j = 0; j < l; ++j) v[j] -= proj * u[j];
    const double nv = std::sqrt(dot(v, v));
    for (double& x : v) x /= nv;
    const double half = static_cast<double>(k) / 2.0;
    for (std::size_t r = 0; r <= k; ++r)
      for (std::size_t c = 0; c <= k; ++c) {
        const double dr = (static_cast<double>(r) - half) * options.step_size;
        const double dc = (static_cast<double>(c) - half) * options.step_size;
        std::vector<double> z(l);
        for (std::size_t j = 0; j < l; ++j) z[j] = center[j] + dr * u[j] + dc * v[j];
        zs.push_back(std::move(z));
        pos.emplace_back(r, c);
      }
  }

  Tensor all({zs.size(), l});
  for (std::size_t i = 0; i < zs.size(); ++i) std::copy(zs[i].begin(), zs[i].end(), all.data().begin() + i * l);
  std::vector<GraphOneHot> graphs = decode_argmax(vae, all);
  std::vector<WalkCell> cells;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    WalkCell cell{pos[i].first, pos[i].second, Tensor({l}, zs[i]), std::move(graphs[i]), false};
    cell.valid = is_valid(cell.graph, spec, task, validity);
    cells.push_back(std::move(cell));
  }
  return cells;
}

void export_walk(const std::vector<WalkCell>& cells, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.csv");
  if (!index) throw std::runtime_error("cannot write " + (dir / "index.csv").string());
  index.precision(17);
  index << "row,col,valid,file";
  if (!cells.empty())
    for (std::size_t j = 0; j < cells.front().z.size(); ++j) index << ",z" << j;
  index << "\n";
  for (const WalkCell& c : cells) {
    const std::string file = "cell_" + std::to_string(c.row) + "_" + std::to_string(c.col) + ".dot";
    std::ofstream dot(dir / file);
    if (!dot) throw std::runtime_error("cannot write " + (dir / file).string());
    dot << to_dot(c.graph, "cell_" + std::to_string(c.row) + "_" + std::to_string(c.col));
    index << c.row << "," << c.col << "," << (c.valid ? 1 : 0) << "," << file;
    for (double v : c.z.data()) index << "," << v;
    index << "\n";
  }
}

std::vector<ProtocolDeviation> protocol_deviations(const EvalOptions& o, std::size_t holdout_size,
                                                   bool recon_run) {
  std::vector<ProtocolDeviation> out;
  if (o.prior_samples != kProtocolPriorSamples)
    out.push_back({"prior_samples", std::to_string(kProtocolPriorSamples), std::to_string(o.prior_samples)});
  if (recon_run) {
    if (o.recon_encodes != kProtocolReconEncodes)
      out.push_back({"recon_encodes", std::to_string(kProtocolReconEncodes), std::to_string(o.recon_encodes)});
    if (holdout_size != kProtocolHoldout)
      out.push_back({"holdout_size", std::to_string(kProtocolHoldout), std::to_string(holdout_size)});
    out.push_back({"recon_success", "unstated", "any-of-" + std::to_string(o.recon_encodes)});
  }
  out.push_back({"graph_match", "unstated", std::string(match_name(o.match))});
  if (o.validity.empty_molecule_valid) out.push_back({"empty_molecule", "unstated", "valid"});
  else out.push_back({"empty_molecule", "unstated", "invalid"});
  return out;
}

}  // namespace grvae
