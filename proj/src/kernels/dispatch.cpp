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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "grvae/kernels.hpp"

namespace grvae::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& table_for(Isa isa) {
  if (isa == Isa::kAvx2) return *avx2_table();
  return scalar_table();
}

Isa detect() {
  if (const char* env = std::getenv("GRVAE_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return Isa::kScalar;
    if (want == "avx2" && isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  }
  return isa_supported(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<int>& selected() {
  static std::atomic<int> isa{static_cast<int>(detect())};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  return isa == Isa::kAvx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::kScalar) return true;
  static const bool avx2 = avx2_table() != nullptr && cpu_has_avx2();
  return avx2;
}

const KernelTable& active() {
  return table_for(static_cast<Isa>(selected().load(std::memory_order_relaxed)));
}

Isa active_isa() { return static_cast<Isa>(selected().load()); }

void force_isa(Isa isa) {
  if (!isa_supported(isa))
    throw std::runtime_error("kernel variant not supported on this CPU: " +
                             std::string(isa_name(isa)));
  selected().store(static_cast<int>(isa));
}

}  // namespace grvae::kernels
