// Copyright 2026 The gt2fls Authors
//
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
#include <string>

#include "gt2fls/error.hpp"
#include "gt2fls/simd/kernels.hpp"

namespace gt2fls::simd {
namespace {

const KernelTable* initial_table() {
  const char* env = std::getenv("GT2FLS_SIMD");
  if (env != nullptr && std::string(env) == "scalar") return &scalar_kernels();
#if defined(GT2FLS_HAVE_AVX2)
  if (avx2_available()) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::kScalar: return "scalar";
    case Backend::kAvx2: return "avx2";
  }
  return "unknown";
}

bool avx2_available() {
#if defined(GT2FLS_HAVE_AVX2)
  static const bool available = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return available;
#else
  return false;
#endif
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

const KernelTable& kernels_for(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return scalar_kernels();
    case Backend::kAvx2:
#if defined(GT2FLS_HAVE_AVX2)
      if (avx2_available()) return avx2_kernels();
#endif
      break;
  }
  throw Error(ErrorCode::kInvalidConfig,
              "kernel backend '" + std::string(backend_name(backend)) + "' is not available");
}

void set_backend(Backend backend) {
  active().store(&kernels_for(backend), std::memory_order_release);
}

}  // namespace gt2fls::simd
