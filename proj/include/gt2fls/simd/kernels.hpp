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

#ifndef GT2FLS_SIMD_KERNELS_HPP_
#define GT2FLS_SIMD_KERNELS_HPP_

// Data-parallel inner loops of inference and interval scoring. Every kernel
// has a scalar reference implementation; vector variants are selected at
// runtime from the CPU's capabilities and must agree with the reference
// (exactly for counts, to a few ulp for transcendental results).

#include <cstddef>
#include <span>
#include <string_view>

namespace gt2fls::simd {

// Membership grades below this are treated as this when taking logs.
inline constexpr double kMembershipFloor = 1e-300;

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend backend);

struct KernelTable {
  Backend backend;

  // gamma[i] = exp(-0.5 * ((x[i] - center[i]) / sigma[i])^2)
  void (*gaussian)(std::span<const double> x, std::span<const double> center,
                   std::span<const double> sigma, std::span<double> gamma);

  // upper[i] = min(gamma[i] + spread * sigma_r[i], 1)
  // lower[i] = max(gamma[i] - spread * sigma_l[i], 0)
  // log_*[i] = ln(max(*[i], kMembershipFloor))
  void (*secondary)(std::span<const double> gamma, std::span<const double> sigma_l,
                    std::span<const double> sigma_r, double spread, std::span<double> lower,
                    std::span<double> upper, std::span<double> log_lower,
                    std::span<double> log_upper);

  // Number of i with lo[i] <= y[i] <= hi[i].
  std::size_t (*coverage_count)(std::span<const double> y, std::span<const double> lo,
                                std::span<const double> hi);

  // Sum of hi[i] - lo[i].
  double (*width_sum)(std::span<const double> lo, std::span<const double> hi);

  // Sum of (y[i] - yhat[i])^2.
  double (*squared_error_sum)(std::span<const double> y, std::span<const double> yhat);
};

const KernelTable& scalar_kernels();
#if defined(GT2FLS_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif

// True when the library was built with AVX2 kernels and the CPU has AVX2+FMA.
bool avx2_available();

// Active table. Chosen on first use: AVX2 when available unless the
// environment variable GT2FLS_SIMD=scalar is set.
const KernelTable& kernels();

// Throws Error(kInvalidConfig) when the backend is not available.
void set_backend(Backend backend);
const KernelTable& kernels_for(Backend backend);

}  // namespace gt2fls::simd

#endif  // GT2FLS_SIMD_KERNELS_HPP_
