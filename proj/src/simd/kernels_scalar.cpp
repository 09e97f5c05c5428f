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

#include <algorithm>
#include <cmath>

#include "gt2fls/simd/kernels.hpp"

namespace gt2fls::simd {
namespace {

void gaussian_scalar(std::span<const double> x, std::span<const double> center,
                     std::span<const double> sigma, std::span<double> gamma) {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double z = (x[i] - center[i]) / sigma[i];
    gamma[i] = std::exp(-0.5 * z * z);
  }
}

void secondary_scalar(std::span<const double> gamma, std::span<const double> sigma_l,
                      std::span<const double> sigma_r, double spread, std::span<double> lower,
                      std::span<double> upper, std::span<double> log_lower,
                      std::span<double> log_upper) {
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const double up = std::min(gamma[i] + spread * sigma_r[i], 1.0);
    const double lo = std::max(gamma[i] - spread * sigma_l[i], 0.0);
    upper[i] = up;
    lower[i] = lo;
    log_upper[i] = std::log(std::max(up, kMembershipFloor));
    log_lower[i] = std::log(std::max(lo, kMembershipFloor));
  }
}

std::size_t coverage_count_scalar(std::span<const double> y, std::span<const double> lo,
                                  std::span<const double> hi) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (lo[i] <= y[i] && y[i] <= hi[i]) ++count;
  }
  return count;
}

double width_sum_scalar(std::span<const double> lo, std::span<const double> hi) {
  double sum = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) sum += hi[i] - lo[i];
  return sum;
}

double squared_error_sum_scalar(std::span<const double> y, std::span<const double> yhat) {
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = y[i] - yhat[i];
    sum += r * r;
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::kScalar,      gaussian_scalar,
                                 secondary_scalar,      coverage_count_scalar,
                                 width_sum_scalar,      squared_error_sum_scalar};
  return table;
}

}  // namespace gt2fls::simd
