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

#include "gt2fls/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "gt2fls/error.hpp"
#include "gt2fls/simd/kernels.hpp"

namespace gt2fls {
namespace {

void check_lengths(std::span<const double> y, std::span<const double> lo,
                   std::span<const double> hi) {
  if (y.empty()) throw Error(ErrorCode::kEmptySet, "no samples to score");
  if (lo.size() != y.size() || hi.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "targets and interval bounds differ in length");
  }
}

}  // namespace

double picp(std::span<const double> y, std::span<const double> lo, std::span<const double> hi) {
  check_lengths(y, lo, hi);
  const std::size_t covered = simd::kernels().coverage_count(y, lo, hi);
  return static_cast<double>(covered) / static_cast<double>(y.size());
}

double pinaw(std::span<const double> y, std::span<const double> lo, std::span<const double> hi) {
  check_lengths(y, lo, hi);
  const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
  const double range = *max_it - *min_it;
  if (!(range > 0.0)) throw Error(ErrorCode::kDegenerateRange, "target range is zero");
  const double mean_width = simd::kernels().width_sum(lo, hi) / static_cast<double>(y.size());
  return mean_width / range;
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
  if (y.empty()) throw Error(ErrorCode::kEmptySet, "no samples to score");
  if (yhat.size() != y.size()) {
    throw Error(ErrorCode::kInvalidInput, "targets and predictions differ in length");
  }
  return std::sqrt(simd::kernels().squared_error_sum(y, yhat) / static_cast<double>(y.size()));
}

}  // namespace gt2fls
