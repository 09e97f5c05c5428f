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

#ifndef GT2FLS_METRICS_HPP_
#define GT2FLS_METRICS_HPP_

#include <span>

namespace gt2fls {

// Fraction of samples with lo <= y <= hi. Throws Error(kEmptySet) for Q = 0.
double picp(std::span<const double> y, std::span<const double> lo, std::span<const double> hi);

// Mean interval width over the target range. Throws Error(kDegenerateRange)
// when the targets are constant.
double pinaw(std::span<const double> y, std::span<const double> lo, std::span<const double> hi);

double rmse(std::span<const double> y, std::span<const double> yhat);

}  // namespace gt2fls

#endif  // GT2FLS_METRICS_HPP_
