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

#include "gt2fls/params.hpp"

#include <cmath>
#include <string>

#include "gt2fls/error.hpp"

namespace gt2fls {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

ModelParams::ModelParams(std::size_t rules, std::size_t inputs)
    : centers(rules, inputs),
      sigma(rules, inputs, 1.0),
      sigma_l(inputs, 0.1),
      sigma_r(inputs, 0.1),
      slopes(rules, inputs),
      intercepts(rules, 0.0) {}

std::size_t ModelParams::learnable_count() const noexcept {
  return centers.size() + sigma.size() + sigma_l.size() + sigma_r.size() +
         slopes.size() + intercepts.size();
}

namespace {

void require_positive(std::span<const double> values, const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(name) + "[" + std::to_string(i) + "] must be finite and > 0");
    }
  }
}

void require_finite(std::span<const double> values, const char* name) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw Error(ErrorCode::kInvalidConfig,
                  std::string(name) + "[" + std::to_string(i) + "] is not finite");
    }
  }
}

}  // namespace

void ModelParams::validate() const {
  const std::size_t p = rules();
  const std::size_t m = inputs();
  if (p == 0 || m == 0) {
    throw Error(ErrorCode::kInvalidConfig, "model needs at least one rule and one input");
  }
  if (sigma.rows() != p || sigma.cols() != m || slopes.rows() != p || slopes.cols() != m ||
      sigma_l.size() != m || sigma_r.size() != m || intercepts.size() != p) {
    throw Error(ErrorCode::kInvalidConfig, "parameter shapes disagree with P x M = " +
                                               std::to_string(p) + " x " + std::to_string(m));
  }
  require_finite(centers.flat(), "c");
  require_positive(sigma.flat(), "sigma");
  require_positive(sigma_l, "sigma_l");
  require_positive(sigma_r, "sigma_r");
  require_finite(slopes.flat(), "a");
  require_finite(intercepts, "a0");
}

AlphaLevel::AlphaLevel(double value) : value_(value), spread_(0.0) {
  if (!std::isfinite(value) || value < kAlpha0 || value > 1.0) {
    throw Error(ErrorCode::kDomain,
                "alpha must lie in [0.01, 1], got " + std::to_string(value));
  }
  spread_ = value == 1.0 ? 0.0 : std::sqrt(-2.0 * std::log(value));
}

std::vector<AlphaLevel> default_plane_stack() {
  std::vector<AlphaLevel> planes;
  planes.emplace_back(kAlpha0);
  for (int k = 1; k <= 10; ++k) planes.emplace_back(k / 10.0);
  return planes;
}

}  // namespace gt2fls
