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

#ifndef GT2FLS_PARAMS_HPP_
#define GT2FLS_PARAMS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace gt2fls {

// Lowest admissible alpha-plane; ln(alpha) is unbounded at zero.
inline constexpr double kAlpha0 = 0.01;

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<double> flat() noexcept { return data_; }
  std::span<const double> flat() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Learnable parameters of a Zadeh-type general type-2 fuzzy system with P
// rules over M inputs. The secondary deviations are shared across rules.
struct ModelParams {
  Matrix centers;                 // P x M
  Matrix sigma;                   // P x M, > 0
  std::vector<double> sigma_l;    // M, > 0
  std::vector<double> sigma_r;    // M, > 0
  Matrix slopes;                  // P x M
  std::vector<double> intercepts; // P

  ModelParams() = default;
  // Zero slopes/centers/intercepts, unit sigma, 0.1 secondary deviations.
  ModelParams(std::size_t rules, std::size_t inputs);

  std::size_t rules() const noexcept { return centers.rows(); }
  std::size_t inputs() const noexcept { return centers.cols(); }

  // Number of scalars actually stored; equals learnable_parameter_count().
  std::size_t learnable_count() const noexcept;

  // Throws Error(kInvalidConfig) on shape mismatch or non-positive deviations.
  void validate() const;

  bool operator==(const ModelParams&) const = default;
};

// (2P + 2)M + P(M + 1)
constexpr std::size_t learnable_parameter_count(std::size_t rules, std::size_t inputs) {
  return (2 * rules + 2) * inputs + rules * (inputs + 1);
}

// Secondary membership level, restricted to [kAlpha0, 1].
class AlphaLevel {
 public:
  // Throws Error(kDomain) outside [0.01, 1] or for non-finite values.
  explicit AlphaLevel(double value);

  double value() const noexcept { return value_; }
  // sqrt(-2 ln alpha): half-width multiplier of the secondary MF at this level.
  double spread() const noexcept { return spread_; }

  friend bool operator==(AlphaLevel a, AlphaLevel b) { return a.value_ == b.value_; }

 private:
  double value_;
  double spread_;
};

// The plane stack {0.01, 0.1, 0.2, ..., 1.0}.
std::vector<AlphaLevel> default_plane_stack();

struct FiringIntervals {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct TypeReducedSet {
  double lo = 0.0;
  double hi = 0.0;
};

}  // namespace gt2fls

#endif  // GT2FLS_PARAMS_HPP_
