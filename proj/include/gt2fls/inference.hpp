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

#ifndef GT2FLS_INFERENCE_HPP_
#define GT2FLS_INFERENCE_HPP_

// Forward inference of the Zadeh-type general type-2 fuzzy system. Each
// alpha-plane behaves as an interval type-2 system: Gaussian primary
// memberships, a secondary spread of sqrt(-2 ln alpha) * sigma_{l,r}, product
// t-norm firing intervals, and Karnik-Mendel type reduction over linear
// consequents.

#include <cstddef>
#include <span>
#include <vector>

#include "gt2fls/params.hpp"
#include "gt2fls/simd/kernels.hpp"

namespace gt2fls {

// gamma(p, m) = exp(-(x_m - c_pm)^2 / (2 sigma_pm^2)).
// Throws Error(kInvalidInput) for a wrong-sized or non-finite x.
Matrix pmf_eval(std::span<const double> x, const ModelParams& params);

struct MembershipBounds {
  Matrix lower;
  Matrix upper;
};

// Lower/upper membership grades of the alpha-plane, clamped into [0, 1].
MembershipBounds smf_bounds(const Matrix& gamma, AlphaLevel alpha, const ModelParams& params);

// Product t-norm firing intervals (log domain). Throws
// Error(kDegenerateFiring) when every upper firing underflows to zero.
FiringIntervals firing_intervals(std::span<const double> x, AlphaLevel alpha,
                                 const ModelParams& params);

// y_p = sum_m a_pm x_m + a_p0
std::vector<double> consequent_values(std::span<const double> x, const ModelParams& params);

// Karnik-Mendel solution together with the switch points needed for
// differentiation. order holds rule indices sorted by ascending consequent.
// For the lower endpoint sorted positions [0, left_switch) take the upper
// firing and the rest the lower firing; for the upper endpoint positions
// [0, right_switch) take the lower firing and the rest the upper firing.
struct KmSolution {
  TypeReducedSet trs;
  std::vector<std::size_t> order;
  std::size_t left_switch = 0;
  std::size_t right_switch = 0;
  double lower_weight_sum = 0.0;
  double upper_weight_sum = 0.0;
};

// Iterative KM on arbitrarily scaled non-negative firing intervals.
// Throws Error(kDegenerateFiring) when no admissible weighting exists.
KmSolution km_solve(std::span<const double> lower, std::span<const double> upper,
                    std::span<const double> y);

// Throws Error(kDegenerateFiring) when sum of upper firings < 1e-15.
TypeReducedSet km_type_reduce(const FiringIntervals& firing, std::span<const double> y);

double alpha_plane_center(const TypeReducedSet& trs);

// sum_k centers_k alpha_k / sum_k alpha_k
double gt2_aggregate(std::span<const double> centers, std::span<const double> alphas);

struct Prediction {
  double lo = 0.0;
  double hi = 0.0;
  double y = 0.0;
};

// Interval at `alpha` and the point output aggregated over `planes`.
Prediction predict(std::span<const double> x, AlphaLevel alpha, const ModelParams& params,
                   std::span<const AlphaLevel> planes);

// Per-plane intermediate values. Firing intervals are rescaled so the
// largest upper firing is 1; KM output is invariant to a common scale and
// this keeps high-dimensional products away from underflow.
struct PlaneState {
  double alpha = 1.0;
  double spread = 0.0;
  std::vector<double> lower;      // P x M
  std::vector<double> upper;      // P x M
  std::vector<double> log_lower;  // P x M
  std::vector<double> log_upper;  // P x M
  std::vector<double> firing_lower;  // P
  std::vector<double> firing_upper;  // P
  double log_scale = 0.0;
  KmSolution km;
};

// Reusable single-sample evaluator bound to one model. Not thread-safe;
// use one per thread. The model must outlive the evaluator.
class RuleEvaluator {
 public:
  explicit RuleEvaluator(const ModelParams& params);

  // Computes primary memberships and consequents for x.
  void set_input(std::span<const double> x);

  void evaluate(AlphaLevel alpha, PlaneState& out) const;

  TypeReducedSet interval(AlphaLevel alpha);
  double point(std::span<const AlphaLevel> planes);
  Prediction predict(AlphaLevel alpha, std::span<const AlphaLevel> planes);

  const ModelParams& params() const { return *params_; }
  std::span<const double> input() const { return x_; }
  std::span<const double> gamma() const { return gamma_; }
  std::span<const double> consequents() const { return consequents_; }

 private:
  const ModelParams* params_;
  const simd::KernelTable* kernels_;
  std::vector<double> sigma_l_tiled_;
  std::vector<double> sigma_r_tiled_;
  std::vector<double> x_;
  std::vector<double> x_tiled_;
  std::vector<double> gamma_;
  std::vector<double> consequents_;
  PlaneState scratch_;
};

// Caches alpha-independent quantities for a fixed set of rows so intervals at
// many alpha levels are cheap. const member functions are thread-safe.
class BatchPredictor {
 public:
  BatchPredictor(const ModelParams& params, const Matrix& features);

  std::size_t size() const { return rows_; }

  void intervals(AlphaLevel alpha, std::span<double> lo, std::span<double> hi) const;
  void points(std::span<const AlphaLevel> planes, std::span<double> y) const;

 private:
  const ModelParams* params_;
  const simd::KernelTable* kernels_;
  std::size_t rows_;
  std::vector<double> sigma_l_tiled_;
  std::vector<double> sigma_r_tiled_;
  std::vector<double> gamma_;        // rows x (P*M)
  std::vector<double> consequents_;  // rows x P
};

}  // namespace gt2fls

#endif  // GT2FLS_INFERENCE_HPP_
