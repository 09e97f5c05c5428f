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

#include "gt2fls/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "gt2fls/error.hpp"

namespace gt2fls {
namespace {

// Below this log-firing the raw product has underflowed to zero.
const double kLogUnderflow = std::log(std::numeric_limits<double>::min());

void check_input(std::span<const double> x, const ModelParams& params) {
  if (x.size() != params.inputs()) {
    throw Error(ErrorCode::kInvalidInput, "input has " + std::to_string(x.size()) +
                                              " components, model expects " +
                                              std::to_string(params.inputs()));
  }
  for (std::size_t m = 0; m < x.size(); ++m) {
    if (!std::isfinite(x[m])) {
      throw Error(ErrorCode::kInvalidInput,
                  "input component " + std::to_string(m) + " is not finite");
    }
  }
}

std::vector<double> tile_by_rule(std::span<const double> per_input, std::size_t rules) {
  std::vector<double> tiled;
  tiled.reserve(per_input.size() * rules);
  for (std::size_t p = 0; p < rules; ++p) tiled.insert(tiled.end(), per_input.begin(), per_input.end());
  return tiled;
}

void resize_plane(PlaneState& s, std::size_t rules, std::size_t inputs) {
  const std::size_t n = rules * inputs;
  s.lower.resize(n);
  s.upper.resize(n);
  s.log_lower.resize(n);
  s.log_upper.resize(n);
  s.firing_lower.resize(rules);
  s.firing_upper.resize(rules);
}

// Weighted average of sorted consequents where positions [0, k) take
// `first` and [k, P) take `second`. Returns NaN for a zero total weight.
double switched_average(std::span<const double> ys, std::span<const double> first,
                        std::span<const double> second, std::size_t k, double* weight_sum) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double w = i < k ? first[i] : second[i];
    num += w * ys[i];
    den += w;
  }
  *weight_sum = den;
  return den > 0.0 ? num / den : std::numeric_limits<double>::quiet_NaN();
}

void evaluate_plane(const ModelParams& params, const simd::KernelTable& kernels,
                    std::span<const double> gamma, std::span<const double> consequents,
                    std::span<const double> sigma_l_tiled, std::span<const double> sigma_r_tiled,
                    AlphaLevel alpha, PlaneState& out) {
  const std::size_t rules = params.rules();
  const std::size_t inputs = params.inputs();
  resize_plane(out, rules, inputs);
  out.alpha = alpha.value();
  out.spread = alpha.spread();
  kernels.secondary(gamma, sigma_l_tiled, sigma_r_tiled, out.spread, out.lower, out.upper,
                    out.log_lower, out.log_upper);

  double scale = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < rules; ++p) {
    double sum_lo = 0.0;
    double sum_up = 0.0;
    for (std::size_t m = 0; m < inputs; ++m) {
      sum_lo += out.log_lower[p * inputs + m];
      sum_up += out.log_upper[p * inputs + m];
    }
    out.firing_lower[p] = sum_lo;
    out.firing_upper[p] = sum_up;
    scale = std::max(scale, sum_up);
  }
  if (scale < kLogUnderflow) {
    throw Error(ErrorCode::kDegenerateFiring,
                "every rule's upper firing underflows at alpha=" + std::to_string(out.alpha));
  }
  out.log_scale = scale;
  for (std::size_t p = 0; p < rules; ++p) {
    const double up = std::exp(out.firing_upper[p] - scale);
    out.firing_upper[p] = up;
    out.firing_lower[p] = std::min(std::exp(out.firing_lower[p] - scale), up);
  }
  out.km = km_solve(out.firing_lower, out.firing_upper, consequents);
}

}  // namespace

Matrix pmf_eval(std::span<const double> x, const ModelParams& params) {
  check_input(x, params);
  const std::size_t rules = params.rules();
  const std::vector<double> x_tiled = tile_by_rule(x, rules);
  Matrix gamma(rules, params.inputs());
  simd::kernels().gaussian(x_tiled, params.centers.flat(), params.sigma.flat(), gamma.flat());
  return gamma;
}

MembershipBounds smf_bounds(const Matrix& gamma, AlphaLevel alpha, const ModelParams& params) {
  const std::size_t rules = params.rules();
  const std::size_t inputs = params.inputs();
  if (gamma.rows() != rules || gamma.cols() != inputs) {
    throw Error(ErrorCode::kInvalidInput, "membership matrix shape does not match the model");
  }
  for (double g : gamma.flat()) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw Error(ErrorCode::kInvalidInput, "primary membership outside [0, 1]");
    }
  }
  const std::vector<double> sl = tile_by_rule(params.sigma_l, rules);
  const std::vector<double> sr = tile_by_rule(params.sigma_r, rules);
  MembershipBounds bounds{Matrix(rules, inputs), Matrix(rules, inputs)};
  std::vector<double> log_lower(rules * inputs);
  std::vector<double> log_upper(rules * inputs);
  simd::kernels().secondary(gamma.flat(), sl, sr, alpha.spread(), bounds.lower.flat(),
                            bounds.upper.flat(), log_lower, log_upper);
  return bounds;
}

FiringIntervals firing_intervals(std::span<const double> x, AlphaLevel alpha,
                                 const ModelParams& params) {
  const Matrix gamma = pmf_eval(x, params);
  const std::size_t rules = params.rules();
  const std::size_t inputs = params.inputs();
  const std::vector<double> sl = tile_by_rule(params.sigma_l, rules);
  const std::vector<double> sr = tile_by_rule(params.sigma_r, rules);
  std::vector<double> lower(rules * inputs), upper(rules * inputs);
  std::vector<double> log_lower(rules * inputs), log_upper(rules * inputs);
  simd::kernels().secondary(gamma.flat(), sl, sr, alpha.spread(), lower, upper, log_lower,
                            log_upper);

  FiringIntervals f{std::vector<double>(rules), std::vector<double>(rules)};
  bool any_upper = false;
  for (std::size_t p = 0; p < rules; ++p) {
    double sum_lo = 0.0;
    double sum_up = 0.0;
    for (std::size_t m = 0; m < inputs; ++m) {
      sum_lo += log_lower[p * inputs + m];
      sum_up += log_upper[p * inputs + m];
    }
    f.upper[p] = sum_up < kLogUnderflow ? 0.0 : std::exp(sum_up);
    f.lower[p] = sum_lo < kLogUnderflow ? 0.0 : std::min(std::exp(sum_lo), f.upper[p]);
    any_upper = any_upper || f.upper[p] > 0.0;
  }
  if (!any_upper) {
    throw Error(ErrorCode::kDegenerateFiring,
                "input lies outside the support of every rule at alpha=" +
                    std::to_string(alpha.value()));
  }
  return f;
}

std::vector<double> consequent_values(std::span<const double> x, const ModelParams& params) {
  check_input(x, params);
  std::vector<double> y(params.rules());
  for (std::size_t p = 0; p < params.rules(); ++p) {
    const auto a = params.slopes.row(p);
    double acc = params.intercepts[p];
    for (std::size_t m = 0; m < x.size(); ++m) acc += a[m] * x[m];
    y[p] = acc;
  }
  return y;
}

KmSolution km_solve(std::span<const double> lower, std::span<const double> upper,
                    std::span<const double> y) {
  const std::size_t rules = y.size();
  if (rules == 0 || lower.size() != rules || upper.size() != rules) {
    throw Error(ErrorCode::kInvalidInput, "firing intervals and consequents differ in length");
  }
  KmSolution s;
  s.order.resize(rules);
  std::iota(s.order.begin(), s.order.end(), std::size_t{0});
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](std::size_t a, std::size_t b) { return y[a] < y[b]; });

  std::vector<double> ys(rules), fl(rules), fu(rules);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < rules; ++i) {
    const std::size_t p = s.order[i];
    ys[i] = y[p];
    fl[i] = lower[p];
    fu[i] = upper[p];
    const double w = 0.5 * (fl[i] + fu[i]);
    num += w * ys[i];
    den += w;
  }
  if (!(den > 0.0)) {
    throw Error(ErrorCode::kDegenerateFiring, "total rule firing is zero");
  }
  const double start = num / den;

  // Lower endpoint: upper firings on the consequents left of the switch.
  {
    double current = start;
    double best = std::numeric_limits<double>::infinity();
    std::size_t prev = rules + 1;
    for (std::size_t iter = 0; iter <= rules + 1; ++iter) {
      const auto it = std::upper_bound(ys.begin(), ys.end(), current);
      const std::size_t k = std::max<std::size_t>(1, static_cast<std::size_t>(it - ys.begin()));
      if (k == prev) break;
      double w = 0.0;
      const double v = switched_average(ys, fu, fl, k, &w);
      if (v < best) {
        best = v;
        s.left_switch = k;
        s.lower_weight_sum = w;
      }
      if (std::isnan(v)) break;
      prev = k;
      current = v;
    }
    if (!std::isfinite(best)) {
      throw Error(ErrorCode::kDegenerateFiring, "no admissible weighting for the lower endpoint");
    }
    s.trs.lo = best;
  }

  // Upper endpoint: lower firings on the consequents left of the switch.
  {
    double current = start;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t prev = rules + 1;
    for (std::size_t iter = 0; iter <= rules + 1; ++iter) {
      const auto it = std::lower_bound(ys.begin(), ys.end(), current);
      const std::size_t k =
          std::min<std::size_t>(rules - 1, static_cast<std::size_t>(it - ys.begin()));
      if (k == prev) break;
      double w = 0.0;
      const double v = switched_average(ys, fl, fu, k, &w);
      if (v > best) {
        best = v;
        s.right_switch = k;
        s.upper_weight_sum = w;
      }
      if (std::isnan(v)) break;
      prev = k;
      current = v;
    }
    if (!std::isfinite(best)) {
      throw Error(ErrorCode::kDegenerateFiring, "no admissible weighting for the upper endpoint");
    }
    s.trs.hi = best;
  }
  return s;
}

TypeReducedSet km_type_reduce(const FiringIntervals& firing, std::span<const double> y) {
  if (firing.lower.size() != y.size() || firing.upper.size() != y.size() || y.empty()) {
    throw Error(ErrorCode::kInvalidInput, "firing intervals and consequents differ in length");
  }
  double total = 0.0;
  for (std::size_t p = 0; p < y.size(); ++p) {
    if (!(firing.lower[p] >= 0.0) || !(firing.lower[p] <= firing.upper[p])) {
      throw Error(ErrorCode::kInvalidInput,
                  "firing interval " + std::to_string(p) + " is not 0 <= lower <= upper");
    }
    total += firing.upper[p];
  }
  if (total < 1e-15) {
    throw Error(ErrorCode::kDegenerateFiring, "total upper firing below 1e-15");
  }
  return km_solve(firing.lower, firing.upper, y).trs;
}

double alpha_plane_center(const TypeReducedSet& trs) { return 0.5 * (trs.lo + trs.hi); }

double gt2_aggregate(std::span<const double> centers, std::span<const double> alphas) {
  if (centers.empty() || centers.size() != alphas.size()) {
    throw Error(ErrorCode::kInvalidConfig, "plane list is empty or mismatched");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    if (!(alphas[k] >= kAlpha0 && alphas[k] <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, "plane alpha outside [0.01, 1]");
    }
    num += centers[k] * alphas[k];
    den += alphas[k];
  }
  return num / den;
}

Prediction predict(std::span<const double> x, AlphaLevel alpha, const ModelParams& params,
                   std::span<const AlphaLevel> planes) {
  params.validate();
  RuleEvaluator evaluator(params);
  evaluator.set_input(x);
  return evaluator.predict(alpha, planes);
}

RuleEvaluator::RuleEvaluator(const ModelParams& params)
    : params_(&params),
      kernels_(&simd::kernels()),
      sigma_l_tiled_(tile_by_rule(params.sigma_l, params.rules())),
      sigma_r_tiled_(tile_by_rule(params.sigma_r, params.rules())),
      x_(params.inputs()),
      x_tiled_(params.rules() * params.inputs()),
      gamma_(params.rules() * params.inputs()),
      consequents_(params.rules()) {}

void RuleEvaluator::set_input(std::span<const double> x) {
  check_input(x, *params_);
  const std::size_t rules = params_->rules();
  const std::size_t inputs = params_->inputs();
  std::copy(x.begin(), x.end(), x_.begin());
  for (std::size_t p = 0; p < rules; ++p) {
    std::copy(x.begin(), x.end(), x_tiled_.begin() + static_cast<std::ptrdiff_t>(p * inputs));
  }
  kernels_->gaussian(x_tiled_, params_->centers.flat(), params_->sigma.flat(), gamma_);
  for (std::size_t p = 0; p < rules; ++p) {
    const auto a = params_->slopes.row(p);
    double acc = params_->intercepts[p];
    for (std::size_t m = 0; m < inputs; ++m) acc += a[m] * x_[m];
    consequents_[p] = acc;
  }
}

void RuleEvaluator::evaluate(AlphaLevel alpha, PlaneState& out) const {
  evaluate_plane(*params_, *kernels_, gamma_, consequents_, sigma_l_tiled_, sigma_r_tiled_,
                 alpha, out);
}

TypeReducedSet RuleEvaluator::interval(AlphaLevel alpha) {
  evaluate(alpha, scratch_);
  return scratch_.km.trs;
}

double RuleEvaluator::point(std::span<const AlphaLevel> planes) {
  if (planes.empty()) throw Error(ErrorCode::kInvalidConfig, "empty plane list");
  double num = 0.0;
  double den = 0.0;
  for (const AlphaLevel& a : planes) {
    evaluate(a, scratch_);
    num += alpha_plane_center(scratch_.km.trs) * a.value();
    den += a.value();
  }
  return num / den;
}

Prediction RuleEvaluator::predict(AlphaLevel alpha, std::span<const AlphaLevel> planes) {
  const TypeReducedSet trs = interval(alpha);
  return {trs.lo, trs.hi, point(planes)};
}

BatchPredictor::BatchPredictor(const ModelParams& params, const Matrix& features)
    : params_(&params),
      kernels_(&simd::kernels()),
      rows_(features.rows()),
      sigma_l_tiled_(tile_by_rule(params.sigma_l, params.rules())),
      sigma_r_tiled_(tile_by_rule(params.sigma_r, params.rules())) {
  params.validate();
  const std::size_t rules = params.rules();
  const std::size_t inputs = params.inputs();
  if (rows_ > 0 && features.cols() != inputs) {
    throw Error(ErrorCode::kInvalidInput, "feature matrix has " +
                                              std::to_string(features.cols()) +
                                              " columns, model expects " + std::to_string(inputs));
  }
  gamma_.resize(rows_ * rules * inputs);
  consequents_.resize(rows_ * rules);
  RuleEvaluator evaluator(params);
  for (std::size_t r = 0; r < rows_; ++r) {
    evaluator.set_input(features.row(r));
    std::copy(evaluator.gamma().begin(), evaluator.gamma().end(),
              gamma_.begin() + static_cast<std::ptrdiff_t>(r * rules * inputs));
    std::copy(evaluator.consequents().begin(), evaluator.consequents().end(),
              consequents_.begin() + static_cast<std::ptrdiff_t>(r * rules));
  }
}

void BatchPredictor::intervals(AlphaLevel alpha, std::span<double> lo,
                               std::span<double> hi) const {
  const std::size_t rules = params_->rules();
  const std::size_t block = rules * params_->inputs();
  PlaneState state;
  for (std::size_t r = 0; r < rows_; ++r) {
    evaluate_plane(*params_, *kernels_, std::span(gamma_).subspan(r * block, block),
                   std::span(consequents_).subspan(r * rules, rules), sigma_l_tiled_,
                   sigma_r_tiled_, alpha, state);
    lo[r] = state.km.trs.lo;
    hi[r] = state.km.trs.hi;
  }
}

void BatchPredictor::points(std::span<const AlphaLevel> planes, std::span<double> y) const {
  if (planes.empty()) throw Error(ErrorCode::kInvalidConfig, "empty plane list");
  const std::size_t rules = params_->rules();
  const std::size_t block = rules * params_->inputs();
  PlaneState state;
  double den = 0.0;
  for (const AlphaLevel& a : planes) den += a.value();
  for (std::size_t r = 0; r < rows_; ++r) {
    double num = 0.0;
    for (const AlphaLevel& a : planes) {
      evaluate_plane(*params_, *kernels_, std::span(gamma_).subspan(r * block, block),
                     std::span(consequents_).subspan(r * rules, rules), sigma_l_tiled_,
                     sigma_r_tiled_, a, state);
      num += alpha_plane_center(state.km.trs) * a.value();
    }
    y[r] = num / den;
  }
}

}  // namespace gt2fls
