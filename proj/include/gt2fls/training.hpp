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

#ifndef GT2FLS_TRAINING_HPP_
#define GT2FLS_TRAINING_HPP_

// Dual-focused training: log-cosh on the point output plus a pinball pair on
// the alpha_0-plane interval, minimized with minibatch Adam over
// unconstrained parameters.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gt2fls/dataset.hpp"
#include "gt2fls/params.hpp"

namespace gt2fls {

// Which quantity the accuracy term compares against the target.
enum class PointOutput {
  kAlpha0Center,    // midpoint of the alpha_0-plane interval
  kPlaneAggregate,  // alpha-weighted mean of plane centers over TrainConfig::planes
};

struct TrainConfig {
  double tau_lo = 0.005;
  double tau_hi = 0.995;
  std::size_t epochs = 300;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::size_t rules = 10;
  std::vector<double> planes = {0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  PointOutput point_output = PointOutput::kAlpha0Center;
  std::uint64_t seed = 1;

  // Throws Error(kInvalidConfig).
  void validate() const;
  std::vector<AlphaLevel> plane_levels() const;
};

struct QuantilePair {
  double lo;
  double hi;
};

// Symmetric tail split: phi -> [(1 - phi) / 2, (1 + phi) / 2].
QuantilePair quantiles_for_coverage(double phi);

// Unconstrained mirror of ModelParams; positive quantities are stored as r
// with value softplus(r). The same shape is used for gradients.
class RawParams {
 public:
  RawParams() = default;
  RawParams(std::size_t rules, std::size_t inputs);

  // Inverse-softplus of every positive field. `model` must be valid.
  static RawParams from_model(const ModelParams& model);
  ModelParams constrain() const;

  std::size_t rules() const { return rules_; }
  std::size_t inputs() const { return inputs_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> flat() { return values_; }
  std::span<const double> flat() const { return values_; }

  std::span<double> centers() { return block(0, rules_ * inputs_); }
  std::span<double> sigma() { return block(offset_sigma(), rules_ * inputs_); }
  std::span<double> sigma_l() { return block(offset_sigma_l(), inputs_); }
  std::span<double> sigma_r() { return block(offset_sigma_r(), inputs_); }
  std::span<double> slopes() { return block(offset_slopes(), rules_ * inputs_); }
  std::span<double> intercepts() { return block(offset_intercepts(), rules_); }
  std::span<const double> centers() const { return block(0, rules_ * inputs_); }
  std::span<const double> sigma() const { return block(offset_sigma(), rules_ * inputs_); }
  std::span<const double> sigma_l() const { return block(offset_sigma_l(), inputs_); }
  std::span<const double> sigma_r() const { return block(offset_sigma_r(), inputs_); }
  std::span<const double> slopes() const { return block(offset_slopes(), rules_ * inputs_); }
  std::span<const double> intercepts() const { return block(offset_intercepts(), rules_); }

  bool operator==(const RawParams&) const = default;

 private:
  // Flat layout: c | sigma | sigma_l | sigma_r | a | a0.
  std::size_t offset_sigma() const { return rules_ * inputs_; }
  std::size_t offset_sigma_l() const { return 2 * rules_ * inputs_; }
  std::size_t offset_sigma_r() const { return 2 * rules_ * inputs_ + inputs_; }
  std::size_t offset_slopes() const { return 2 * rules_ * inputs_ + 2 * inputs_; }
  std::size_t offset_intercepts() const { return 3 * rules_ * inputs_ + 2 * inputs_; }
  std::span<double> block(std::size_t offset, std::size_t n) { return {values_.data() + offset, n}; }
  std::span<const double> block(std::size_t offset, std::size_t n) const {
    return {values_.data() + offset, n};
  }

  std::size_t rules_ = 0;
  std::size_t inputs_ = 0;
  std::vector<double> values_;
};

double softplus(double r);
double inverse_softplus(double v);

// log(cosh(eps)) in the overflow-free form |eps| + ln(1 + e^{-2|eps|}) - ln 2.
double log_cosh_loss(double eps);

// Pinball losses of y against lo at tau_lo and against hi at tau_hi, summed.
double pinball_pair_loss(double y, double lo, double hi, double tau_lo, double tau_hi);

// Mean per-sample loss over `batch` (row indices into `data`; all rows
// when empty). Degenerate firing is rethrown with the sample index attached.
double total_loss(const Dataset& data, std::span<const std::size_t> batch, const RawParams& raw,
                  const TrainConfig& cfg);

struct LossGradient {
  double loss = 0.0;
  RawParams gradient;
};

// Exact gradient of total_loss with KM switch points and clamp states held
// at their current values.
LossGradient loss_and_grad(const Dataset& data, std::span<const std::size_t> batch,
                           const RawParams& raw, const TrainConfig& cfg);
RawParams grad(const Dataset& data, std::span<const std::size_t> batch, const RawParams& raw,
               const TrainConfig& cfg);

// Discrete state of every non-smooth choice in the loss (sort order, KM
// switch points, membership clamps, pinball branches). Two parameter vectors
// with equal signatures lie on the same smooth piece.
std::vector<std::int64_t> piecewise_signature(const Dataset& data,
                                              std::span<const std::size_t> batch,
                                              const RawParams& raw, const TrainConfig& cfg);

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamState() = default;
  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

// Bias-corrected Adam update. Throws Error(kInvalidInput) on size mismatch.
void adam_step(RawParams& raw, const RawParams& gradient, AdamState& state,
               const AdamOptions& options);

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double picp_alpha0 = 0.0;
  double rmse = 0.0;
};

struct TrainResult {
  ModelParams params;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_loss = 0.0;
};

// Full-set objective, alpha_0 coverage and point RMSE of a constrained model.
EpochLog evaluate_objective(const ModelParams& model, const Dataset& data,
                            const TrainConfig& cfg);

// Runs minibatch Adam for cfg.epochs and returns the parameters with the
// lowest end-of-epoch training loss. `data` is expected in z-scored units.
// Throws Error(kDivergence) naming the epoch on a non-finite loss.
TrainResult train(const Dataset& data, const TrainConfig& cfg);

void write_training_log(std::span<const EpochLog> log, const std::filesystem::path& path);

}  // namespace gt2fls

#endif  // GT2FLS_TRAINING_HPP_
