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

#ifndef GT2FLS_PIPELINE_HPP_
#define GT2FLS_PIPELINE_HPP_

// End-to-end experiment: split, normalize on the training rows, train a 99%
// envelope model, calibrate an alpha-plane per requested coverage, and score
// the test rows. Optionally trains direct baselines at each coverage.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gt2fls/calibration.hpp"
#include "gt2fls/dataset.hpp"
#include "gt2fls/params.hpp"
#include "gt2fls/training.hpp"

namespace gt2fls {

// Coverage of the envelope model that calibration slices from.
inline constexpr double kEnvelopeCoverage = 0.99;

struct IntervalMetrics {
  double picp = 0.0;
  double pinaw = 0.0;
  double rmse = 0.0;
};

// Interval at `alpha`, point output aggregated over `planes`; `data` is in
// normalized units and so are the metrics.
IntervalMetrics evaluate_model(const ModelParams& model, const Dataset& data, AlphaLevel alpha,
                               std::span<const AlphaLevel> planes);

enum class Variant {
  kDirect,      // trained at phi_d, 85/15 split, alpha_0 interval
  kCalibrated,  // trained at 99%, 70/15/15 split, calibrated alpha*
};

std::string variant_label(Variant variant, double phi_d);

struct ExperimentConfig {
  std::string dataset_name = "dataset";
  std::vector<double> phi_targets = {0.90, 0.95};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  // tau_lo/tau_hi and seed are overwritten per run.
  TrainConfig train;
  bool include_baseline = true;
  CalibrationMethod method = CalibrationMethod::kSearch;
  double lookup_delta = 0.01;
  // Search settings; phi_d is overwritten per target and a non-positive
  // epsilon selects max(0.005, 1/Q).
  SearchConfig search{0.9, 0.5, 0.25, 0.5, 0.0, 100, 1e-4};
  // Replaces train() when set; lets callers wrap or instrument training.
  std::function<TrainResult(const Dataset&, const TrainConfig&)> trainer;

  // Throws Error(kPrecondition) for phi_d >= 0.99.
  void validate() const;
};

struct SeedResult {
  Variant variant = Variant::kCalibrated;
  double phi_d = 0.0;
  std::uint64_t seed = 0;
  IntervalMetrics test;
  CalibrationRecord calibration;  // direct runs report alpha_0
  std::optional<std::string> error;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single run
  std::size_t count = 0;
};

MetricSummary summarize(std::span<const double> values);

struct ExperimentReport {
  std::string dataset_name;
  std::size_t dims = 0;
  std::size_t rows = 0;
  std::vector<SeedResult> runs;

  std::vector<const SeedResult*> select(Variant variant, double phi_d) const;
  // Aggregates over successful runs; metric is one of "rmse", "picp", "pinaw", "alpha".
  MetricSummary summary(Variant variant, double phi_d, const std::string& metric) const;
};

// Training settings of the 99% envelope model and of the direct baseline.
TrainConfig envelope_train_config(const ExperimentConfig& cfg, std::uint64_t seed);
TrainConfig direct_train_config(const ExperimentConfig& cfg, double phi_d, std::uint64_t seed);

// Training divergence in one seed is recorded in that seed's rows and the
// remaining seeds still run.
ExperimentReport run_pipeline(const Dataset& raw, const ExperimentConfig& cfg);
ExperimentReport run_pipeline(const Dataset& raw, double phi_d,
                              std::span<const std::uint64_t> seeds);

}  // namespace gt2fls

#endif  // GT2FLS_PIPELINE_HPP_
