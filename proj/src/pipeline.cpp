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

#include "gt2fls/pipeline.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "gt2fls/error.hpp"
#include "gt2fls/inference.hpp"
#include "gt2fls/metrics.hpp"

namespace gt2fls {
namespace {

struct PreparedSplit {
  Dataset train;
  Dataset calib;
  Dataset test;
};

PreparedSplit prepare(const Dataset& raw, SplitScheme scheme, std::uint64_t seed) {
  const DatasetSplit s = split(raw.size(), scheme, seed);
  const NormalizationStats stats = zscore_fit(raw, s.train);
  const Dataset normalized = zscore_apply(stats, raw);
  PreparedSplit out{subset(normalized, s.train), subset(normalized, s.calib),
                    subset(normalized, s.test)};
  return out;
}

double metric_of(const SeedResult& r, const std::string& metric) {
  if (metric == "rmse") return r.test.rmse;
  if (metric == "picp") return r.test.picp;
  if (metric == "pinaw") return r.test.pinaw;
  if (metric == "alpha") return r.calibration.alpha_star;
  throw Error(ErrorCode::kInvalidConfig, "unknown metric '" + metric + "'");
}

}  // namespace

IntervalMetrics evaluate_model(const ModelParams& model, const Dataset& data, AlphaLevel alpha,
                               std::span<const AlphaLevel> planes) {
  const BatchPredictor predictor(model, data.features);
  const std::size_t n = data.size();
  std::vector<double> lo(n), hi(n), y(n);
  predictor.intervals(alpha, lo, hi);
  predictor.points(planes, y);
  IntervalMetrics m;
  m.picp = picp(data.targets, lo, hi);
  m.pinaw = pinaw(data.targets, lo, hi);
  m.rmse = rmse(data.targets, y);
  return m;
}

std::string variant_label(Variant variant, double phi_d) {
  std::ostringstream s;
  s << (variant == Variant::kCalibrated ? "C-GT2-FLS(" : "GT2-FLS(") << std::round(phi_d * 1000) / 10
    << "%)";
  return s.str();
}

void ExperimentConfig::validate() const {
  if (phi_targets.empty()) throw Error(ErrorCode::kInvalidConfig, "no coverage targets");
  for (double phi : phi_targets) {
    if (!(phi > 0.0)) throw Error(ErrorCode::kInvalidConfig, "coverage target must be > 0");
    if (!(phi < kEnvelopeCoverage)) {
      throw Error(ErrorCode::kPrecondition,
                  "calibrated coverage must be below 0.99, got " + std::to_string(phi));
    }
  }
  if (seeds.empty()) throw Error(ErrorCode::kInvalidConfig, "no seeds");
}

MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.stddev = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

std::vector<const SeedResult*> ExperimentReport::select(Variant variant, double phi_d) const {
  std::vector<const SeedResult*> out;
  for (const SeedResult& r : runs) {
    if (r.variant == variant && r.phi_d == phi_d) out.push_back(&r);
  }
  return out;
}

MetricSummary ExperimentReport::summary(Variant variant, double phi_d,
                                        const std::string& metric) const {
  std::vector<double> values;
  for (const SeedResult* r : select(variant, phi_d)) {
    if (!r->error) values.push_back(metric_of(*r, metric));
  }
  return summarize(values);
}

namespace {

TrainConfig with_coverage(const ExperimentConfig& cfg, double phi, std::uint64_t seed) {
  TrainConfig tc = cfg.train;
  const QuantilePair tau = quantiles_for_coverage(phi);
  tc.tau_lo = tau.lo;
  tc.tau_hi = tau.hi;
  tc.seed = seed;
  return tc;
}

}  // namespace

TrainConfig envelope_train_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  return with_coverage(cfg, kEnvelopeCoverage, seed);
}

TrainConfig direct_train_config(const ExperimentConfig& cfg, double phi_d, std::uint64_t seed) {
  return with_coverage(cfg, phi_d, seed);
}

ExperimentReport run_pipeline(const Dataset& raw, const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.dataset_name = cfg.dataset_name;
  report.dims = raw.dims();
  report.rows = raw.size();

  const std::vector<AlphaLevel> planes = cfg.train.plane_levels();
  auto run_training = [&](const Dataset& d, const TrainConfig& tc) {
    return cfg.trainer ? cfg.trainer(d, tc) : train(d, tc);
  };
  for (std::uint64_t seed : cfg.seeds) {
    // Calibrated: one 99% envelope model per seed serves every target.
    {
      const PreparedSplit data = prepare(raw, SplitScheme::kCalibrated, seed);
      std::optional<ModelParams> model;
      std::optional<std::string> failure;
      try {
        model = run_training(data.train, envelope_train_config(cfg, seed)).params;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergence && e.code() != ErrorCode::kDegenerateFiring) throw;
        failure = e.what();
      }
      for (double phi_d : cfg.phi_targets) {
        SeedResult r;
        r.variant = Variant::kCalibrated;
        r.phi_d = phi_d;
        r.seed = seed;
        r.calibration.method = cfg.method;
        r.calibration.phi_d = phi_d;
        if (!model) {
          r.error = failure;
          report.runs.push_back(r);
          continue;
        }
        const CoverageCurve curve(*model, data.calib);
        if (cfg.method == CalibrationMethod::kSearch) {
          SearchConfig sc = cfg.search;
          sc.phi_d = phi_d;
          if (!(sc.epsilon > 0.0)) sc.epsilon = SearchConfig::defaults_for(phi_d, curve.size()).epsilon;
          const SearchResult s = calibrate_search([&](double a) { return curve(a); }, sc);
          r.calibration.alpha_star = s.alpha;
          r.calibration.phi_achieved = s.phi;
          r.calibration.iterations = s.iterations;
          r.calibration.converged = s.converged;
        } else {
          const CalibrationTable table =
              build_lookup_table([&](double a) { return curve(a); }, cfg.lookup_delta);
          const LookupResult l = lookup_alpha(table, phi_d);
          r.calibration.alpha_star = l.alpha;
          r.calibration.phi_achieved = curve(l.alpha);
          r.calibration.iterations = table.entries.size();
          r.calibration.converged = !l.out_of_range;
        }
        r.test = evaluate_model(*model, data.test, AlphaLevel(r.calibration.alpha_star), planes);
        report.runs.push_back(r);
      }
    }

    if (!cfg.include_baseline) continue;
    const PreparedSplit data = prepare(raw, SplitScheme::kDirect, seed);
    for (double phi_d : cfg.phi_targets) {
      SeedResult r;
      r.variant = Variant::kDirect;
      r.phi_d = phi_d;
      r.seed = seed;
      r.calibration.phi_d = phi_d;
      r.calibration.alpha_star = kAlpha0;
      try {
        const ModelParams model =
            run_training(data.train, direct_train_config(cfg, phi_d, seed)).params;
        r.test = evaluate_model(model, data.test, AlphaLevel(kAlpha0), planes);
        r.calibration.phi_achieved = r.test.picp;
        r.calibration.converged = true;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDivergence && e.code() != ErrorCode::kDegenerateFiring) throw;
        r.error = e.what();
      }
      report.runs.push_back(r);
    }
  }
  return report;
}

ExperimentReport run_pipeline(const Dataset& raw, double phi_d,
                              std::span<const std::uint64_t> seeds) {
  ExperimentConfig cfg;
  cfg.phi_targets = {phi_d};
  cfg.seeds.assign(seeds.begin(), seeds.end());
  return run_pipeline(raw, cfg);
}

}  // namespace gt2fls
