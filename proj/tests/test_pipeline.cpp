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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gt2fls/pipeline.hpp"
#include "gt2fls/report.hpp"
#include "gt2fls/training.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace gt2fls {
namespace {

using testing::expect_error;

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.dataset_name = "synthetic";
  cfg.seeds = {1, 2, 3};
  cfg.train.epochs = 15;
  cfg.train.rules = 3;
  return cfg;
}

const Dataset& small_data() {
  static const Dataset data = make_heteroscedastic_dataset(600, 7);
  return data;
}

TEST(Pipeline, TrainingSettingsPerVariant) {
  const ExperimentConfig cfg = small_config();
  const TrainConfig env = envelope_train_config(cfg, 4);
  EXPECT_NEAR(env.tau_lo, 0.005, 1e-15);
  EXPECT_NEAR(env.tau_hi, 0.995, 1e-15);
  EXPECT_EQ(env.seed, 4u);
  const TrainConfig d90 = direct_train_config(cfg, 0.90, 2);
  EXPECT_NEAR(d90.tau_lo, 0.05, 1e-15);
  EXPECT_NEAR(d90.tau_hi, 0.95, 1e-15);
  const TrainConfig d95 = direct_train_config(cfg, 0.95, 2);
  EXPECT_NEAR(d95.tau_lo, 0.025, 1e-15);
  EXPECT_NEAR(d95.tau_hi, 0.975, 1e-15);
  EXPECT_EQ(d95.epochs, 15u);
}

TEST(Pipeline, RejectsTargetsAtOrAboveEnvelope) {
  ExperimentConfig cfg = small_config();
  cfg.phi_targets = {0.9, 0.995};
  expect_error(ErrorCode::kPrecondition, [&] { run_pipeline(small_data(), cfg); });
  cfg.phi_targets = {0.99};
  expect_error(ErrorCode::kPrecondition, [&] { run_pipeline(small_data(), cfg); });
  cfg.phi_targets.clear();
  expect_error(ErrorCode::kInvalidConfig, [&] { run_pipeline(small_data(), cfg); });
}

TEST(Pipeline, ProducesOneRowPerSeedVariantAndTarget) {
  const ExperimentConfig cfg = small_config();
  const ExperimentReport report = run_pipeline(small_data(), cfg);
  EXPECT_EQ(report.dims, 1u);
  EXPECT_EQ(report.rows, 600u);
  EXPECT_EQ(report.runs.size(), 3u * 2u * 2u);
  for (const double phi : cfg.phi_targets) {
    for (const Variant v : {Variant::kCalibrated, Variant::kDirect}) {
      const auto rows = report.select(v, phi);
      ASSERT_EQ(rows.size(), 3u);
      std::vector<double> rmse, picp, alpha;
      for (const SeedResult* r : rows) {
        EXPECT_FALSE(r->error.has_value());
        EXPECT_GE(r->test.picp, 0.0);
        EXPECT_LE(r->test.picp, 1.0);
        EXPECT_GT(r->test.pinaw, 0.0);
        rmse.push_back(r->test.rmse);
        picp.push_back(r->test.picp);
        alpha.push_back(r->calibration.alpha_star);
        if (v == Variant::kDirect) {
          EXPECT_EQ(r->calibration.alpha_star, kAlpha0);
          EXPECT_EQ(r->calibration.phi_achieved, r->test.picp);
        } else {
          EXPECT_GE(r->calibration.alpha_star, kAlpha0);
          EXPECT_LE(r->calibration.alpha_star, 1.0);
        }
      }
      const MetricSummary s = report.summary(v, phi, "rmse");
      EXPECT_EQ(s.count, 3u);
      EXPECT_NEAR(s.mean, testing::sample_mean(rmse), 1e-12);
      EXPECT_NEAR(s.stddev, testing::sample_std(rmse), 1e-12);
      EXPECT_NEAR(report.summary(v, phi, "picp").mean, testing::sample_mean(picp), 1e-12);
      EXPECT_NEAR(report.summary(v, phi, "alpha").stddev, testing::sample_std(alpha), 1e-12);
    }
  }
  // 95% calibration sits on a lower plane than 90%.
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LE(report.select(Variant::kCalibrated, 0.95)[i]->calibration.alpha_star,
              report.select(Variant::kCalibrated, 0.90)[i]->calibration.alpha_star);
  }
}

TEST(Pipeline, IsDeterministic) {
  ExperimentConfig cfg = small_config();
  cfg.seeds = {5};
  const ExperimentReport a = run_pipeline(small_data(), cfg);
  const ExperimentReport b = run_pipeline(small_data(), cfg);
  ASSERT_EQ(a.runs.size(), b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].test.rmse, b.runs[i].test.rmse);
    EXPECT_EQ(a.runs[i].test.picp, b.runs[i].test.picp);
    EXPECT_EQ(a.runs[i].calibration.alpha_star, b.runs[i].calibration.alpha_star);
  }
}

TEST(Pipeline, DivergentSeedIsRecordedAndOthersRun) {
  ExperimentConfig cfg = small_config();
  cfg.trainer = [](const Dataset& d, const TrainConfig& t) {
    if (t.seed == 2) throw Error(ErrorCode::kDivergence, "injected at epoch 3");
    return train(d, t);
  };
  const ExperimentReport report = run_pipeline(small_data(), cfg);
  ASSERT_EQ(report.runs.size(), 12u);
  std::size_t failed = 0;
  for (const SeedResult& r : report.runs) {
    EXPECT_EQ(r.error.has_value(), r.seed == 2);
    if (r.error) {
      ++failed;
      EXPECT_NE(r.error->find("injected"), std::string::npos);
    }
  }
  EXPECT_EQ(failed, 4u);
  EXPECT_EQ(report.summary(Variant::kCalibrated, 0.9, "picp").count, 2u);
  const std::string table = format_report_table(report);
  EXPECT_NE(table.find("failed"), std::string::npos) << table;
}

TEST(Pipeline, OtherErrorsPropagate) {
  ExperimentConfig cfg = small_config();
  cfg.trainer = [](const Dataset&, const TrainConfig&) -> TrainResult {
    throw Error(ErrorCode::kInvalidInput, "bad");
  };
  expect_error(ErrorCode::kInvalidInput, [&] { run_pipeline(small_data(), cfg); });
}

TEST(Pipeline, LookupMethodAndNoBaseline) {
  ExperimentConfig cfg = small_config();
  cfg.seeds = {1};
  cfg.include_baseline = false;
  cfg.method = CalibrationMethod::kLookup;
  const ExperimentReport report = run_pipeline(small_data(), cfg);
  ASSERT_EQ(report.runs.size(), 2u);
  for (const SeedResult& r : report.runs) {
    EXPECT_EQ(r.variant, Variant::kCalibrated);
    EXPECT_EQ(r.calibration.method, CalibrationMethod::kLookup);
  }
}

TEST(Report, TableAndCsvLayout) {
  ExperimentReport report;
  report.dataset_name = "toy";
  report.dims = 2;
  report.rows = 50;
  for (std::uint64_t seed : {1u, 2u}) {
    SeedResult r;
    r.variant = Variant::kCalibrated;
    r.phi_d = 0.9;
    r.seed = seed;
    r.test = {0.88 + 0.02 * static_cast<double>(seed), 0.3, 0.05};
    r.calibration.alpha_star = 0.4;
    report.runs.push_back(r);
  }
  const std::string table = format_report_table(report);
  EXPECT_NE(table.find("Performance over 2 experiments, phi_d = 90%"), std::string::npos);
  EXPECT_NE(table.find("toy (2 x 50)"), std::string::npos) << table;
  EXPECT_NE(table.find("C-GT2-FLS(90%)"), std::string::npos);
  // PICP mean 91.00 with sample std sqrt(2) * 1.
  EXPECT_NE(table.find("91.00(±1.41)"), std::string::npos) << table;
  EXPECT_NE(table.find("5.00(±0.00)"), std::string::npos) << table;

  std::ostringstream csv;
  write_report_csv(report, csv);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line,
            "dataset,variant,phi_d,seed,rmse,picp,pinaw,alpha_star,phi_achieved,iterations,"
            "converged,method,error");
  std::size_t n = 0;
  while (std::getline(lines, line)) ++n;
  EXPECT_EQ(n, 4u);  // two seeds plus mean and std
}

TEST(Report, ParsesExperimentSpec) {
  const std::string text = R"({
    "name": "syn", "synthetic": {"rows": 300, "seed": 4},
    "phi_d": [0.8], "seeds": [3, 4], "baseline": false, "method": "lookup",
    "lookup_delta": 0.05, "search": {"alpha_init": 0.7, "max_iters": 50},
    "train": {"epochs": 3, "point_output": "plane-aggregate"},
    "output_csv": "out/r.csv"
  })";
  const ExperimentSpec spec = parse_experiment_spec(text, "/base");
  EXPECT_EQ(spec.config.dataset_name, "syn");
  EXPECT_EQ(spec.synthetic_rows, 300u);
  EXPECT_EQ(spec.config.phi_targets, std::vector<double>{0.8});
  EXPECT_EQ(spec.config.seeds, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_FALSE(spec.config.include_baseline);
  EXPECT_EQ(spec.config.method, CalibrationMethod::kLookup);
  EXPECT_EQ(spec.config.lookup_delta, 0.05);
  EXPECT_EQ(spec.config.search.alpha_init, 0.7);
  EXPECT_EQ(spec.config.search.max_iters, 50u);
  EXPECT_EQ(spec.config.train.epochs, 3u);
  EXPECT_EQ(spec.config.train.point_output, PointOutput::kPlaneAggregate);
  ASSERT_TRUE(spec.output_csv.has_value());
  EXPECT_EQ(*spec.output_csv, std::filesystem::path("/base/out/r.csv"));
  EXPECT_EQ(load_spec_dataset(spec).size(), 300u);

  expect_error(ErrorCode::kInvalidConfig,
               [] { parse_experiment_spec(R"({"synthetic": {"rows": 10}, "train": {"momentum": 1}})"); });
  expect_error(ErrorCode::kParse, [] { parse_experiment_spec("{"); });
}

}  // namespace
}  // namespace gt2fls
