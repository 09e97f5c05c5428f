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
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "gt2fls/calibration.hpp"
#include "gt2fls/training.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace gt2fls {
namespace {

namespace fs = std::filesystem;
using testing::expect_error;
using testing::linear_coverage;

TEST(AlphaGrid, Examples) {
  const std::vector<double> g = alpha_grid(0.1);
  ASSERT_EQ(g.size(), 11u);
  EXPECT_EQ(g.front(), 0.01);
  EXPECT_EQ(g[3], 0.3);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_EQ(alpha_grid(0.5), (std::vector{0.01, 0.5, 1.0}));
  EXPECT_EQ(alpha_grid(0.01).size(), 100u);  // 0.01 is both alpha_0 and the first step
  EXPECT_EQ(alpha_grid(0.3), (std::vector{0.01, 0.3, 0.6, 0.9, 1.0}));
  expect_error(ErrorCode::kInvalidConfig, [] { alpha_grid(0.0); });
  expect_error(ErrorCode::kInvalidConfig, [] { alpha_grid(1.0); });
}

TEST(Isotonic, PoolsViolators) {
  std::vector<double> v{0.9, 0.8, 0.85, 0.6, 0.6, 0.7, 0.1};
  isotonic_non_increasing(v);
  const std::vector<double> expected{0.9, 0.825, 0.825, 0.6333333333333333, 0.6333333333333333,
                                     0.6333333333333333, 0.1};
  for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(v[i], expected[i], 1e-12);
  std::vector<double> sorted{1.0, 0.5, 0.5, 0.2};
  const std::vector<double> copy = sorted;
  isotonic_non_increasing(sorted);
  EXPECT_EQ(sorted, copy);
}

TEST(LookupTable, RepairedCurveIsMonotone) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 0.02);
  for (int t = 0; t < 20; ++t) {
    const CalibrationTable table =
        build_lookup_table([&](double a) { return linear_coverage(a) + noise(rng); }, 0.05);
    EXPECT_NO_THROW(table.validate());
  }
}

TEST(LookupAlpha, Examples) {
  const CalibrationTable two{{{0.01, 0.99}, {1.0, 0.50}}};
  const LookupResult mid = lookup_alpha(two, 0.745);
  EXPECT_NEAR(mid.alpha, 0.505, 1e-12);
  EXPECT_FALSE(mid.out_of_range);

  const CalibrationTable grid = build_lookup_table(linear_coverage, 0.1);
  const LookupResult knot = lookup_alpha(grid, grid.entries[4].phi);
  EXPECT_EQ(knot.alpha, grid.entries[4].alpha);
  EXPECT_FALSE(knot.out_of_range);

  const LookupResult above = lookup_alpha(grid, 0.995);
  EXPECT_EQ(above.alpha, 0.01);
  EXPECT_TRUE(above.out_of_range);
  const LookupResult below = lookup_alpha(grid, 0.2);
  EXPECT_EQ(below.alpha, 1.0);
  EXPECT_TRUE(below.out_of_range);

  const CalibrationTable flat{{{0.01, 0.7}, {0.5, 0.7}, {1.0, 0.7}}};
  expect_error(ErrorCode::kFlatCurve, [&] { lookup_alpha(flat, 0.7); });
  const CalibrationTable broken{{{0.5, 0.7}, {0.2, 0.6}}};
  expect_error(ErrorCode::kInvalidConfig, [&] { lookup_alpha(broken, 0.65); });
}

TEST(LookupAlpha, InvertsLinearCurve) {
  const CalibrationTable table = build_lookup_table(linear_coverage, 0.01);
  for (double phi : {0.95, 0.9, 0.8, 0.6}) {
    const double alpha = lookup_alpha(table, phi).alpha;
    EXPECT_NEAR(linear_coverage(alpha), phi, 1e-12);
  }
}

TEST(Search, LinearOracleConverges) {
  SearchConfig cfg;
  cfg.phi_d = 0.90;
  cfg.epsilon = 1e-3;
  const SearchResult r = calibrate_search(linear_coverage, cfg);
  EXPECT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.phi - 0.90), 1e-3);
  EXPECT_EQ(r.phi, linear_coverage(r.alpha));
  EXPECT_LE(r.iterations, 100u);
}

TEST(Search, StartOnTarget) {
  SearchConfig cfg;
  cfg.phi_d = linear_coverage(0.5);
  const SearchResult r = calibrate_search(linear_coverage, cfg);
  EXPECT_EQ(r.alpha, 0.5);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_TRUE(r.converged);
}

TEST(Search, UnreachableTargetEndsAtOne) {
  SearchConfig cfg;
  cfg.phi_d = 0.40;
  const SearchResult r = calibrate_search(linear_coverage, cfg);
  EXPECT_EQ(r.alpha, 1.0);
  EXPECT_FALSE(r.converged);
  EXPECT_NEAR(r.phi, 0.5, 1e-12);
}

TEST(Search, IterationCapReturnsBestSoFar) {
  SearchConfig cfg;
  cfg.phi_d = 0.9;
  cfg.epsilon = 1e-12;
  cfg.max_iters = 3;
  const SearchResult r = calibrate_search(linear_coverage, cfg);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.objective_trace.back(), std::abs(r.phi - 0.9));
}

TEST(Search, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> target(0.5, 0.98);
  // A step curve like PICP on 137 samples.
  auto steps = [](double a) { return std::floor(linear_coverage(a) * 137.0) / 137.0; };
  for (int t = 0; t < 50; ++t) {
    SearchConfig cfg = SearchConfig::defaults_for(target(rng), 137);
    const SearchResult r = calibrate_search(steps, cfg);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k) {
      EXPECT_LE(r.objective_trace[k], r.objective_trace[k - 1]);
    }
    EXPECT_EQ(r.objective_trace.size(), r.iterations + 1);
  }
}

TEST(Search, TieBetweenDirectionsPrefersLargerAlpha) {
  // Symmetric curve: both probes improve by the same amount.
  auto tent = [](double a) { return 0.8 - std::abs(a - 0.5); };
  SearchConfig cfg;
  cfg.phi_d = 0.5;
  cfg.max_iters = 1;
  const SearchResult r = calibrate_search(tent, cfg);
  EXPECT_EQ(r.alpha, 0.75);
}

TEST(Search, ShrinksStepWhenNeitherDirectionImproves) {
  // Target sits between alpha_init and either probe at the initial step.
  SearchConfig cfg;
  cfg.phi_d = linear_coverage(0.55);
  cfg.epsilon = 1e-9;
  cfg.max_iters = 1;
  const SearchResult r = calibrate_search(linear_coverage, cfg);
  EXPECT_EQ(r.alpha, 0.5);
  cfg.max_iters = 2;
  EXPECT_EQ(calibrate_search(linear_coverage, cfg).alpha, 0.5);  // step 0.125 still overshoots
  cfg.max_iters = 3;
  EXPECT_EQ(calibrate_search(linear_coverage, cfg).alpha, 0.5625);
}

TEST(Search, ValidatesConfig) {
  SearchConfig cfg;
  cfg.phi_d = 0.99;
  expect_error(ErrorCode::kInvalidConfig, [&] { calibrate_search(linear_coverage, cfg); });
  cfg = SearchConfig{};
  cfg.gamma = 1.0;
  expect_error(ErrorCode::kInvalidConfig, [&] { calibrate_search(linear_coverage, cfg); });
  cfg = SearchConfig{};
  cfg.alpha_init = 0.001;
  expect_error(ErrorCode::kInvalidConfig, [&] { calibrate_search(linear_coverage, cfg); });
  EXPECT_EQ(SearchConfig::defaults_for(0.9, 100).epsilon, 0.01);
  EXPECT_EQ(SearchConfig::defaults_for(0.9, 1000).epsilon, 0.005);
}

TEST(CurveCsv, RoundTrip) {
  const CalibrationTable table = build_lookup_table(linear_coverage, 0.1);
  const testing::TempDir dir;
  const fs::path path = dir / "curve.csv";
  export_calibration_curve(table, path);
  std::ifstream in(path);
  std::string line;
  std::size_t lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,phi");
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 11u);
  const CalibrationTable back = read_calibration_curve(path);
  EXPECT_EQ(back, table);
  for (std::size_t k = 1; k < back.entries.size(); ++k) {
    EXPECT_LE(back.entries[k].phi, back.entries[k - 1].phi);
  }
  expect_error(ErrorCode::kIo,
               [&] { export_calibration_curve(table, "/nonexistent-dir/x/curve.csv"); });
}

class TrainedModelCalibration : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const Dataset all = make_heteroscedastic_dataset(1500, 3);
    const DatasetSplit s = split(all.size(), SplitScheme::kCalibrated, 3);
    const NormalizationStats stats = zscore_fit(all, s.train);
    const Dataset z = zscore_apply(stats, all);
    TrainConfig cfg;
    cfg.epochs = 60;
    cfg.learning_rate = 5e-3;
    model_ = new ModelParams(train(subset(z, s.train), cfg).params);
    calib_ = new Dataset(subset(z, s.calib));
  }
  static void TearDownTestSuite() {
    delete model_;
    delete calib_;
  }
  static ModelParams* model_;
  static Dataset* calib_;
};

ModelParams* TrainedModelCalibration::model_ = nullptr;
Dataset* TrainedModelCalibration::calib_ = nullptr;

TEST_F(TrainedModelCalibration, CoverageMonotoneInAlpha) {
  const CoverageCurve curve(*model_, *calib_);
  double previous = 2.0;
  for (double a : alpha_grid(0.05)) {
    const double phi = curve(a);
    EXPECT_LE(phi, previous) << "alpha " << a;
    previous = phi;
  }
  EXPECT_GE(coverage_at_alpha(*model_, *calib_, AlphaLevel(0.2)),
            coverage_at_alpha(*model_, *calib_, AlphaLevel(0.8)));
  EXPECT_EQ(curve(0.3), coverage_at_alpha(*model_, *calib_, AlphaLevel(0.3)));
}

TEST_F(TrainedModelCalibration, MethodsAgree) {
  const double q = static_cast<double>(calib_->size());
  const CoverageCurve curve(*model_, *calib_);
  for (double phi_d : {0.85, 0.9, 0.95}) {
    const SearchResult s =
        calibrate_search(*model_, *calib_, SearchConfig::defaults_for(phi_d, calib_->size()));
    const LookupResult l = lookup_alpha(build_lookup_table(*model_, *calib_, 0.01), phi_d);
    EXPECT_LE(std::abs(curve(l.alpha) - s.phi), 2.0 / q + 1e-12) << "phi_d " << phi_d;
  }
}

TEST_F(TrainedModelCalibration, EmptyCalibrationSetRejected) {
  Dataset empty;
  empty.features = Matrix(0, 1);
  expect_error(ErrorCode::kEmptySet, [&] { CoverageCurve(*model_, empty); });
}

}  // namespace
}  // namespace gt2fls
