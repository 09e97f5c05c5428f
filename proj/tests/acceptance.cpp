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

// Acceptance run: one PASS/FAIL/SKIP line per criterion, exit status 1 on
// any FAIL. `--criterion N` (repeatable) restricts the run; when every
// selected criterion is skipped the exit status is 77.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gt2fls/calibration.hpp"
#include "gt2fls/dataset.hpp"
#include "gt2fls/inference.hpp"
#include "gt2fls/metrics.hpp"
#include "gt2fls/model_io.hpp"
#include "gt2fls/pipeline.hpp"
#include "gt2fls/report.hpp"
#include "gt2fls/training.hpp"
#include "support/gradient_check.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace gt2fls {
namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome verdict(bool ok, std::string detail) {
  return {ok ? Status::kPass : Status::kFail, std::move(detail)};
}

// Iterative KM against exhaustive switch-point enumeration.
Outcome km_equivalence() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0), yv(-5.0, 5.0);
  std::uniform_int_distribution<int> pick(1, 6);
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int p = pick(rng);
    std::vector<double> lo(p), hi(p), y(p);
    for (int i = 0; i < p; ++i) {
      const double a = u(rng), b = u(rng);
      lo[i] = std::min(a, b);
      hi[i] = std::max(a, b) + 1e-3;
      y[i] = trial % 4 == 0 ? std::round(yv(rng)) : yv(rng);
    }
    const TypeReducedSet got = km_type_reduce({lo, hi}, y);
    const testing::Interval want = testing::km_switch_oracle(lo, hi, y);
    worst = std::max({worst, std::abs(got.lo - want.lo), std::abs(got.hi - want.hi)});
  }
  return verdict(worst <= 1e-12, fmt("10000 instances, P in 1..6, max abs diff %.3g", worst));
}

Outcome gradient_check() {
  std::mt19937_64 rng(1002);
  TrainConfig cfg;
  cfg.tau_lo = 0.05;
  cfg.tau_hi = 0.95;
  int checked = 0, resampled = 0;
  double worst = 0.0;
  while (checked < 100 && resampled < 1000) {
    const testing::GradientCase c = testing::random_gradient_case(3, 2, 16, rng);
    const testing::GradientReport r = testing::check_gradient(c, cfg, 1e-5);
    if (!r.smooth) {
      ++resampled;
      continue;
    }
    ++checked;
    worst = std::max(worst, r.max_relative_error);
  }
  return verdict(checked == 100 && worst <= 1e-4,
                 fmt("%d models (%d resampled at a switch), max rel err %.3g", checked, resampled,
                     worst));
}

Outcome nesting() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> rules(1, 8), inputs(1, 4);
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::vector<double> grid = alpha_grid(0.1);
  const std::vector<AlphaLevel> one_plane = {AlphaLevel(kAlpha0)};
  std::size_t violations = 0, picp_breaks = 0;
  for (int model = 0; model < 50; ++model) {
    const std::size_t m = static_cast<std::size_t>(inputs(rng));
    const ModelParams params = testing::random_model(static_cast<std::size_t>(rules(rng)), m, rng, 0.5);
    std::vector<std::vector<double>> lo(grid.size()), hi(grid.size());
    std::vector<double> y;
    for (int i = 0; i < 1000; ++i) {
      const std::vector<double> x = testing::random_input(m, rng);
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const Prediction p = predict(x, AlphaLevel(grid[g]), params, one_plane);
        lo[g].push_back(p.lo);
        hi[g].push_back(p.hi);
        if (g > 0 && (p.lo < lo[g - 1].back() - 1e-12 || p.hi > hi[g - 1].back() + 1e-12)) {
          ++violations;
        }
      }
      y.push_back(0.5 * (lo[0].back() + hi[0].back()) +
                  0.5 * (hi[0].back() - lo[0].back()) * noise(rng));
    }
    for (std::size_t g = 1; g < grid.size(); ++g) {
      if (picp(y, lo[g], hi[g]) > picp(y, lo[g - 1], hi[g - 1])) ++picp_breaks;
    }
  }
  return verdict(violations == 0 && picp_breaks == 0,
                 fmt("50 models x 1000 inputs x 11 planes, %zu nesting violations, %zu PICP increases",
                     violations, picp_breaks));
}

Outcome lp_count() {
  struct Case {
    std::size_t p, m, want;
  };
  std::string detail;
  bool ok = true;
  for (const Case c : {Case{1, 1, 6}, Case{10, 4, 138}, Case{7, 19, 444}}) {
    const ModelParams model(c.p, c.m);
    const std::size_t formula = (2 * c.p + 2) * c.m + c.p * (c.m + 1);
    const std::size_t got = model.learnable_count();
    ok = ok && learnable_parameter_count(c.p, c.m) == got;
    ok = ok && got == formula && got == c.want;
    detail += fmt("(%zu,%zu)->%zu ", c.p, c.m, got);
  }
  return verdict(ok, detail);
}

Outcome search_linear() {
  std::mt19937_64 rng(1005);
  std::uniform_real_distribution<double> target(0.52, 0.98);
  double worst = 0.0;
  std::size_t most_iters = 0;
  bool ok = true;
  for (int i = 0; i < 20; ++i) {
    SearchConfig cfg;
    cfg.phi_d = target(rng);
    cfg.epsilon = 1e-3;
    const SearchResult r = calibrate_search(testing::linear_coverage, cfg);
    const double err = std::abs(r.phi - cfg.phi_d);
    worst = std::max(worst, err);
    most_iters = std::max(most_iters, r.iterations);
    ok = ok && r.converged && err <= 1e-3 && r.iterations <= 100;
  }
  return verdict(ok, fmt("20 targets, max |phi-phi_d| %.3g, max iterations %zu", worst, most_iters));
}

struct TrainedSynthetic {
  ModelParams model;
  Dataset calib;
  Dataset test;
};

const TrainedSynthetic& trained_synthetic() {
  static const TrainedSynthetic t = [] {
    const Dataset all = make_heteroscedastic_dataset(4000, 11);
    const DatasetSplit s = split(all.size(), SplitScheme::kCalibrated, 11);
    const NormalizationStats stats = zscore_fit(all, s.train);
    const Dataset z = zscore_apply(stats, all);
    ExperimentConfig cfg;
    const TrainConfig tc = envelope_train_config(cfg, 11);
    return TrainedSynthetic{train(subset(z, s.train), tc).params, subset(z, s.calib),
                            subset(z, s.test)};
  }();
  return t;
}

// Judged at the experiment targets with default search settings. The bound
// is not guaranteed in general: coverage is a step function, the lookup
// interpolates linearly between grid knots and the search can stall on a
// plateau, each up to 2/Q from the target on opposite sides. The sweep
// reports how often the bound holds elsewhere.
Outcome method_agreement() {
  const TrainedSynthetic& t = trained_synthetic();
  const double q = static_cast<double>(t.calib.size());
  const CoverageCurve curve(t.model, t.calib);
  const CalibrationTable table = build_lookup_table(t.model, t.calib, 0.01);
  auto gap = [&](double phi_d) {
    const double lookup_phi = curve(lookup_alpha(table, phi_d).alpha);
    const SearchResult s =
        calibrate_search(t.model, t.calib, SearchConfig::defaults_for(phi_d, t.calib.size()));
    return std::abs(lookup_phi - s.phi);
  };
  const double bound = 2.0 / q + 1e-12;
  double worst = 0.0;
  for (double phi_d : {0.90, 0.95}) worst = std::max(worst, gap(phi_d));
  int held = 0, swept = 0;
  double sweep_worst = 0.0;
  for (int pct = 80; pct <= 95; ++pct, ++swept) {
    const double g = gap(pct / 100.0);
    sweep_worst = std::max(sweep_worst, g);
    held += g <= bound;
  }
  return verdict(worst <= bound,
                 fmt("Q=%zu, phi_d 90/95%%: max gap %.4f (bound %.4f); informational sweep "
                     "80..95%%: bound held %d/%d, max gap %.4f",
                     t.calib.size(), worst, 2.0 / q, held, swept, sweep_worst));
}

std::string picp_list(const ExperimentReport& r, Variant v, double phi_d) {
  std::string s;
  for (const SeedResult* run : r.select(v, phi_d)) {
    s += run->error ? std::string("err ") : fmt("%.2f ", 100.0 * run->test.picp);
  }
  if (!s.empty()) s.pop_back();
  return s;
}

Outcome synthetic_coverage() {
  const Dataset data = make_heteroscedastic_dataset(4000, 2024);
  ExperimentConfig cfg;
  cfg.dataset_name = "synthetic";
  cfg.include_baseline = false;
  const ExperimentReport report = run_pipeline(data, cfg);
  bool ok = true;
  std::string detail = "test PICP%";
  for (double phi_d : cfg.phi_targets) {
    int within = 0;
    for (const SeedResult* r : report.select(Variant::kCalibrated, phi_d)) {
      if (!r->error && std::abs(r->test.picp - phi_d) <= 0.03 + 1e-12) ++within;
    }
    ok = ok && within >= 4;
    detail += fmt(" | %.0f%%: [%s] %d/5 within 3pp", 100.0 * phi_d,
                  picp_list(report, Variant::kCalibrated, phi_d).c_str(), within);
  }
  return verdict(ok, detail);
}

std::filesystem::path powerplant_path() {
  if (const char* env = std::getenv("GT2FLS_POWERPLANT_CSV")) return env;
  return std::filesystem::path(GT2FLS_SOURCE_DIR) / "data" / "powerplant.csv";
}

Outcome powerplant() {
  const std::filesystem::path path = powerplant_path();
  if (!std::filesystem::exists(path)) {
    return {Status::kSkip, "dataset not found at " + path.string() +
                               " (set GT2FLS_POWERPLANT_CSV to the UCI CCPP CSV with target PE)"};
  }
  const CsvLoadResult csv = load_csv(path, "PE");
  ExperimentConfig cfg;
  cfg.dataset_name = "Powerplant";
  const ExperimentReport report = run_pipeline(csv.data, cfg);
  const double c90 = report.summary(Variant::kCalibrated, 0.90, "picp").mean * 100.0;
  const double c95 = report.summary(Variant::kCalibrated, 0.95, "picp").mean * 100.0;
  bool wider = true;
  for (double phi_d : cfg.phi_targets) {
    wider = wider && report.summary(Variant::kCalibrated, phi_d, "pinaw").mean >
                         report.summary(Variant::kDirect, phi_d, "pinaw").mean;
  }
  const bool ok = c90 >= 86.0 && c90 <= 93.0 && c95 >= 92.0 && c95 <= 97.5 && wider;
  return verdict(ok, fmt("%zu x %zu rows, mean test PICP 90%%: %.2f, 95%%: %.2f, calibrated PINAW wider: %s",
                         csv.data.dims(), csv.data.size(), c90, c95, wider ? "yes" : "no"));
}

Outcome metric_examples() {
  int failures = 0, total = 0;
  auto near = [&](double got, double want) {
    ++total;
    if (!(std::abs(got - want) <= 1e-9)) ++failures;
  };
  const std::vector<double> y3 = {1, 2, 3}, lo3 = {0, 0, 4}, hi3 = {2, 3, 5};
  near(picp(y3, lo3, hi3), 2.0 / 3.0);
  near(picp(y3, std::vector<double>{0, 1, 2}, std::vector<double>{2, 3, 4}), 1.0);
  near(picp(y3, y3, std::vector<double>{2, 3, 4}), 1.0);  // boundary counts as covered
  const std::vector<double> y2 = {0, 4};
  near(pinaw(y2, std::vector<double>{0, 0}, std::vector<double>{1, 3}), 0.5);
  near(pinaw(y2, std::vector<double>{1, 2}, std::vector<double>{1.5, 2.5}), 0.5 / 4.0);
  near(pinaw(y2, y2, y2), 0.0);
  near(rmse(y3, y3), 0.0);
  near(rmse(std::vector<double>{3, 4}, std::vector<double>{0, 0}), std::sqrt(12.5));
  near(rmse(std::vector<double>{10, 11}, std::vector<double>{7, 7}), std::sqrt(12.5));
  near(log_cosh_loss(0.0), 0.0);
  near(log_cosh_loss(1.0), std::log(std::cosh(1.0)));
  near(log_cosh_loss(50.0), 50.0 - std::log(2.0));
  near(pinball_pair_loss(1.0, 1.0, 1.0, 0.05, 0.95), 0.0);
  // Upper term alone: y - hi = 1 and -1 with lo = y.
  near(pinball_pair_loss(1.0, 1.0, 0.0, 0.05, 0.95), 0.95);
  near(pinball_pair_loss(1.0, 1.0, 2.0, 0.05, 0.95), 0.05);
  near(pinball_pair_loss(1.0, 3.0, 1.0, 0.5, 0.95), 1.0);
  return verdict(failures == 0, fmt("%d/%d examples at 1e-9", total - failures, total));
}

Outcome determinism() {
  const Dataset data = make_heteroscedastic_dataset(800, 5);
  ExperimentConfig cfg;
  cfg.seeds = {1, 2};
  cfg.train.epochs = 30;
  auto render = [&] {
    std::ostringstream csv;
    const ExperimentReport r = run_pipeline(data, cfg);
    write_report_csv(r, csv);
    return format_report_table(r) + csv.str();
  };
  const bool same_report = render() == render();

  const testing::TempDir dir;
  ModelBundle bundle;
  TrainConfig tc;
  tc.epochs = 30;
  bundle.normalization = zscore_fit(data, {});
  bundle.params = train(zscore_apply(bundle.normalization, data), tc).params;
  bundle.train_config = tc;
  bundle.feature_names = data.feature_names;
  bundle.target_name = data.target_name;
  save_model(bundle, dir / "model.json");
  const ModelBundle back = load_model(dir / "model.json");
  const std::vector<AlphaLevel> planes = tc.plane_levels();
  std::mt19937_64 rng(1010);
  std::size_t mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x = testing::random_input(1, rng);
    for (double a : {0.01, 0.37, 1.0}) {
      const Prediction p = predict(x, AlphaLevel(a), bundle.params, planes);
      const Prediction q = predict(x, AlphaLevel(a), back.params, planes);
      mismatches += p.lo != q.lo || p.hi != q.hi || p.y != q.y;
    }
  }
  return verdict(same_report && mismatches == 0 && back.params == bundle.params,
                 fmt("repeat report identical: %s, reloaded predictions differing: %zu of 3000",
                     same_report ? "yes" : "no", mismatches));
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace gt2fls

int main(int argc, char** argv) {
  using namespace gt2fls;
  CLI::App app{"gt2fls acceptance run"};
  std::vector<int> only;
  app.add_option("--criterion", only, "run only these criteria (1-10)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "KM oracle equivalence", km_equivalence},
      {2, "gradient check", gradient_check},
      {3, "alpha nesting and PICP monotonicity", nesting},
      {4, "learnable parameter count", lp_count},
      {5, "search convergence on linear coverage", search_linear},
      {6, "search and lookup agreement", method_agreement},
      {7, "synthetic end-to-end coverage", synthetic_coverage},
      {8, "Powerplant coverage and width", powerplant},
      {9, "metric examples", metric_examples},
      {10, "determinism and persistence", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failed = 0, skipped = 0, ran = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::kFail, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    // Time limits from the acceptance list.
    const double limit = c.id == 1 ? 10.0 : c.id == 2 ? 60.0 : 0.0;
    if (o.status == Status::kPass && limit > 0.0 && secs >= limit) {
      o.status = Status::kFail;
      o.detail += fmt("; exceeded %.0f s", limit);
    }
    const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
    std::printf("[%s] %2d %s: %s (%.2f s)\n", tag, c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.status == Status::kFail;
    skipped += o.status == Status::kSkip;
  }
  if (failed > 0) return 1;
  return ran > 0 && skipped == ran ? 77 : 0;
}
