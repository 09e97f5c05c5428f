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

#ifndef GT2FLS_CALIBRATION_HPP_
#define GT2FLS_CALIBRATION_HPP_

// Post-hoc selection of the alpha-plane whose interval reaches a desired
// coverage on held-out data: a sampled lookup table inverted by linear
// interpolation, and a derivative-free step search over alpha.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gt2fls/dataset.hpp"
#include "gt2fls/inference.hpp"
#include "gt2fls/params.hpp"

namespace gt2fls {

// alpha -> empirical coverage of the alpha-plane interval.
using CoverageOracle = std::function<double(double alpha)>;

// Interval coverage of a fixed model on a fixed calibration set. Caches the
// alpha-independent parts of inference, so repeated queries are cheap.
class CoverageCurve {
 public:
  CoverageCurve(const ModelParams& model, const Dataset& calib);

  double operator()(double alpha) const;
  std::size_t size() const { return targets_.size(); }

 private:
  std::vector<double> targets_;
  BatchPredictor predictor_;
};

double coverage_at_alpha(const ModelParams& model, const Dataset& calib, AlphaLevel alpha);

struct CalibrationEntry {
  double alpha = 0.0;
  double phi = 0.0;

  bool operator==(const CalibrationEntry&) const = default;
};

// Sampled coverage curve with alpha strictly increasing and phi non-increasing.
struct CalibrationTable {
  std::vector<CalibrationEntry> entries;

  // Throws Error(kInvalidConfig) if the ordering invariants are broken.
  void validate() const;
  bool operator==(const CalibrationTable&) const = default;
};

// {0.01, delta, 2 delta, ..., 1}, deduplicated and sorted.
std::vector<double> alpha_grid(double delta);

// Pool-adjacent-violators projection onto non-increasing sequences.
void isotonic_non_increasing(std::vector<double>& values);

CalibrationTable build_lookup_table(const CoverageOracle& coverage, double delta);
CalibrationTable build_lookup_table(const ModelParams& model, const Dataset& calib, double delta);

struct LookupResult {
  double alpha = kAlpha0;
  bool out_of_range = false;
};

// Piecewise-linear inverse of the table. Targets outside the sampled phi
// range clamp to the matching end of [0.01, 1] and set out_of_range.
// Throws Error(kFlatCurve) when every phi is equal.
LookupResult lookup_alpha(const CalibrationTable& table, double phi_d);

struct SearchConfig {
  double phi_d = 0.9;
  double alpha_init = 0.5;
  double delta = 0.25;
  double gamma = 0.5;
  double epsilon = 0.005;
  std::size_t max_iters = 100;
  double delta_floor = 1e-4;

  // Throws Error(kInvalidConfig).
  void validate() const;
  // Defaults with epsilon = max(0.005, 1/Q).
  static SearchConfig defaults_for(double phi_d, std::size_t calib_size);
};

struct SearchResult {
  double alpha = 0.5;
  double phi = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  // |phi - phi_d| of the accepted iterate, one entry per iteration (plus start).
  std::vector<double> objective_trace;
};

SearchResult calibrate_search(const CoverageOracle& coverage, const SearchConfig& cfg);
SearchResult calibrate_search(const ModelParams& model, const Dataset& calib,
                              const SearchConfig& cfg);

// CSV with header "alpha,phi"; values are written with 17 significant digits.
void export_calibration_curve(const CalibrationTable& table, const std::filesystem::path& path);
CalibrationTable read_calibration_curve(const std::filesystem::path& path);

enum class CalibrationMethod { kSearch, kLookup };

std::string to_string(CalibrationMethod method);
CalibrationMethod parse_calibration_method(const std::string& text);

struct CalibrationRecord {
  CalibrationMethod method = CalibrationMethod::kSearch;
  double phi_d = 0.0;
  double alpha_star = kAlpha0;
  double phi_achieved = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

}  // namespace gt2fls

#endif  // GT2FLS_CALIBRATION_HPP_
