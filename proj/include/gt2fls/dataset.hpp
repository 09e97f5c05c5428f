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

#ifndef GT2FLS_DATASET_HPP_
#define GT2FLS_DATASET_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gt2fls/params.hpp"

namespace gt2fls {

struct Dataset {
  Matrix features;  // N x M
  std::vector<double> targets;
  std::vector<std::string> feature_names;
  std::string target_name;

  std::size_t size() const { return targets.size(); }
  std::size_t dims() const { return features.cols(); }
};

struct CsvLoadResult {
  Dataset data;
  std::size_t dropped_rows = 0;
};

// Reads a headered numeric CSV. `target` is a column name, or a zero-based
// column index when no header cell matches; empty selects the last column.
// Rows with missing or non-numeric cells are dropped and counted.
CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& target);

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

struct NormalizationStats {
  std::vector<double> feature_mean;
  std::vector<double> feature_std;
  double target_mean = 0.0;
  double target_std = 1.0;

  bool operator==(const NormalizationStats&) const = default;
};

// Mean and sample standard deviation over `rows` only (all rows if empty).
// Throws Error(kDegenerateRange) naming any zero-variance column.
NormalizationStats zscore_fit(const Dataset& data, std::span<const std::size_t> rows = {});
Dataset zscore_apply(const NormalizationStats& stats, const Dataset& data);
Dataset zscore_invert(const NormalizationStats& stats, const Dataset& normalized);
double zscore_invert_target(const NormalizationStats& stats, double z);

enum class SplitScheme {
  kCalibrated,  // 70% train / 15% calibration / 15% test
  kDirect,      // 85% train / 15% test
};

std::string to_string(SplitScheme scheme);
// Accepts "70/15/15", "calibrated", "85/15", "direct".
SplitScheme parse_split_scheme(const std::string& text);

struct DatasetSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> calib;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  SplitScheme scheme = SplitScheme::kCalibrated;
};

// Seeded shuffle, then contiguous slices. Calibration and test sizes are
// floor(0.15 n); the remainder goes to training.
DatasetSplit split(std::size_t rows, SplitScheme scheme, std::uint64_t seed);

// y = x + 0.5 x e with x ~ U[1, 3] and e ~ N(0, 1).
Dataset make_heteroscedastic_dataset(std::size_t rows, std::uint64_t seed);

}  // namespace gt2fls

#endif  // GT2FLS_DATASET_HPP_
