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

#ifndef GT2FLS_REPORT_HPP_
#define GT2FLS_REPORT_HPP_

// Text and CSV rendering of experiment reports, and the JSON experiment spec
// consumed by `gt2fls report`. RMSE and PINAW are multiplied by 100 only here.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "gt2fls/pipeline.hpp"

namespace gt2fls {

inline constexpr double kReportScale = 100.0;

// One block per coverage target with a row per metric and a column per
// variant, entries formatted as mean(±std).
std::string format_report_table(const ExperimentReport& report);

// Per-seed rows followed by mean and std rows per (variant, phi_d).
void write_report_csv(const ExperimentReport& report, std::ostream& out);
void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path);

struct ExperimentSpec {
  ExperimentConfig config;
  std::optional<std::filesystem::path> dataset;  // relative paths resolve against the spec file
  std::string target;
  std::size_t synthetic_rows = 0;      // used when no dataset path is given
  std::uint64_t synthetic_seed = 0;
  std::optional<std::filesystem::path> output_csv;
};

// Keys: name, dataset, target, synthetic {rows, seed}, phi_d, seeds,
// baseline, method, lookup_delta, search {...}, train {key: value}, output_csv.
ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::filesystem::path& base_dir = {});
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

// Loads the dataset named by the spec (or synthesizes it).
Dataset load_spec_dataset(const ExperimentSpec& spec);

}  // namespace gt2fls

#endif  // GT2FLS_REPORT_HPP_
