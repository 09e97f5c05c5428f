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

#ifndef GT2FLS_MODEL_IO_HPP_
#define GT2FLS_MODEL_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gt2fls/dataset.hpp"
#include "gt2fls/params.hpp"
#include "gt2fls/training.hpp"

namespace gt2fls {

inline constexpr int kModelSchemaVersion = 1;

// Everything needed to reuse a trained model on raw-unit data.
struct ModelBundle {
  ModelParams params;
  TrainConfig train_config;
  NormalizationStats normalization;
  std::vector<std::string> feature_names;
  std::string target_name;
  // Split used during training, so calibration/test rows can be recovered.
  std::optional<DatasetSplit> split_info;  // index sets are not persisted
};

// JSON document; doubles are written in shortest round-trip form, so a
// save/load cycle reproduces every parameter bit for bit.
void save_model(const ModelBundle& bundle, const std::filesystem::path& path);
// Throws Error(kSchema) naming the first missing or malformed field.
ModelBundle load_model(const std::filesystem::path& path);

std::string model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const std::string& text);

}  // namespace gt2fls

#endif  // GT2FLS_MODEL_IO_HPP_
