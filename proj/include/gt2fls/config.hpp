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

#ifndef GT2FLS_CONFIG_HPP_
#define GT2FLS_CONFIG_HPP_

// key=value overrides for training settings, shared by the CLI and the
// experiment spec loader.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gt2fls/training.hpp"

namespace gt2fls {

using KeyValue = std::pair<std::string, std::string>;

// Keys: tau_lo, tau_hi, epochs, batch_size, learning_rate, beta1, beta2,
// adam_epsilon, rules, planes (comma separated), point_output, seed.
// Throws Error(kInvalidConfig) on an unknown key or unparsable value.
void apply_train_option(TrainConfig& cfg, const std::string& key, const std::string& value);

// One key=value per line; blank lines and '#' comments are ignored.
std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path);
KeyValue parse_key_value(const std::string& text);

std::string to_string(PointOutput output);
PointOutput parse_point_output(const std::string& text);

}  // namespace gt2fls

#endif  // GT2FLS_CONFIG_HPP_
