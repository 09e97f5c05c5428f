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

#include "gt2fls/config.hpp"

#include <charconv>
#include <fstream>

#include "gt2fls/error.hpp"

namespace gt2fls {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const char* first = text.data();
  const char* last = first + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw Error(ErrorCode::kInvalidConfig, "bad value '" + text + "' for " + key);
  }
  return value;
}

}  // namespace

std::string to_string(PointOutput output) {
  return output == PointOutput::kAlpha0Center ? "alpha0-center" : "plane-aggregate";
}

PointOutput parse_point_output(const std::string& text) {
  if (text == "alpha0-center") return PointOutput::kAlpha0Center;
  if (text == "plane-aggregate") return PointOutput::kPlaneAggregate;
  throw Error(ErrorCode::kInvalidConfig, "unknown point_output '" + text + "'");
}

void apply_train_option(TrainConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string value = trim(value_in);
  if (key == "tau_lo") {
    cfg.tau_lo = parse_number<double>(key, value);
  } else if (key == "tau_hi") {
    cfg.tau_hi = parse_number<double>(key, value);
  } else if (key == "epochs") {
    cfg.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "learning_rate" || key == "lr") {
    cfg.learning_rate = parse_number<double>(key, value);
  } else if (key == "beta1") {
    cfg.beta1 = parse_number<double>(key, value);
  } else if (key == "beta2") {
    cfg.beta2 = parse_number<double>(key, value);
  } else if (key == "adam_epsilon") {
    cfg.adam_epsilon = parse_number<double>(key, value);
  } else if (key == "rules") {
    cfg.rules = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "point_output") {
    cfg.point_output = parse_point_output(value);
  } else if (key == "planes") {
    std::vector<double> planes;
    std::size_t start = 0;
    while (start <= value.size()) {
      const auto comma = value.find(',', start);
      const std::string item =
          trim(value.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      planes.push_back(parse_number<double>(key, item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    cfg.planes = std::move(planes);
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
  }
}

KeyValue parse_key_value(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    throw Error(ErrorCode::kInvalidConfig, "expected key=value, got '" + text + "'");
  }
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1))};
}

std::vector<KeyValue> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<KeyValue> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    out.push_back(parse_key_value(line));
  }
  return out;
}

}  // namespace gt2fls
