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

#include "gt2fls/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string_view>

#include "gt2fls/error.hpp"

namespace gt2fls {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

bool parse_number(std::string_view cell, double* out) {
  if (cell.empty()) return false;
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), *out);
  return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(*out);
}

}  // namespace

CsvLoadResult load_csv(const std::filesystem::path& path, const std::string& target) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kParse, path.string() + " is empty");
  std::vector<std::string> header;
  for (std::string_view f : split_fields(line)) header.emplace_back(f);

  std::size_t target_col = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == target) target_col = c;
  }
  if (target.empty() && !header.empty()) target_col = header.size() - 1;
  if (target_col == header.size()) {
    std::size_t index = 0;
    const auto [ptr, ec] = std::from_chars(target.data(), target.data() + target.size(), index);
    if (ec == std::errc() && ptr == target.data() + target.size() && index < header.size()) {
      target_col = index;
    } else {
      throw Error(ErrorCode::kInvalidInput, "unknown target column '" + target + "'");
    }
  }

  const std::size_t cols = header.size();
  std::vector<double> flat;
  std::vector<double> targets;
  std::vector<double> row(cols);
  CsvLoadResult result;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    bool ok = fields.size() == cols;
    for (std::size_t c = 0; ok && c < cols; ++c) ok = parse_number(fields[c], &row[c]);
    if (!ok) {
      ++result.dropped_rows;
      continue;
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (c == target_col) {
        targets.push_back(row[c]);
      } else {
        flat.push_back(row[c]);
      }
    }
  }
  if (targets.empty()) throw Error(ErrorCode::kEmptySet, path.string() + " has no usable rows");

  Dataset& d = result.data;
  d.features = Matrix(targets.size(), cols - 1);
  std::copy(flat.begin(), flat.end(), d.features.flat().begin());
  d.targets = std::move(targets);
  d.target_name = header[target_col];
  for (std::size_t c = 0; c < cols; ++c) {
    if (c != target_col) d.feature_names.push_back(header[c]);
  }
  return result;
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
  Dataset out;
  out.features = Matrix(rows.size(), data.dims());
  out.targets.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto src = data.features.row(rows[i]);
    std::copy(src.begin(), src.end(), out.features.row(i).begin());
    out.targets[i] = data.targets[rows[i]];
  }
  out.feature_names = data.feature_names;
  out.target_name = data.target_name;
  return out;
}

NormalizationStats zscore_fit(const Dataset& data, std::span<const std::size_t> rows) {
  std::vector<std::size_t> all;
  if (rows.empty()) {
    all.resize(data.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    rows = all;
  }
  if (rows.size() < 2) {
    throw Error(ErrorCode::kEmptySet, "need at least two rows to fit normalization");
  }
  const double n = static_cast<double>(rows.size());
  auto column_name = [&](std::size_t c) {
    return c < data.feature_names.size() ? data.feature_names[c] : "column " + std::to_string(c);
  };
  auto fit = [&](auto&& value, const std::string& name, double* mean, double* stddev) {
    double sum = 0.0;
    for (std::size_t r : rows) sum += value(r);
    *mean = sum / n;
    double ss = 0.0;
    for (std::size_t r : rows) {
      const double d = value(r) - *mean;
      ss += d * d;
    }
    *stddev = std::sqrt(ss / (n - 1.0));
    if (!(*stddev > 0.0)) {
      throw Error(ErrorCode::kDegenerateRange, "column '" + name + "' has zero variance");
    }
  };

  NormalizationStats stats;
  const std::size_t m = data.dims();
  stats.feature_mean.resize(m);
  stats.feature_std.resize(m);
  for (std::size_t c = 0; c < m; ++c) {
    fit([&](std::size_t r) { return data.features(r, c); }, column_name(c),
        &stats.feature_mean[c], &stats.feature_std[c]);
  }
  fit([&](std::size_t r) { return data.targets[r]; },
      data.target_name.empty() ? std::string("target") : data.target_name, &stats.target_mean,
      &stats.target_std);
  return stats;
}

Dataset zscore_apply(const NormalizationStats& stats, const Dataset& data) {
  if (stats.feature_mean.size() != data.dims()) {
    throw Error(ErrorCode::kInvalidInput, "normalization stats do not match dataset width");
  }
  Dataset out = data;
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (std::size_t c = 0; c < data.dims(); ++c) {
      out.features(r, c) = (data.features(r, c) - stats.feature_mean[c]) / stats.feature_std[c];
    }
    out.targets[r] = (data.targets[r] - stats.target_mean) / stats.target_std;
  }
  return out;
}

double zscore_invert_target(const NormalizationStats& stats, double z) {
  return z * stats.target_std + stats.target_mean;
}

Dataset zscore_invert(const NormalizationStats& stats, const Dataset& normalized) {
  if (stats.feature_mean.size() != normalized.dims()) {
    throw Error(ErrorCode::kInvalidInput, "normalization stats do not match dataset width");
  }
  Dataset out = normalized;
  for (std::size_t r = 0; r < normalized.size(); ++r) {
    for (std::size_t c = 0; c < normalized.dims(); ++c) {
      out.features(r, c) = normalized.features(r, c) * stats.feature_std[c] + stats.feature_mean[c];
    }
    out.targets[r] = zscore_invert_target(stats, normalized.targets[r]);
  }
  return out;
}

std::string to_string(SplitScheme scheme) {
  return scheme == SplitScheme::kCalibrated ? "70/15/15" : "85/15";
}

SplitScheme parse_split_scheme(const std::string& text) {
  if (text == "70/15/15" || text == "calibrated") return SplitScheme::kCalibrated;
  if (text == "85/15" || text == "direct") return SplitScheme::kDirect;
  throw Error(ErrorCode::kInvalidConfig, "unknown split scheme '" + text + "'");
}

DatasetSplit split(std::size_t rows, SplitScheme scheme, std::uint64_t seed) {
  if (rows < 10) throw Error(ErrorCode::kInvalidConfig, "need at least 10 rows to split");
  std::vector<std::size_t> order(rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const std::size_t test = rows * 15 / 100;
  const std::size_t calib = scheme == SplitScheme::kCalibrated ? rows * 15 / 100 : 0;
  const std::size_t train = rows - calib - test;

  DatasetSplit s;
  s.seed = seed;
  s.scheme = scheme;
  const auto begin = order.begin();
  s.train.assign(begin, begin + static_cast<std::ptrdiff_t>(train));
  s.calib.assign(begin + static_cast<std::ptrdiff_t>(train),
                 begin + static_cast<std::ptrdiff_t>(train + calib));
  s.test.assign(begin + static_cast<std::ptrdiff_t>(train + calib), order.end());
  return s;
}

Dataset make_heteroscedastic_dataset(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(1.0, 3.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  d.features = Matrix(rows, 1);
  d.targets.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const double x = ux(rng);
    d.features(i, 0) = x;
    d.targets[i] = x + 0.5 * x * noise(rng);
  }
  d.feature_names = {"x"};
  d.target_name = "y";
  return d;
}

}  // namespace gt2fls
