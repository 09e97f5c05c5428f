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

#include "gt2fls/model_io.hpp"

#include <fstream>
#include <sstream>

#include "gt2fls/config.hpp"
#include "gt2fls/error.hpp"
#include "json.hpp"

namespace gt2fls {
namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw Error(ErrorCode::kSchema, "missing field '" + where + name + "'");
  }
  return obj.at(name);
}

std::vector<double> vector_field(const json& obj, const char* name, const std::string& where,
                                 std::size_t expected) {
  const json& v = field(obj, name, where);
  if (!v.is_array() || v.size() != expected) {
    throw Error(ErrorCode::kSchema, "field '" + where + name + "' must be an array of " +
                                        std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::kSchema, "field '" + where + name + "' is not numeric");
    out.push_back(x.get<double>());
  }
  return out;
}

Matrix matrix_field(const json& obj, const char* name, const std::string& where, std::size_t rows,
                    std::size_t cols) {
  const json& v = field(obj, name, where);
  if (!v.is_array() || v.size() != rows) {
    throw Error(ErrorCode::kSchema, "field '" + where + name + "' must have " +
                                        std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = v[r];
    if (!row.is_array() || row.size() != cols) {
      throw Error(ErrorCode::kSchema, "field '" + where + name + "' row " + std::to_string(r) +
                                          " must have " + std::to_string(cols) + " numbers");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row[c].is_number()) {
        throw Error(ErrorCode::kSchema, "field '" + where + name + "' is not numeric");
      }
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

template <typename T>
T scalar_field(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kSchema, "field '" + where + name + "' has the wrong type");
  }
}

}  // namespace

std::string model_to_json(const ModelBundle& b) {
  const ModelParams& p = b.params;
  json doc;
  doc["format"] = "gt2fls-model";
  doc["schema_version"] = kModelSchemaVersion;
  doc["rules"] = p.rules();
  doc["inputs"] = p.inputs();
  doc["params"] = {
      {"centers", matrix_to_json(p.centers)}, {"sigma", matrix_to_json(p.sigma)},
      {"sigma_l", p.sigma_l},                 {"sigma_r", p.sigma_r},
      {"slopes", matrix_to_json(p.slopes)},   {"intercepts", p.intercepts},
  };
  const TrainConfig& c = b.train_config;
  doc["train_config"] = {
      {"tau_lo", c.tau_lo},
      {"tau_hi", c.tau_hi},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"beta1", c.beta1},
      {"beta2", c.beta2},
      {"adam_epsilon", c.adam_epsilon},
      {"rules", c.rules},
      {"planes", c.planes},
      {"point_output", to_string(c.point_output)},
      {"seed", c.seed},
  };
  doc["normalization"] = {
      {"feature_mean", b.normalization.feature_mean},
      {"feature_std", b.normalization.feature_std},
      {"target_mean", b.normalization.target_mean},
      {"target_std", b.normalization.target_std},
  };
  doc["feature_names"] = b.feature_names;
  doc["target_name"] = b.target_name;
  if (b.split_info) {
    doc["split"] = {{"scheme", to_string(b.split_info->scheme)}, {"seed", b.split_info->seed}};
  }
  return doc.dump(2);
}

ModelBundle model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("corrupted model file: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kSchema, "model document is not an object");
  if (scalar_field<std::string>(doc, "format", "") != "gt2fls-model") {
    throw Error(ErrorCode::kSchema, "not a gt2fls model document");
  }
  const int version = scalar_field<int>(doc, "schema_version", "");
  if (version != kModelSchemaVersion) {
    throw Error(ErrorCode::kSchema, "unsupported schema_version " + std::to_string(version));
  }
  const auto rules = scalar_field<std::size_t>(doc, "rules", "");
  const auto inputs = scalar_field<std::size_t>(doc, "inputs", "");

  ModelBundle b;
  const json& p = field(doc, "params", "");
  b.params.centers = matrix_field(p, "centers", "params.", rules, inputs);
  b.params.sigma = matrix_field(p, "sigma", "params.", rules, inputs);
  b.params.sigma_l = vector_field(p, "sigma_l", "params.", inputs);
  b.params.sigma_r = vector_field(p, "sigma_r", "params.", inputs);
  b.params.slopes = matrix_field(p, "slopes", "params.", rules, inputs);
  b.params.intercepts = vector_field(p, "intercepts", "params.", rules);
  try {
    b.params.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }

  const json& c = field(doc, "train_config", "");
  TrainConfig& t = b.train_config;
  t.tau_lo = scalar_field<double>(c, "tau_lo", "train_config.");
  t.tau_hi = scalar_field<double>(c, "tau_hi", "train_config.");
  t.epochs = scalar_field<std::size_t>(c, "epochs", "train_config.");
  t.batch_size = scalar_field<std::size_t>(c, "batch_size", "train_config.");
  t.learning_rate = scalar_field<double>(c, "learning_rate", "train_config.");
  t.beta1 = scalar_field<double>(c, "beta1", "train_config.");
  t.beta2 = scalar_field<double>(c, "beta2", "train_config.");
  t.adam_epsilon = scalar_field<double>(c, "adam_epsilon", "train_config.");
  t.rules = scalar_field<std::size_t>(c, "rules", "train_config.");
  t.planes = scalar_field<std::vector<double>>(c, "planes", "train_config.");
  try {
    t.point_output = parse_point_output(scalar_field<std::string>(c, "point_output", "train_config."));
  } catch (const Error& e) {
    throw Error(ErrorCode::kSchema, e.what());
  }
  t.seed = scalar_field<std::uint64_t>(c, "seed", "train_config.");

  const json& n = field(doc, "normalization", "");
  b.normalization.feature_mean = vector_field(n, "feature_mean", "normalization.", inputs);
  b.normalization.feature_std = vector_field(n, "feature_std", "normalization.", inputs);
  b.normalization.target_mean = scalar_field<double>(n, "target_mean", "normalization.");
  b.normalization.target_std = scalar_field<double>(n, "target_std", "normalization.");

  b.feature_names = scalar_field<std::vector<std::string>>(doc, "feature_names", "");
  b.target_name = scalar_field<std::string>(doc, "target_name", "");
  if (doc.contains("split")) {
    const json& s = doc.at("split");
    DatasetSplit info;
    info.scheme = parse_split_scheme(scalar_field<std::string>(s, "scheme", "split."));
    info.seed = scalar_field<std::uint64_t>(s, "seed", "split.");
    b.split_info = info;
  }
  return b;
}

void save_model(const ModelBundle& bundle, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << model_to_json(bundle) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return model_from_json(text.str());
}

}  // namespace gt2fls
