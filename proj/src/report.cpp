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

#include "gt2fls/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gt2fls/config.hpp"
#include "gt2fls/error.hpp"
#include "json.hpp"

namespace gt2fls {
namespace {

using nlohmann::json;

std::string cell(const MetricSummary& s, double scale) {
  if (s.count == 0) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f(\xC2\xB1%.2f)", s.mean * scale, s.stddev * scale);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  // Counts UTF-8 code points so the plus-minus sign does not skew columns.
  std::size_t visible = 0;
  for (unsigned char c : s) visible += (c & 0xC0) != 0x80;
  return visible >= width ? s + " " : s + std::string(width - visible, ' ');
}

std::vector<double> targets_of(const ExperimentReport& report) {
  std::vector<double> out;
  for (const SeedResult& r : report.runs) {
    bool seen = false;
    for (double t : out) seen = seen || t == r.phi_d;
    if (!seen) out.push_back(r.phi_d);
  }
  return out;
}

const char* variant_key(Variant v) { return v == Variant::kCalibrated ? "calibrated" : "direct"; }

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad field '") + key + "': " + e.what());
  }
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const json& item : v) {
      if (!out.empty()) out += ',';
      out += item.dump();
    }
    return out;
  }
  return v.dump();
}

}  // namespace

std::string format_report_table(const ExperimentReport& report) {
  std::ostringstream out;
  const std::size_t first = 24, metric = 8, col = 20;
  char dims[96];
  std::snprintf(dims, sizeof dims, "%s (%zu x %zu)", report.dataset_name.c_str(), report.dims,
                report.rows);
  for (double phi : targets_of(report)) {
    std::vector<Variant> variants;
    if (!report.select(Variant::kDirect, phi).empty()) variants.push_back(Variant::kDirect);
    if (!report.select(Variant::kCalibrated, phi).empty()) variants.push_back(Variant::kCalibrated);
    const std::size_t n = report.select(variants.front(), phi).size();
    out << "Performance over " << n << " experiments, phi_d = " << std::round(phi * 1000) / 10
        << "%\n";
    out << pad("Dataset (D x N)", first) << pad("Metric", metric);
    for (Variant v : variants) out << pad(variant_label(v, phi), col);
    out << '\n';
    struct Row {
      const char* label;
      const char* key;
      double scale;
    };
    const Row rows[] = {{"RMSE", "rmse", kReportScale},
                        {"PICP", "picp", 100.0},
                        {"PINAW", "pinaw", kReportScale},
                        {"alpha*", "alpha", 1.0}};
    bool firstrow = true;
    for (const Row& row : rows) {
      out << pad(firstrow ? dims : "", first) << pad(row.label, metric);
      firstrow = false;
      for (Variant v : variants) out << pad(cell(report.summary(v, phi, row.key), row.scale), col);
      out << '\n';
    }
    std::size_t failed = 0;
    for (Variant v : variants) {
      for (const SeedResult* r : report.select(v, phi)) failed += r->error.has_value();
    }
    if (failed > 0) out << "(" << failed << " failed run(s) excluded)\n";
    out << "PICP in %, RMSE and PINAW scaled by 100.\n\n";
  }
  return out.str();
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "dataset,variant,phi_d,seed,rmse,picp,pinaw,alpha_star,phi_achieved,iterations,"
         "converged,method,error\n";
  out << std::setprecision(17);
  for (const SeedResult& r : report.runs) {
    std::string err = r.error.value_or("");
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    out << report.dataset_name << ',' << variant_key(r.variant) << ',' << r.phi_d << ',' << r.seed
        << ',' << r.test.rmse << ',' << r.test.picp << ',' << r.test.pinaw << ','
        << r.calibration.alpha_star << ',' << r.calibration.phi_achieved << ','
        << r.calibration.iterations << ',' << (r.calibration.converged ? 1 : 0) << ','
        << (r.variant == Variant::kCalibrated ? to_string(r.calibration.method) : "none") << ','
        << err << '\n';
  }
  for (double phi : targets_of(report)) {
    for (Variant v : {Variant::kDirect, Variant::kCalibrated}) {
      if (report.select(v, phi).empty()) continue;
      const MetricSummary rm = report.summary(v, phi, "rmse");
      const MetricSummary pc = report.summary(v, phi, "picp");
      const MetricSummary pw = report.summary(v, phi, "pinaw");
      const MetricSummary al = report.summary(v, phi, "alpha");
      out << report.dataset_name << ',' << variant_key(v) << ',' << phi << ",mean," << rm.mean
          << ',' << pc.mean << ',' << pw.mean << ',' << al.mean << ",,,,,\n";
      out << report.dataset_name << ',' << variant_key(v) << ',' << phi << ",std," << rm.stddev
          << ',' << pc.stddev << ',' << pw.stddev << ',' << al.stddev << ",,,,,\n";
    }
  }
}

void write_report_csv(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  write_report_csv(report, out);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("experiment spec: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kSchema, "experiment spec is not an object");

  ExperimentSpec spec;
  ExperimentConfig& cfg = spec.config;
  cfg.dataset_name = get_or<std::string>(doc, "name", "dataset");
  if (doc.contains("dataset")) {
    std::filesystem::path p = get_or<std::string>(doc, "dataset", "");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    spec.dataset = p;
  }
  spec.target = get_or<std::string>(doc, "target", "");
  if (doc.contains("synthetic")) {
    const json& s = doc.at("synthetic");
    spec.synthetic_rows = get_or<std::size_t>(s, "rows", 4000);
    spec.synthetic_seed = get_or<std::uint64_t>(s, "seed", 0);
  }
  if (!spec.dataset && spec.synthetic_rows == 0) {
    throw Error(ErrorCode::kSchema, "experiment spec needs 'dataset' or 'synthetic'");
  }
  cfg.phi_targets = get_or<std::vector<double>>(doc, "phi_d", cfg.phi_targets);
  cfg.seeds = get_or<std::vector<std::uint64_t>>(doc, "seeds", cfg.seeds);
  cfg.include_baseline = get_or<bool>(doc, "baseline", cfg.include_baseline);
  cfg.method = parse_calibration_method(get_or<std::string>(doc, "method", "search"));
  cfg.lookup_delta = get_or<double>(doc, "lookup_delta", cfg.lookup_delta);
  if (doc.contains("search")) {
    const json& s = doc.at("search");
    SearchConfig& sc = cfg.search;
    sc.alpha_init = get_or<double>(s, "alpha_init", sc.alpha_init);
    sc.delta = get_or<double>(s, "delta", sc.delta);
    sc.gamma = get_or<double>(s, "gamma", sc.gamma);
    sc.epsilon = get_or<double>(s, "epsilon", sc.epsilon);
    sc.max_iters = get_or<std::size_t>(s, "max_iters", sc.max_iters);
    sc.delta_floor = get_or<double>(s, "delta_floor", sc.delta_floor);
  }
  if (doc.contains("train")) {
    const json& t = doc.at("train");
    if (!t.is_object()) throw Error(ErrorCode::kSchema, "'train' must be an object");
    for (const auto& [key, value] : t.items()) apply_train_option(cfg.train, key, scalar_text(value));
  }
  if (doc.contains("output_csv")) {
    std::filesystem::path p = get_or<std::string>(doc, "output_csv", "");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    spec.output_csv = p;
  }
  cfg.validate();
  cfg.train.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_spec(text.str(), path.parent_path());
}

Dataset load_spec_dataset(const ExperimentSpec& spec) {
  if (spec.dataset) return load_csv(*spec.dataset, spec.target).data;
  return make_heteroscedastic_dataset(spec.synthetic_rows, spec.synthetic_seed);
}

}  // namespace gt2fls
